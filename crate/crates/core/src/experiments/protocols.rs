use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::{dataset_spec, ExperimentConfig, ResultRow};
use crate::baselines::{kwikcluster_observed, pivot_acn, uniform_random_baseline};
use crate::clustering::{agreement_scores, brute_force_opt, cost, Clustering};
use crate::coreset::{evaluate_coreset_error, evaluation_family, sample_coreset};
use crate::error::{Error, Result};
use crate::instance::{
    generate, load_edge_list, pair_count, CCInstance, CliqueVariant, HiddenCliqueMeta, InstanceSpec, Sign,
};
use crate::lp::{cutting_plane_solve, CuttingPlaneOptions, CuttingPlaneTrace, LpSolution};
use crate::pivot::{
    imputation_stats, lp_pivot, nested_samples, sample_edges, sparse_lp_pivot, witness_fraction, ObservedMarginals,
    RoundingFunctions, SampleModel, SampleSet, WitnessScope,
};
use crate::seeding::derive_seed;

const KEY_INSTANCE: u64 = 0x1257;
const KEY_SAMPLE: u64 = 0x5A3B;
const KEY_ROUND: u64 = 0x20D0;
const KEY_FAMILY: u64 = 0xFA31;
const LP_FLOOR: f64 = 1e-12;

struct Emitter<'a> {
    experiment: u8,
    dataset: &'a str,
    n: usize,
    sweep: &'a str,
}

impl Emitter<'_> {
    fn row(&self, sweep_value: f64, trial: usize, metric: impl Into<String>, value: f64) -> ResultRow {
        ResultRow {
            experiment: self.experiment,
            dataset: self.dataset.to_string(),
            n: self.n,
            sweep: self.sweep.to_string(),
            sweep_value,
            trial,
            metric: metric.into(),
            value,
        }
    }
}

fn solve(inst: &CCInstance) -> Result<(LpSolution, CuttingPlaneTrace)> {
    cutting_plane_solve(
        inst,
        &CuttingPlaneOptions {
            purge: true,
            ..Default::default()
        },
    )
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

fn flatten(parts: Vec<Result<Vec<ResultRow>>>) -> Result<Vec<ResultRow>> {
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn n15(n: usize) -> f64 {
    (n as f64).powf(1.5)
}

fn budget_at(n: usize, r: f64) -> usize {
    ((r * n15(n)).round() as usize).clamp(1, pair_count(n))
}

/// Experiment 1: additive error of weight-proportional coresets.
pub(super) fn coreset_quality(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut out = Vec::new();
    for dataset in &cfg.datasets {
        for &n in &cfg.sizes {
            let spec = dataset_spec(dataset, n)?;
            let inst = generate(&spec, derive_seed(cfg.seed, &[1, KEY_INSTANCE, n as u64]))?.instance;
            let nf = n as f64;
            let ms: Vec<usize> = if cfg.sweep.is_empty() {
                [nf, 5.0 * nf, nf * nf.ln(), 5.0 * nf * nf.ln()]
                    .iter()
                    .map(|m| m.round() as usize)
                    .collect()
            } else {
                cfg.sweep.iter().map(|&m| m.round().max(1.0) as usize).collect()
            };
            let em = Emitter {
                experiment: 1,
                dataset,
                n,
                sweep: "m",
            };
            let parts: Vec<Result<Vec<ResultRow>>> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let family = evaluation_family(n, 250, derive_seed(cfg.seed, &[1, KEY_FAMILY, n as u64, t as u64]))?;
                    ms.iter()
                        .enumerate()
                        .map(|(mi, &m)| {
                            let h = sample_coreset(&inst, m, derive_seed(cfg.seed, &[1, KEY_SAMPLE, n as u64, t as u64, mi as u64]))?;
                            let err = evaluate_coreset_error(&inst, &h, &family)?;
                            Ok(em.row(m as f64, t, "coreset_error", err))
                        })
                        .collect()
                })
                .collect();
            out.extend(flatten(parts)?);
        }
    }
    Ok(out)
}

/// Experiment 2: how few triangle constraints the cutting-plane solver needs.
pub(super) fn constraint_sparsification(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut out = Vec::new();
    for dataset in &cfg.datasets {
        let jobs: Vec<(usize, usize)> = cfg
            .sizes
            .iter()
            .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
            .collect();
        let parts: Vec<Result<Vec<ResultRow>>> = jobs
            .into_par_iter()
            .map(|(n, t)| {
                let spec = dataset_spec(dataset, n)?;
                let inst = generate(&spec, derive_seed(cfg.seed, &[2, KEY_INSTANCE, n as u64, t as u64]))?.instance;
                let (solved, ms) = timed(|| solve(&inst));
                let (sol, trace) = solved?;
                let em = Emitter {
                    experiment: 2,
                    dataset,
                    n,
                    sweep: "n",
                };
                let nv = n as f64;
                let total = trace.total_triangles.max(1) as f64;
                let mut rows = vec![
                    em.row(nv, t, "lp_value", sol.objective),
                    em.row(nv, t, "iterations", trace.iterations as f64),
                    em.row(nv, t, "active_count", trace.active_triangles as f64),
                    em.row(nv, t, "active_rank", trace.active_rank as f64),
                    em.row(nv, t, "total_constraints", trace.total_triangles as f64),
                    em.row(nv, t, "ratio", trace.active_triangles as f64 / total),
                    em.row(nv, t, "tight_full", trace.tight_triangles_full as f64),
                    em.row(nv, t, "simplex_iterations", trace.simplex_iterations as f64),
                ];
                if cfg.timing {
                    rows.push(em.row(nv, t, "wallclock_ms", ms));
                }
                Ok(rows)
            })
            .collect();
        out.extend(flatten(parts)?);
    }
    Ok(out)
}

/// Experiment 3: share of pairs with an observed witness as the budget crosses `n^1.5`.
pub(super) fn witness_density(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let jobs: Vec<(usize, usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.sweep.len()).flat_map(move |ri| (0..cfg.trials).map(move |t| (n, ri, t))))
        .collect();
    let dataset = cfg.datasets.first().map_or("witness", String::as_str);
    let parts: Vec<Result<ResultRow>> = jobs
        .into_par_iter()
        .map(|(n, ri, t)| {
            let r = cfg.sweep[ri];
            let m = budget_at(n, r);
            let s = sample_edges(
                n,
                SampleModel::ExactM(m),
                derive_seed(cfg.seed, &[3, KEY_SAMPLE, n as u64, ri as u64, t as u64]),
            )?;
            let em = Emitter {
                experiment: 3,
                dataset,
                n,
                sweep: "m_over_n15",
            };
            Ok(em.row(r, t, "witness_fraction", witness_fraction(&s)))
        })
        .collect();
    parts.into_iter().collect()
}

fn ratio(c: f64, lp: f64) -> Option<f64> {
    (lp > LP_FLOOR).then(|| c / lp)
}

struct Scored {
    name: &'static str,
    clustering: Clustering,
    ms: f64,
}

fn score_rows(
    em: &Emitter<'_>,
    inst: &CCInstance,
    lp: f64,
    truth: Option<&Clustering>,
    sv: f64,
    t: usize,
    timing: bool,
    algs: &[Scored],
) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for a in algs {
        if let Some(r) = ratio(cost(inst, &a.clustering)?.total, lp) {
            rows.push(em.row(sv, t, format!("{}.approx_ratio", a.name), r));
        }
        if let Some(truth) = truth {
            let s = agreement_scores(&a.clustering, truth)?;
            rows.push(em.row(sv, t, format!("{}.nmi", a.name), s.nmi));
            rows.push(em.row(sv, t, format!("{}.ari", a.name), s.ari));
        }
        if timing {
            rows.push(em.row(sv, t, format!("{}.wallclock_ms", a.name), a.ms));
        }
    }
    Ok(rows)
}

/// Experiment 4: sparse LP-pivot against full LP-pivot and the combinatorial baselines.
pub(super) fn sparse_vs_baselines(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let rf = RoundingFunctions::default();
    let mut out = Vec::new();
    for (di, dataset) in cfg.datasets.iter().enumerate() {
        for &n in &cfg.sizes {
            let spec = dataset_spec(dataset, n)?;
            let gen = generate(&spec, derive_seed(cfg.seed, &[4, KEY_INSTANCE, di as u64, n as u64]))?;
            let inst = &gen.instance;
            let (sol, _) = solve(inst)?;
            let budgets: Vec<usize> = if cfg.sweep.is_empty() {
                let b = n15(n).floor() as usize;
                vec![(n as f64 / 2.0).round() as usize, n, 2 * n, b, 2 * b]
            } else {
                cfg.sweep.iter().map(|&m| m.round() as usize).collect()
            }
            .into_iter()
            .map(|m| m.clamp(1, pair_count(n)))
            .collect();
            let em = Emitter {
                experiment: 4,
                dataset,
                n,
                sweep: "m",
            };
            let parts: Vec<Result<Vec<ResultRow>>> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let keys = [4, di as u64, n as u64, t as u64];
                    let rs = derive_seed(cfg.seed, &[&keys[..], &[KEY_ROUND]].concat());
                    let samples = nested_samples(n, &budgets, derive_seed(cfg.seed, &[&keys[..], &[KEY_SAMPLE]].concat()))?;
                    let (full, full_ms) = timed(|| lp_pivot(inst, &sol, &rf, rs));
                    let (acn, acn_ms) = timed(|| pivot_acn(inst, rs));
                    let (uni, uni_ms) = timed(|| uniform_random_baseline(inst, rs));
                    let (full, uni) = (full?, uni?);
                    let mut rows = Vec::new();
                    for (s, &m) in samples.iter().zip(&budgets) {
                        let obs = ObservedMarginals::from_solution(&sol, s)?;
                        let (sparse, sparse_ms) = timed(|| sparse_lp_pivot(inst, &obs, &rf, rs, WitnessScope::Residual));
                        let (kwik, kwik_ms) = timed(|| kwikcluster_observed(inst, s, rs));
                        let algs = [
                            Scored {
                                name: "sparse_lp_pivot",
                                clustering: sparse?,
                                ms: sparse_ms,
                            },
                            Scored {
                                name: "full_lp_pivot",
                                clustering: full.clone(),
                                ms: full_ms,
                            },
                            Scored {
                                name: "pivot",
                                clustering: acn.clone(),
                                ms: acn_ms,
                            },
                            Scored {
                                name: "kwikcluster",
                                clustering: kwik,
                                ms: kwik_ms,
                            },
                            Scored {
                                name: "uniform_random",
                                clustering: uni.clone(),
                                ms: uni_ms,
                            },
                        ];
                        let sv = m as f64;
                        rows.extend(score_rows(
                            &em,
                            inst,
                            sol.objective,
                            gen.ground_truth.as_ref(),
                            sv,
                            t,
                            cfg.timing,
                            &algs,
                        )?);
                        let stats = imputation_stats(inst, &sol, s)?;
                        rows.push(em.row(sv, t, "gamma_bar_w", stats.gamma_bar_w));
                        rows.push(em.row(sv, t, "witness_fraction", stats.witness_fraction));
                    }
                    Ok(rows)
                })
                .collect();
            out.extend(flatten(parts)?);
        }
    }
    Ok(out)
}

/// Experiment 5: sparse LP-pivot quality and the imputation diagnostic as the metric is corrupted.
pub(super) fn metric_violation(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let rf = RoundingFunctions::default();
    let mut out = Vec::new();
    for &n in &cfg.sizes {
        let budgets: Vec<usize> = cfg.budget_ratios.iter().map(|&r| budget_at(n, r)).collect();
        let labels: Vec<String> = cfg
            .budget_ratios
            .iter()
            .map(|r| format!("metric_violation_r{r}"))
            .collect();
        let solved: Vec<Result<(CCInstance, LpSolution)>> = cfg
            .sweep
            .par_iter()
            .enumerate()
            .map(|(ei, &eta)| {
                let spec = InstanceSpec::MetricViolation { n, eta };
                let inst = generate(&spec, derive_seed(cfg.seed, &[5, KEY_INSTANCE, n as u64, ei as u64]))?.instance;
                let (sol, _) = solve(&inst)?;
                Ok((inst, sol))
            })
            .collect();
        let solved: Vec<(CCInstance, LpSolution)> = solved.into_iter().collect::<Result<_>>()?;
        let jobs: Vec<(usize, usize)> = (0..cfg.sweep.len())
            .flat_map(|ei| (0..cfg.trials).map(move |t| (ei, t)))
            .collect();
        let parts: Vec<Result<Vec<(usize, ResultRow)>>> = jobs
            .into_par_iter()
            .map(|(ei, t)| {
                let (inst, sol) = &solved[ei];
                let eta = cfg.sweep[ei];
                let keys = [5, n as u64, ei as u64, t as u64];
                let rs = derive_seed(cfg.seed, &[&keys[..], &[KEY_ROUND]].concat());
                let samples = nested_samples(n, &budgets, derive_seed(cfg.seed, &[&keys[..], &[KEY_SAMPLE]].concat()))?;
                let full = cost(inst, &lp_pivot(inst, sol, &rf, rs)?)?.total;
                let mut rows = Vec::new();
                for (bi, s) in samples.iter().enumerate() {
                    let em = Emitter {
                        experiment: 5,
                        dataset: &labels[bi],
                        n,
                        sweep: "eta",
                    };
                    let obs = ObservedMarginals::from_solution(sol, s)?;
                    let sparse = sparse_lp_pivot(inst, &obs, &rf, rs, WitnessScope::Residual)?;
                    let sparse = cost(inst, &sparse)?.total;
                    if let Some(r) = ratio(sparse, sol.objective) {
                        rows.push((bi, em.row(eta, t, "sparse_lp_pivot.approx_ratio", r)));
                    }
                    if let Some(r) = ratio(full, sol.objective) {
                        rows.push((bi, em.row(eta, t, "full_lp_pivot.approx_ratio", r)));
                    }
                    let stats = imputation_stats(inst, sol, s)?;
                    rows.push((bi, em.row(eta, t, "gamma_bar_w", stats.gamma_bar_w)));
                }
                Ok(rows)
            })
            .collect();
        let mut tagged = Vec::new();
        for p in parts {
            tagged.extend(p?);
        }
        // group by budget label, keeping eta/trial order within each
        for bi in 0..budgets.len() {
            out.extend(tagged.iter().filter(|(b, _)| *b == bi).map(|(_, r)| r.clone()));
        }
    }
    Ok(out)
}

/// The instance an algorithm that only sees `sample` would reconstruct:
/// observed pairs keep their sign and weight, the rest become unit positive pairs.
pub fn completion_instance(inst: &CCInstance, sample: &SampleSet) -> Result<CCInstance> {
    if sample.n() != inst.n() {
        return Err(Error::LengthMismatch {
            expected: inst.n(),
            actual: sample.n(),
        });
    }
    let signs = (0..inst.num_pairs())
        .map(|i| {
            if sample.contains_index(i) {
                inst.signs()[i]
            } else {
                Sign::Positive
            }
        })
        .collect();
    let weights = (0..inst.num_pairs())
        .map(|i| if sample.contains_index(i) { inst.weights()[i] } else { 1.0 })
        .collect();
    CCInstance::new(inst.n(), signs, weights)
}

/// True when `sample` observes no clique pair and no matching pair of the instance.
pub fn indistinguishable(meta: &HiddenCliqueMeta, sample: &SampleSet) -> bool {
    let hits_clique = meta
        .clique
        .iter()
        .enumerate()
        .any(|(i, &u)| meta.clique[i + 1..].iter().any(|&v| sample.contains(u, v)));
    let hits_matching = meta.matching.iter().any(|&(u, v)| sample.contains(u, v));
    !hits_clique && !hits_matching
}

/// Experiment 6: S-measurable algorithms on the hidden-clique pair D0 / D1.
pub(super) fn lower_bound(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let rf = RoundingFunctions::default();
    let mut out = Vec::new();
    for &n in &cfg.sizes {
        let jobs: Vec<(usize, usize)> = (0..cfg.trials)
            .flat_map(|t| (0..cfg.sweep.len()).map(move |ri| (t, ri)))
            .collect();
        let parts: Vec<Result<Vec<(usize, ResultRow)>>> = jobs
            .into_par_iter()
            .map(|(t, ri)| {
                let r = cfg.sweep[ri];
                let m = ((r * n as f64).round() as usize).clamp(1, pair_count(n));
                let sample = sample_edges(
                    n,
                    SampleModel::ExactM(m),
                    derive_seed(cfg.seed, &[6, KEY_SAMPLE, n as u64, t as u64, ri as u64]),
                )?;
                let rs = derive_seed(cfg.seed, &[6, KEY_ROUND, n as u64, t as u64, ri as u64]);
                let mut rows = Vec::new();
                for (vi, variant) in [CliqueVariant::D0, CliqueVariant::D1].into_iter().enumerate() {
                    let spec = InstanceSpec::HiddenClique { n, variant };
                    let gen = generate(&spec, derive_seed(cfg.seed, &[6, KEY_INSTANCE, n as u64, vi as u64, t as u64]))?;
                    let meta = gen.hidden_clique.expect("hidden-clique generator returns metadata");
                    let inst = &gen.instance;
                    let mut denom = meta.reference_cost;
                    if n <= 10 {
                        denom = denom.min(brute_force_opt(inst, 10)?.1.total);
                    }
                    let seen = completion_instance(inst, &sample)?;
                    let (seen_sol, _) = solve(&seen)?;
                    let algs = [
                        ("all_together", Clustering::all_together(n)),
                        ("completion_pivot", pivot_acn(&seen, rs)),
                        ("completion_lp_pivot", lp_pivot(&seen, &seen_sol, &rf, rs)?),
                    ];
                    let dataset = spec.name();
                    let em = Emitter {
                        experiment: 6,
                        dataset,
                        n,
                        sweep: "m_over_n",
                    };
                    for (name, c) in &algs {
                        let c = cost(inst, c)?.total;
                        if denom > LP_FLOOR {
                            rows.push((vi, em.row(r, t, format!("{name}.ratio"), c / denom)));
                        }
                    }
                    let hit = indistinguishable(&meta, &sample);
                    rows.push((vi, em.row(r, t, "indistinguishable", if hit { 1.0 } else { 0.0 })));
                }
                Ok(rows)
            })
            .collect();
        let mut tagged = Vec::new();
        for p in parts {
            tagged.extend(p?);
        }
        for vi in 0..2 {
            out.extend(tagged.iter().filter(|(v, _)| *v == vi).map(|(_, r)| r.clone()));
        }
    }
    Ok(out)
}

fn read_labels(path: &Path, n: usize) -> Result<Clustering> {
    let text = fs::read_to_string(path)?;
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let label = line.parse::<usize>().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("expected a nonnegative integer label, got '{line}'"),
        })?;
        labels.push(label);
    }
    if labels.len() < n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: labels.len(),
        });
    }
    labels.truncate(n);
    Ok(Clustering::new(labels))
}

/// Experiment 7: agreement with a reference clustering on a loaded graph.
pub(super) fn real_data(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let path = cfg
        .edge_list
        .as_deref()
        .ok_or_else(|| Error::Parameter("experiment 7 requires --edge-list".into()))?;
    let full = load_edge_list(path)?;
    let n = full.n().min(cfg.max_n);
    if n < 3 {
        return Err(Error::Size(format!("need at least 3 vertices, got {n}")));
    }
    let inst = CCInstance::from_fn(n, |u, v| (full.sign(u, v), full.weight(u, v)))?;
    let (sol, _) = solve(&inst)?;
    let rf = RoundingFunctions::default();
    let reference = match &cfg.labels {
        Some(p) => read_labels(p, n)?,
        None => lp_pivot(&inst, &sol, &rf, derive_seed(cfg.seed, &[7, KEY_ROUND]))?,
    };
    let budgets: Vec<usize> = if cfg.sweep.is_empty() {
        let b = n15(n);
        vec![n as f64, b / 2.0, b, 2.0 * b]
    } else {
        cfg.sweep.clone()
    }
    .into_iter()
    .map(|m| (m.round() as usize).clamp(1, pair_count(n)))
    .collect();
    let dataset = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("edge_list")
        .to_string();
    let em = Emitter {
        experiment: 7,
        dataset: &dataset,
        n,
        sweep: "m",
    };
    let parts: Vec<Result<Vec<ResultRow>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let rs = derive_seed(cfg.seed, &[7, KEY_ROUND, t as u64]);
            let samples = nested_samples(n, &budgets, derive_seed(cfg.seed, &[7, KEY_SAMPLE, t as u64]))?;
            let mut rows = Vec::new();
            for (s, &m) in samples.iter().zip(&budgets) {
                let obs = ObservedMarginals::from_solution(&sol, s)?;
                let algs = [
                    ("sparse_lp_pivot", sparse_lp_pivot(&inst, &obs, &rf, rs, WitnessScope::Residual)?),
                    ("kwikcluster", kwikcluster_observed(&inst, s, rs)),
                ];
                for (name, c) in &algs {
                    let a = agreement_scores(c, &reference)?;
                    rows.push(em.row(m as f64, t, format!("{name}.nmi"), a.nmi));
                    rows.push(em.row(m as f64, t, format!("{name}.ari"), a.ari));
                }
            }
            Ok(rows)
        })
        .collect();
    flatten(parts)
}
