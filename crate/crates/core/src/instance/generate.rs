//! Synthetic instance families.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::{pair_count, pair_index, pairs, CCInstance, Sign};
use crate::clustering::{cost, Clustering};
use crate::error::{Error, Result};
use crate::seeding::rng_from;

// Stream tags keep the sub-generators independent of each other.
const STREAM_POINTS: u64 = 1;
const STREAM_CORRUPT: u64 = 2;
const STREAM_GENERAL: u64 = 3;
const STREAM_SBM: u64 = 4;
const STREAM_CLIQUE: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliqueVariant {
    /// Benign: unit positive graph with a negative matching.
    D0,
    /// Hidden heavy negative clique on a random `floor(sqrt(n))`-subset.
    D1,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSpec {
    /// Points uniform in the unit square, Euclidean weights, positive below the median distance.
    Euclidean { n: usize },
    /// i.i.d. `Uniform[0,1]` weights, positive with probability `p_pos`.
    General { n: usize, p_pos: f64 },
    /// Unit weights, `k` contiguous planted blocks.
    Sbm {
        n: usize,
        k: usize,
        p_intra: f64,
        p_inter: f64,
    },
    HiddenClique { n: usize, variant: CliqueVariant },
    /// Euclidean instance with an `eta` fraction of weights resampled from `Uniform[0,1]`.
    MetricViolation { n: usize, eta: f64 },
}

impl InstanceSpec {
    pub fn n(&self) -> usize {
        match *self {
            InstanceSpec::Euclidean { n }
            | InstanceSpec::General { n, .. }
            | InstanceSpec::Sbm { n, .. }
            | InstanceSpec::HiddenClique { n, .. }
            | InstanceSpec::MetricViolation { n, .. } => n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InstanceSpec::Euclidean { .. } => "euclidean",
            InstanceSpec::General { .. } => "general",
            InstanceSpec::Sbm { .. } => "sbm",
            InstanceSpec::HiddenClique {
                variant: CliqueVariant::D0,
                ..
            } => "hidden_clique_d0",
            InstanceSpec::HiddenClique {
                variant: CliqueVariant::D1,
                ..
            } => "hidden_clique_d1",
            InstanceSpec::MetricViolation { .. } => "metric_violation",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HiddenCliqueMeta {
    pub variant: CliqueVariant,
    /// Clique size `floor(sqrt(n))`.
    pub k: usize,
    /// Heavy weight `n^2`.
    pub heavy_weight: f64,
    /// Sorted clique vertices; empty for `D0`.
    pub clique: Vec<usize>,
    /// Negative unit-weight matching, each pair with `u < v`.
    pub matching: Vec<(usize, usize)>,
    pub reference_clustering: Clustering,
    pub reference_cost: f64,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub instance: CCInstance,
    pub hidden_clique: Option<HiddenCliqueMeta>,
    /// Planted partition, when the family has one.
    pub ground_truth: Option<Clustering>,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must lie in [0,1], got {p}")))
    }
}

pub fn generate(spec: &InstanceSpec, seed: u64) -> Result<Generated> {
    let n = spec.n();
    if n < 3 {
        return Err(Error::Size(format!("generators need n >= 3, got {n}")));
    }
    let plain = |instance| Generated {
        instance,
        hidden_clique: None,
        ground_truth: None,
    };
    match *spec {
        InstanceSpec::Euclidean { n } => Ok(plain(euclidean(n, seed)?)),
        InstanceSpec::General { n, p_pos } => {
            check_probability("p_pos", p_pos)?;
            let mut rng = rng_from(seed, &[STREAM_GENERAL]);
            let inst = CCInstance::from_fn(n, |_, _| {
                let w: f64 = rng.random();
                let sign = if rng.random::<f64>() < p_pos {
                    Sign::Positive
                } else {
                    Sign::Negative
                };
                (sign, w)
            })?;
            Ok(plain(inst))
        }
        InstanceSpec::Sbm {
            n,
            k,
            p_intra,
            p_inter,
        } => {
            check_probability("p_intra", p_intra)?;
            check_probability("p_inter", p_inter)?;
            if k == 0 || k > n {
                return Err(Error::Parameter(format!("sbm needs 1 <= k <= n, got k={k}")));
            }
            let truth = Clustering::new((0..n).map(|i| i * k / n).collect());
            let mut rng = rng_from(seed, &[STREAM_SBM]);
            let inst = CCInstance::from_fn(n, |u, v| {
                let draw: f64 = rng.random();
                let sign = if truth.same_cluster(u, v) {
                    if draw < p_intra {
                        Sign::Positive
                    } else {
                        Sign::Negative
                    }
                } else if draw < p_inter {
                    Sign::Negative
                } else {
                    Sign::Positive
                };
                (sign, 1.0)
            })?;
            Ok(Generated {
                instance: inst,
                hidden_clique: None,
                ground_truth: Some(truth),
            })
        }
        InstanceSpec::HiddenClique { n, variant } => {
            let (instance, meta) = hidden_clique(n, variant, seed)?;
            Ok(Generated {
                instance,
                hidden_clique: Some(meta),
                ground_truth: None,
            })
        }
        InstanceSpec::MetricViolation { n, eta } => {
            check_probability("eta", eta)?;
            let base = euclidean(n, seed)?;
            let pc = pair_count(n);
            let corrupt = (eta * pc as f64).round() as usize;
            if corrupt == 0 {
                return Ok(plain(base));
            }
            let mut rng = rng_from(seed, &[STREAM_CORRUPT]);
            let mut chosen = index::sample(&mut rng, pc, corrupt).into_vec();
            chosen.sort_unstable();
            let mut weights = base.weights().to_vec();
            for idx in chosen {
                weights[idx] = rng.random();
            }
            Ok(plain(base.with_weights(weights)?))
        }
    }
}

fn euclidean(n: usize, seed: u64) -> Result<CCInstance> {
    let mut rng = rng_from(seed, &[STREAM_POINTS]);
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let dist: Vec<f64> = pairs(n)
        .map(|(u, v)| {
            let (dx, dy) = (points[u].0 - points[v].0, points[u].1 - points[v].1);
            (dx * dx + dy * dy).sqrt()
        })
        .collect();
    let mut sorted = dist.clone();
    sorted.sort_by(f64::total_cmp);
    let len = sorted.len();
    let median = if len % 2 == 1 {
        sorted[len / 2]
    } else {
        0.5 * (sorted[len / 2 - 1] + sorted[len / 2])
    };
    let signs = dist
        .iter()
        .map(|&d| {
            if d < median {
                Sign::Positive
            } else {
                Sign::Negative
            }
        })
        .collect();
    CCInstance::new(n, signs, dist)
}

/// Random perfect (or near-perfect) matching on `vertices`.
fn random_matching(vertices: &mut [usize], rng: &mut impl Rng) -> Vec<(usize, usize)> {
    vertices.shuffle(rng);
    let mut matching: Vec<(usize, usize)> = vertices
        .chunks_exact(2)
        .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
        .collect();
    matching.sort_unstable();
    matching
}

fn hidden_clique(
    n: usize,
    variant: CliqueVariant,
    seed: u64,
) -> Result<(CCInstance, HiddenCliqueMeta)> {
    let k = n.isqrt();
    let heavy = (n * n) as f64;
    let mut rng = rng_from(seed, &[STREAM_CLIQUE]);

    let mut clique = Vec::new();
    let mut rest: Vec<usize> = (0..n).collect();
    if variant == CliqueVariant::D1 {
        rest.shuffle(&mut rng);
        clique = rest.split_off(n - k);
        clique.sort_unstable();
        rest.sort_unstable();
    }
    let matching = random_matching(&mut rest, &mut rng);

    let pc = pair_count(n);
    let mut signs = vec![Sign::Positive; pc];
    let mut weights = vec![1.0; pc];
    for &(u, v) in &matching {
        signs[pair_index(n, u, v)] = Sign::Negative;
    }
    for (i, &u) in clique.iter().enumerate() {
        for &v in &clique[i + 1..] {
            let idx = pair_index(n, u, v);
            signs[idx] = Sign::Negative;
            weights[idx] = heavy;
        }
    }
    let instance = CCInstance::new(n, signs, weights)?;

    // D0: everyone together. D1: clique vertices as singletons, the rest together.
    let mut labels = vec![0usize; n];
    for (i, &u) in clique.iter().enumerate() {
        labels[u] = i + 1;
    }
    let reference_clustering = Clustering::new(labels);
    let reference_cost = cost(&instance, &reference_clustering)?.total;

    let meta = HiddenCliqueMeta {
        variant,
        k,
        heavy_weight: heavy,
        clique,
        matching,
        reference_clustering,
        reference_cost,
    };
    Ok((instance, meta))
}
