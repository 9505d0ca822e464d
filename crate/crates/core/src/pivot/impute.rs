use crate::error::{Error, Result};
use crate::instance::{pair_index, pairs, CCInstance};
use crate::lp::LpSolution;

use super::SampleSet;

/// Interval for `x_uv` implied by a witness `w` through the triangle inequalities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessInterval {
    pub witness: usize,
    pub lower: f64,
    pub upper: f64,
    pub midpoint: f64,
    pub width: f64,
}

impl WitnessInterval {
    pub fn new(witness: usize, x_uw: f64, x_vw: f64) -> Self {
        let lower = (x_uw - x_vw).abs();
        let upper = (x_uw + x_vw).min(1.0);
        Self {
            witness,
            lower,
            upper,
            midpoint: (lower + upper) / 2.0,
            width: upper - lower,
        }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lower - tol && x <= self.upper + tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Imputation {
    pub value: f64,
    pub width: f64,
    pub witness: Option<usize>,
}

/// LP marginals visible only on an observed pair set.
#[derive(Clone, Debug)]
pub struct ObservedMarginals<'a> {
    sample: &'a SampleSet,
    values: Vec<f64>,
}

impl<'a> ObservedMarginals<'a> {
    /// Restricts a full solution to the observed pairs.
    pub fn from_solution(x: &LpSolution, sample: &'a SampleSet) -> Result<Self> {
        if x.n() != sample.n() {
            return Err(Error::LengthMismatch {
                expected: sample.n(),
                actual: x.n(),
            });
        }
        let values = x
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| if sample.contains_index(i) { v } else { f64::NAN })
            .collect();
        Self::checked(sample, values)
    }

    /// `values` lists one marginal per observed pair, in the order of `sample.pairs()`.
    pub fn new(sample: &'a SampleSet, values: &[f64]) -> Result<Self> {
        if values.len() != sample.len() {
            return Err(Error::LengthMismatch {
                expected: sample.len(),
                actual: values.len(),
            });
        }
        let n = sample.n();
        let mut dense = vec![f64::NAN; n * n.saturating_sub(1) / 2];
        for (&(u, v), &x) in sample.pairs().iter().zip(values) {
            dense[pair_index(n, u, v)] = x;
        }
        Self::checked(sample, dense)
    }

    fn checked(sample: &'a SampleSet, values: Vec<f64>) -> Result<Self> {
        for &(u, v) in sample.pairs() {
            let x = values[pair_index(sample.n(), u, v)];
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Parameter(format!("marginal x[{u},{v}] = {x} outside [0, 1]")));
            }
        }
        Ok(Self { sample, values })
    }

    pub fn sample(&self) -> &SampleSet {
        self.sample
    }

    /// Marginal of an observed pair, `None` when unobserved.
    pub fn get(&self, u: usize, v: usize) -> Option<f64> {
        self.sample
            .contains(u, v)
            .then(|| self.values[pair_index(self.sample.n(), u, v)])
    }

    fn raw(&self, u: usize, v: usize) -> f64 {
        self.values[pair_index(self.sample.n(), u, v)]
    }

    /// Narrowest witness interval among witnesses accepted by `allowed`.
    pub(crate) fn best_witness(
        &self,
        u: usize,
        v: usize,
        allowed: impl Fn(usize) -> bool,
    ) -> Option<WitnessInterval> {
        let mut best: Option<WitnessInterval> = None;
        for w in self.sample.witnesses(u, v) {
            if !allowed(w) {
                continue;
            }
            let iv = WitnessInterval::new(w, self.raw(u, w), self.raw(v, w));
            // witnesses arrive in ascending order, so strict comparison keeps the smallest id on ties
            if best.is_none_or(|b| iv.width < b.width) {
                best = Some(iv);
            }
        }
        best
    }

    pub(crate) fn impute_with(&self, u: usize, v: usize, allowed: impl Fn(usize) -> bool) -> Imputation {
        if let Some(x) = self.get(u, v) {
            return Imputation {
                value: x,
                width: 0.0,
                witness: None,
            };
        }
        match self.best_witness(u, v, allowed) {
            Some(iv) => Imputation {
                value: iv.midpoint,
                width: iv.width,
                witness: Some(iv.witness),
            },
            None => Imputation {
                value: 0.5,
                width: 1.0,
                witness: None,
            },
        }
    }
}

/// Min-width witness imputation of `x_uv` from the observed marginals.
pub fn impute_marginal(obs: &ObservedMarginals<'_>, u: usize, v: usize) -> Result<Imputation> {
    let n = obs.sample.n();
    if u == v || u >= n || v >= n {
        return Err(Error::Parameter(format!("invalid pair ({u}, {v}) for n={n}")));
    }
    Ok(obs.impute_with(u, v, |_| true))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImputationStats {
    n: usize,
    /// Per-pair imputation width in flat-index order.
    pub gamma: Vec<f64>,
    pub gamma_bar_w: f64,
    /// Share of all pairs with at least one observed witness.
    pub witness_fraction: f64,
    x: Vec<f64>,
}

impl ImputationStats {
    pub fn gamma(&self, u: usize, v: usize) -> f64 {
        self.gamma[pair_index(self.n, u, v)]
    }

    /// Share of pairs for which at least a `rho` fraction of all other vertices
    /// are witnesses of width at most `gamma` under the full marginals.
    pub fn good_witness_fraction(&self, rho: f64, gamma: f64) -> f64 {
        good_witness_fraction(self.n, &self.x, rho, gamma)
    }
}

fn good_witness_fraction(n: usize, x: &[f64], rho: f64, gamma: f64) -> f64 {
    if n < 3 {
        return 0.0;
    }
    let need = rho * (n - 2) as f64;
    let good = pairs(n)
        .filter(|&(u, v)| {
            let count = (0..n)
                .filter(|&w| w != u && w != v)
                .filter(|&w| {
                    WitnessInterval::new(w, x[pair_index(n, u, w)], x[pair_index(n, v, w)]).width <= gamma
                })
                .count();
            count as f64 >= need
        })
        .count();
    good as f64 / (n * (n - 1) / 2) as f64
}

/// Imputation widths of every pair given full marginals `x` and the observed set.
pub fn imputation_stats(inst: &CCInstance, x: &LpSolution, sample: &SampleSet) -> Result<ImputationStats> {
    let n = inst.n();
    if x.n() != n || sample.n() != n {
        return Err(Error::Size(format!(
            "instance n={n}, solution n={}, sample n={}",
            x.n(),
            sample.n()
        )));
    }
    let w = inst.total_weight();
    if w <= 0.0 {
        return Err(Error::Degenerate("total weight is zero".into()));
    }
    let obs = ObservedMarginals::from_solution(x, sample)?;
    let mut gamma = vec![0.0; inst.num_pairs()];
    let mut with_witness = 0usize;
    for (idx, (u, v)) in pairs(n).enumerate() {
        let best = obs.best_witness(u, v, |_| true);
        if best.is_some() {
            with_witness += 1;
        }
        if !sample.contains_index(idx) {
            gamma[idx] = best.map_or(1.0, |b| b.width);
        }
    }
    let gamma_bar_w = gamma.iter().zip(inst.weights()).map(|(g, w)| g * w).sum::<f64>() / w;
    Ok(ImputationStats {
        n,
        gamma_bar_w,
        witness_fraction: with_witness as f64 / inst.num_pairs() as f64,
        gamma,
        x: x.values().to_vec(),
    })
}

/// Share of all pairs with at least one observed witness.
pub fn witness_fraction(sample: &SampleSet) -> f64 {
    let n = sample.n();
    let total = n * n.saturating_sub(1) / 2;
    if total == 0 {
        return 0.0;
    }
    let hit = pairs(n).filter(|&(u, v)| sample.witnesses(u, v).next().is_some()).count();
    hit as f64 / total as f64
}
