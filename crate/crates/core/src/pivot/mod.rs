//! Pivot rounding from full or sparsely observed LP marginals.

mod impute;
mod sample;
mod tree;

use std::fmt;
use std::sync::Arc;

pub use impute::{
    impute_marginal, imputation_stats, witness_fraction, ImputationStats, Imputation, ObservedMarginals,
    WitnessInterval,
};
pub use sample::{nested_samples, sample_edges, SampleModel, SampleSet};
pub use tree::{tree_metric_witness_width, WeightedTree};

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::instance::{CCInstance, Sign};
use crate::lp::LpSolution;
use crate::seeding::{keyed_index, keyed_uniform};

const KEY_PIVOT: u64 = 0x9170;
const KEY_JOIN: u64 = 0x10A1;

type Rounding = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Maps an LP distance to a separation probability, one function per sign.
#[derive(Clone)]
pub struct RoundingFunctions {
    f_plus: Rounding,
    f_minus: Rounding,
    pub lipschitz_l: f64,
    pub baseline_alpha: f64,
}

impl fmt::Debug for RoundingFunctions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RoundingFunctions")
            .field("lipschitz_l", &self.lipschitz_l)
            .field("baseline_alpha", &self.baseline_alpha)
            .finish_non_exhaustive()
    }
}

impl Default for RoundingFunctions {
    /// `f(x) = x` for both signs.
    fn default() -> Self {
        Self::new(|x| x, |x| x, 1.0, 3.0)
    }
}

impl RoundingFunctions {
    pub fn new(
        f_plus: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_minus: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lipschitz_l: f64,
        baseline_alpha: f64,
    ) -> Self {
        Self {
            f_plus: Arc::new(f_plus),
            f_minus: Arc::new(f_minus),
            lipschitz_l,
            baseline_alpha,
        }
    }

    /// Separation probability for a pair of the given sign, clamped to `[0, 1]`.
    pub fn eval(&self, sign: Sign, x: f64) -> f64 {
        let f = match sign {
            Sign::Positive => &self.f_plus,
            Sign::Negative => &self.f_minus,
        };
        f(x).clamp(0.0, 1.0)
    }

    /// Largest Lipschitz ratio observed on a uniform grid of `points` values.
    pub fn max_grid_slope(&self, points: usize) -> f64 {
        let grid: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
        let mut worst: f64 = 0.0;
        for sign in [Sign::Positive, Sign::Negative] {
            for a in &grid {
                for b in &grid {
                    if a < b {
                        worst = worst.max((self.eval(sign, *a) - self.eval(sign, *b)).abs() / (b - a));
                    }
                }
            }
        }
        worst
    }
}

/// Runs the pivot recursion; `join(depth, pivot, u, alive)` decides membership.
pub(crate) fn pivot_recursion(
    n: usize,
    seed: u64,
    mut join: impl FnMut(u64, usize, usize, &[bool]) -> bool,
) -> Clustering {
    let mut labels = vec![usize::MAX; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut alive = vec![true; n];
    let mut depth = 0u64;
    while !remaining.is_empty() {
        let pivot = remaining[keyed_index(seed, &[KEY_PIVOT, depth], remaining.len())];
        labels[pivot] = depth as usize;
        for &u in &remaining {
            if u != pivot && join(depth, pivot, u, &alive) {
                labels[u] = depth as usize;
            }
        }
        remaining.retain(|&u| labels[u] == usize::MAX);
        for (a, l) in alive.iter_mut().zip(&labels) {
            *a = *l == usize::MAX;
        }
        depth += 1;
    }
    Clustering::new(labels)
}

fn coin(seed: u64, depth: u64, pivot: usize, u: usize) -> f64 {
    keyed_uniform(seed, &[KEY_JOIN, depth, pivot as u64, u as u64])
}

/// Pivot rounding with exact marginals.
pub fn lp_pivot(inst: &CCInstance, x: &LpSolution, rf: &RoundingFunctions, seed: u64) -> Result<Clustering> {
    if x.n() != inst.n() {
        return Err(Error::LengthMismatch {
            expected: inst.n(),
            actual: x.n(),
        });
    }
    Ok(pivot_recursion(inst.n(), seed, |depth, p, u, _| {
        coin(seed, depth, p, u) < 1.0 - rf.eval(inst.sign(p, u), x.get(p, u))
    }))
}

/// Where imputation may look for witnesses during the recursion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WitnessScope {
    /// Only vertices not yet clustered.
    #[default]
    Residual,
    /// Any vertex.
    Global,
}

/// Pivot rounding that sees marginals only on the observed pairs and imputes the rest.
pub fn sparse_lp_pivot(
    inst: &CCInstance,
    obs: &ObservedMarginals<'_>,
    rf: &RoundingFunctions,
    seed: u64,
    scope: WitnessScope,
) -> Result<Clustering> {
    if obs.sample().n() != inst.n() {
        return Err(Error::LengthMismatch {
            expected: inst.n(),
            actual: obs.sample().n(),
        });
    }
    Ok(pivot_recursion(inst.n(), seed, |depth, p, u, alive| {
        let x = match scope {
            WitnessScope::Residual => obs.impute_with(p, u, |w| alive[w]).value,
            WitnessScope::Global => obs.impute_with(p, u, |_| true).value,
        };
        coin(seed, depth, p, u) < 1.0 - rf.eval(inst.sign(p, u), x)
    }))
}
