//! Weight-proportional edge coresets and the shattering oracle behind their size bound.

mod vc;

pub use vc::{
    combinations, star_realization, verify_star_shattering, vc_exact, vc_shattering, Shattering, VcReport,
    MAX_SHATTER_EDGES, MAX_SHATTER_VERTICES,
};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;

use crate::clustering::{cost, random_clustering, Clustering};
use crate::error::{Error, Result};
use crate::instance::CCInstance;
use crate::seeding::{derive_seed, rng_from};

const STREAM_CORESET: u64 = 0xC0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoresetParams {
    pub epsilon: f64,
    pub delta: f64,
    /// Threshold for relative error; switches sizing to threshold mode.
    pub tau: Option<f64>,
    pub c_vc: f64,
}

impl CoresetParams {
    pub const DEFAULT_C_VC: f64 = 0.5;

    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        Self {
            epsilon,
            delta,
            tau: None,
            c_vc: Self::DEFAULT_C_VC,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(self.epsilon) || !open_unit(self.delta) {
            return Err(Error::Parameter(format!(
                "epsilon={} and delta={} must lie in (0, 1)",
                self.epsilon, self.delta
            )));
        }
        if self.tau.is_some_and(|t| !(t > 0.0)) || !(self.c_vc > 0.0) {
            return Err(Error::Parameter(format!("tau={:?}, c_vc={} must be positive", self.tau, self.c_vc)));
        }
        Ok(self)
    }
}

/// Number of samples for an additive `epsilon W` guarantee (or `epsilon tau` in threshold mode).
pub fn sample_size(params: &CoresetParams, n: usize, total_weight: f64) -> Result<usize> {
    let p = params.validated()?;
    let eps = match p.tau {
        None => p.epsilon,
        Some(tau) => {
            if !(total_weight > 0.0) {
                return Err(Error::Parameter("threshold mode needs a positive total weight".into()));
            }
            p.epsilon * tau / total_weight
        }
    };
    let raw = p.c_vc * ((n.saturating_sub(1)) as f64 * (1.0 / eps).ln() + (1.0 / p.delta).ln()) / (eps * eps);
    Ok(raw.ceil().max(1.0) as usize)
}

/// Draws `m` pairs with probability proportional to weight; each draw adds `W / m`.
pub fn sample_coreset(inst: &CCInstance, m: usize, seed: u64) -> Result<CCInstance> {
    if m == 0 {
        return Err(Error::Parameter("coreset size m must be at least 1".into()));
    }
    let w = inst.total_weight();
    if !(w > 0.0) {
        return Err(Error::Degenerate("total weight is zero".into()));
    }
    let dist = WeightedIndex::new(inst.weights()).map_err(|e| Error::Degenerate(e.to_string()))?;
    let mut rng = rng_from(seed, &[STREAM_CORESET]);
    let mut counts = vec![0u64; inst.num_pairs()];
    for _ in 0..m {
        counts[dist.sample(&mut rng)] += 1;
    }
    let weights = counts.iter().map(|&c| c as f64 * w / m as f64).collect();
    inst.with_weights(weights)
}

/// `max |cost_H(C) - cost_G(C)| / W(G)` over the given clusterings.
pub fn evaluate_coreset_error(g: &CCInstance, h: &CCInstance, clusterings: &[Clustering]) -> Result<f64> {
    if g.n() != h.n() {
        return Err(Error::Size(format!("instances have n={} and n={}", g.n(), h.n())));
    }
    if clusterings.is_empty() {
        return Err(Error::Parameter("at least one clustering is required".into()));
    }
    let w = g.total_weight();
    if !(w > 0.0) {
        return Err(Error::Degenerate("total weight is zero".into()));
    }
    let errs: Result<Vec<f64>> = clusterings
        .par_iter()
        .map(|c| Ok((cost(h, c)?.total - cost(g, c)?.total).abs() / w))
        .collect();
    Ok(errs?.into_iter().fold(0.0, f64::max))
}

/// Evaluation family: `per_k` random clusterings for each `k` in
/// `{2, ceil(sqrt n), ceil(n/2), n}` plus up to 10 star clusterings `{0, i}`.
pub fn evaluation_family(n: usize, per_k: usize, seed: u64) -> Result<Vec<Clustering>> {
    let ks = [2.min(n), (n as f64).sqrt().ceil() as usize, n.div_ceil(2), n];
    let mut out = Vec::with_capacity(4 * per_k + 10);
    for (ki, &k) in ks.iter().enumerate() {
        for i in 0..per_k {
            out.push(random_clustering(n, k.max(1), derive_seed(seed, &[ki as u64, i as u64]))?);
        }
    }
    for i in 1..n.min(11) {
        let mut labels: Vec<usize> = (0..n).collect();
        labels[i] = 0;
        out.push(Clustering::new(labels));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensitivityBound {
    /// `w_e / OPT` in flat pair order.
    pub per_edge: Vec<f64>,
    /// `W / OPT`.
    pub total: f64,
}

pub fn sensitivity_bound(inst: &CCInstance, opt_cost: f64) -> Result<SensitivityBound> {
    if !(opt_cost > 0.0) {
        return Err(Error::Parameter(format!("opt_cost must be positive, got {opt_cost}")));
    }
    Ok(SensitivityBound {
        per_edge: inst.weights().iter().map(|w| w / opt_cost).collect(),
        total: inst.total_weight() / opt_cost,
    })
}

#[cfg(test)]
mod tests;
