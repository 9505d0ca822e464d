//! Complete signed weighted graphs.
//!
//! Every unordered pair `{u, v}` of the `n` vertices carries exactly one sign
//! and one nonnegative weight. Pairs are stored in a flat upper-triangular
//! layout addressed by [`pair_index`].

mod edge_list;
mod generate;

pub use edge_list::{load_edge_list, save_edge_list, save_edge_list_with_defaults, EdgeDefaults};
pub use generate::{generate, CliqueVariant, Generated, HiddenCliqueMeta, InstanceSpec};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn is_positive(self) -> bool {
        matches!(self, Sign::Positive)
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }

    pub fn from_symbol(c: &str) -> Option<Sign> {
        match c {
            "+" => Some(Sign::Positive),
            "-" => Some(Sign::Negative),
            _ => None,
        }
    }
}

/// Number of unordered pairs on `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Flat index of the unordered pair `{u, v}`; `u != v`, both `< n`.
#[inline]
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u != v && u < n && v < n);
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// All pairs `(u, v)` with `u < v`, in flat-index order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CCInstance {
    n: usize,
    signs: Vec<Sign>,
    weights: Vec<f64>,
    total_weight: f64,
}

impl CCInstance {
    /// Builds an instance from per-pair vectors in flat-index order.
    pub fn new(n: usize, signs: Vec<Sign>, weights: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Size(format!("instance needs n >= 2, got {n}")));
        }
        let pc = pair_count(n);
        if signs.len() != pc {
            return Err(Error::LengthMismatch {
                expected: pc,
                actual: signs.len(),
            });
        }
        if weights.len() != pc {
            return Err(Error::LengthMismatch {
                expected: pc,
                actual: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Parameter(format!(
                "weights must be finite and nonnegative, found {w}"
            )));
        }
        let total_weight = weights.iter().sum();
        Ok(Self {
            n,
            signs,
            weights,
            total_weight,
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> (Sign, f64)) -> Result<Self> {
        let (signs, weights) = pairs(n).map(|(u, v)| f(u, v)).unzip();
        Self::new(n, signs, weights)
    }

    /// Every pair with the same sign and weight.
    pub fn uniform(n: usize, sign: Sign, weight: f64) -> Result<Self> {
        Self::from_fn(n, |_, _| (sign, weight))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_pairs(&self) -> usize {
        self.weights.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn sign(&self, u: usize, v: usize) -> Sign {
        self.signs[pair_index(self.n, u, v)]
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.weights[pair_index(self.n, u, v)]
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// LP cost coefficient of pair `idx`: `+w` for positive pairs, `-w` for negative.
    pub fn lp_coefficient(&self, idx: usize) -> f64 {
        match self.signs[idx] {
            Sign::Positive => self.weights[idx],
            Sign::Negative => -self.weights[idx],
        }
    }

    /// Sum of weights over negative pairs (constant term of the LP objective).
    pub fn negative_weight(&self) -> f64 {
        self.signs
            .iter()
            .zip(&self.weights)
            .filter(|(s, _)| !s.is_positive())
            .map(|(_, w)| w)
            .sum()
    }

    /// Copy with a new weight vector and the same signs.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.n, self.signs.clone(), weights)
    }
}

/// One triangle-inequality violation `w_uv + w_vw < w_uw - tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricViolation {
    pub u: usize,
    pub v: usize,
    pub w: usize,
    /// `w_uw - w_uv - w_vw`
    pub slack: f64,
}

/// Every ordered triple violating the pseudometric condition by more than `tol`.
pub fn check_pseudometric(inst: &CCInstance, tol: f64) -> Vec<MetricViolation> {
    let n = inst.n();
    let mut out = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if v == u {
                continue;
            }
            let uv = inst.weight(u, v);
            for w in 0..n {
                if w == u || w == v {
                    continue;
                }
                let slack = inst.weight(u, w) - uv - inst.weight(v, w);
                if slack > tol {
                    out.push(MetricViolation { u, v, w, slack });
                }
            }
        }
    }
    out
}
