use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::{pair_count, pair_index, pairs};
use crate::seeding::rng_from;

const STREAM_SAMPLE: u64 = 0x5A;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampleModel {
    ExactM(usize),
    BernoulliP(f64),
    /// Built directly from a list of pairs.
    Explicit,
}

/// A set of observed pairs with per-vertex adjacency.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    n: usize,
    model: SampleModel,
    pairs: Vec<(usize, usize)>,
    observed: Vec<bool>,
    adjacency: Vec<Vec<usize>>,
}

impl SampleSet {
    pub fn from_pairs(n: usize, list: &[(usize, usize)]) -> Result<Self> {
        let mut observed = vec![false; pair_count(n)];
        for &(u, v) in list {
            if u == v || u >= n || v >= n {
                return Err(Error::Parameter(format!("invalid pair ({u}, {v}) for n={n}")));
            }
            let idx = pair_index(n, u, v);
            if observed[idx] {
                return Err(Error::Parameter(format!("pair ({u}, {v}) listed twice")));
            }
            observed[idx] = true;
        }
        Ok(Self::from_mask(n, observed, SampleModel::Explicit))
    }

    pub fn complete(n: usize) -> Self {
        Self::from_mask(n, vec![true; pair_count(n)], SampleModel::BernoulliP(1.0))
    }

    fn from_mask(n: usize, observed: Vec<bool>, model: SampleModel) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (idx, (u, v)) in pairs(n).enumerate() {
            if observed[idx] {
                list.push((u, v));
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        Self {
            n,
            model,
            pairs: list,
            observed,
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> SampleModel {
        self.model
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Observed pairs `(u, v)` with `u < v`, in flat-index order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        u != v && self.observed[pair_index(self.n, u, v)]
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        self.observed[idx]
    }

    /// Sorted observed neighbours of `u`.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    /// Vertices `w` with both `(u, w)` and `(v, w)` observed, ascending.
    pub fn witnesses(&self, u: usize, v: usize) -> impl Iterator<Item = usize> + '_ {
        let (a, b) = if self.adjacency[u].len() <= self.adjacency[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a]
            .iter()
            .copied()
            .filter(move |&w| w != b && self.contains(b, w))
    }
}

/// Draws an observed pair set under the given model.
pub fn sample_edges(n: usize, model: SampleModel, seed: u64) -> Result<SampleSet> {
    let pc = pair_count(n);
    let mut rng = rng_from(seed, &[STREAM_SAMPLE]);
    let mut observed = vec![false; pc];
    match model {
        SampleModel::ExactM(m) => {
            if m > pc {
                return Err(Error::Parameter(format!("m={m} exceeds {pc} pairs")));
            }
            for idx in index::sample(&mut rng, pc, m) {
                observed[idx] = true;
            }
        }
        SampleModel::BernoulliP(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("p={p} outside [0, 1]")));
            }
            for o in &mut observed {
                *o = rng.random::<f64>() < p;
            }
        }
        SampleModel::Explicit => {
            return Err(Error::Parameter("explicit samples are built with SampleSet::from_pairs".into()));
        }
    }
    Ok(SampleSet::from_mask(n, observed, model))
}

/// Nested exact-size samples: one random pair order, each set is a prefix of it.
/// Every returned set is a uniform `m`-subset, and smaller budgets are subsets of larger ones.
pub fn nested_samples(n: usize, budgets: &[usize], seed: u64) -> Result<Vec<SampleSet>> {
    let pc = pair_count(n);
    if let Some(&m) = budgets.iter().find(|&&m| m > pc) {
        return Err(Error::Parameter(format!("m={m} exceeds {pc} pairs")));
    }
    let mut order: Vec<usize> = (0..pc).collect();
    order.shuffle(&mut rng_from(seed, &[STREAM_SAMPLE, 1]));
    Ok(budgets
        .iter()
        .map(|&m| {
            let mut observed = vec![false; pc];
            for &idx in &order[..m] {
                observed[idx] = true;
            }
            SampleSet::from_mask(n, observed, SampleModel::ExactM(m))
        })
        .collect())
}
