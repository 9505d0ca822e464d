//! Partitions, the disagreement cost, an exhaustive optimum for small
//! instances, and partition agreement scores.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::{pairs, CCInstance, Sign};
use crate::seeding::rng_from;

/// Largest `n` accepted by [`brute_force_opt`] unless the caller raises it.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 12;

/// A partition of `0..n` given by one cluster id per vertex.
///
/// Ids are arbitrary; two clusterings are equivalent when they induce the
/// same partition (see [`Clustering::canonical`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clustering {
    labels: Vec<usize>,
}

impl Clustering {
    pub fn new(labels: Vec<usize>) -> Self {
        Self { labels }
    }

    pub fn all_together(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    pub fn singletons(n: usize) -> Self {
        Self::new((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn same_cluster(&self, u: usize, v: usize) -> bool {
        self.labels[u] == self.labels[v]
    }

    pub fn num_clusters(&self) -> usize {
        let mut ids = self.labels.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// Relabels clusters by order of first appearance (0, 1, 2, ...).
    pub fn canonical(&self) -> Self {
        let mut map = HashMap::new();
        let labels = self
            .labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Self { labels }
    }

    pub fn same_partition(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostReport {
    pub total: f64,
    /// Weight of positive pairs split across clusters.
    pub positive_cut: f64,
    /// Weight of negative pairs kept inside a cluster.
    pub negative_kept: f64,
}

fn check_len(inst: &CCInstance, c: &Clustering) -> Result<()> {
    if c.len() != inst.n() {
        return Err(Error::LengthMismatch {
            expected: inst.n(),
            actual: c.len(),
        });
    }
    Ok(())
}

/// Disagreement cost: cut positive weight plus kept negative weight.
pub fn cost(inst: &CCInstance, c: &Clustering) -> Result<CostReport> {
    check_len(inst, c)?;
    let mut positive_cut = 0.0;
    let mut negative_kept = 0.0;
    for ((u, v), (&s, &w)) in pairs(inst.n()).zip(inst.signs().iter().zip(inst.weights())) {
        let together = c.same_cluster(u, v);
        match s {
            Sign::Positive if !together => positive_cut += w,
            Sign::Negative if together => negative_kept += w,
            _ => {}
        }
    }
    Ok(CostReport {
        total: positive_cut + negative_kept,
        positive_cut,
        negative_kept,
    })
}

/// Exhaustive minimum over all partitions, enumerated as restricted-growth
/// strings in lexicographic order. The first minimizer wins ties.
pub fn brute_force_opt(inst: &CCInstance, max_n: usize) -> Result<(Clustering, CostReport)> {
    let n = inst.n();
    if n > max_n {
        return Err(Error::Size(format!(
            "brute force limited to n <= {max_n}, got {n}"
        )));
    }
    let mut search = Rgs {
        inst,
        labels: vec![0; n],
        best_labels: vec![0; n],
        best: f64::INFINITY,
    };
    search.descend(1, 0, 0.0);
    let best = Clustering::new(search.best_labels);
    let report = cost(inst, &best)?;
    Ok((best, report))
}

struct Rgs<'a> {
    inst: &'a CCInstance,
    labels: Vec<usize>,
    best_labels: Vec<usize>,
    best: f64,
}

impl Rgs<'_> {
    /// Assigns vertex `i` given that blocks `0..=max_block` are in use.
    fn descend(&mut self, i: usize, max_block: usize, partial: f64) {
        // costs are nonnegative, so a partial sum already at the incumbent cannot win
        if partial >= self.best {
            return;
        }
        let n = self.inst.n();
        if i == n {
            self.best = partial;
            self.best_labels.copy_from_slice(&self.labels);
            return;
        }
        for block in 0..=max_block + 1 {
            let mut added = 0.0;
            for u in 0..i {
                let together = self.labels[u] == block;
                let w = self.inst.weight(u, i);
                match self.inst.sign(u, i) {
                    Sign::Positive if !together => added += w,
                    Sign::Negative if together => added += w,
                    _ => {}
                }
            }
            self.labels[i] = block;
            self.descend(i + 1, max_block.max(block), partial + added);
        }
    }
}

/// Each vertex independently uniform over `0..k`.
pub fn random_clustering(n: usize, k: usize, seed: u64) -> Result<Clustering> {
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let mut rng = rng_from(seed, &[0xC1u64]);
    Ok(Clustering::new((0..n).map(|_| rng.random_range(0..k)).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgreementScores {
    /// Mutual information over the geometric mean of the entropies.
    pub nmi: f64,
    /// Adjusted Rand index.
    pub ari: f64,
}

fn comb2(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

pub fn agreement_scores(a: &Clustering, b: &Clustering) -> Result<AgreementScores> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len();
    let identical = a.same_partition(b);
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut cols: HashMap<usize, usize> = HashMap::new();
    let mut cells: HashMap<(usize, usize), usize> = HashMap::new();
    for (&x, &y) in a.labels().iter().zip(b.labels()) {
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
        *cells.entry((x, y)).or_default() += 1;
    }
    // sorted iteration keeps the floating-point sums order-independent
    let sorted = |m: &HashMap<usize, usize>| {
        let mut v: Vec<usize> = m.values().copied().collect();
        v.sort_unstable();
        v
    };
    let (row_counts, col_counts) = (sorted(&rows), sorted(&cols));
    let mut cell_list: Vec<((usize, usize), usize)> = cells.into_iter().collect();
    cell_list.sort_unstable();

    // ARI from the pair-counting contingency table
    let index: f64 = cell_list.iter().map(|(_, c)| comb2(*c)).sum();
    let sum_rows: f64 = row_counts.iter().map(|&c| comb2(c)).sum();
    let sum_cols: f64 = col_counts.iter().map(|&c| comb2(c)).sum();
    let total = comb2(n);
    let ari = if total == 0.0 {
        if identical { 1.0 } else { 0.0 }
    } else {
        let expected = sum_rows * sum_cols / total;
        let max = 0.5 * (sum_rows + sum_cols);
        if (max - expected).abs() <= f64::EPSILON * max.max(1.0) {
            if identical { 1.0 } else { 0.0 }
        } else {
            (index - expected) / (max - expected)
        }
    };

    let nf = n as f64;
    let entropy = |counts: &[usize]| -> f64 {
        counts
            .iter()
            .map(|&c| {
                let p = c as f64 / nf;
                -p * p.ln()
            })
            .sum()
    };
    let (ha, hb) = (entropy(&row_counts), entropy(&col_counts));
    let nmi = if ha <= 0.0 || hb <= 0.0 {
        if identical { 1.0 } else { 0.0 }
    } else {
        let mi: f64 = cell_list
            .iter()
            .map(|&((x, y), c)| {
                let pxy = c as f64 / nf;
                let px = rows[&x] as f64 / nf;
                let py = cols[&y] as f64 / nf;
                pxy * (pxy / (px * py)).ln()
            })
            .sum();
        (mi / (ha * hb).sqrt()).clamp(0.0, 1.0)
    };
    Ok(AgreementScores { nmi, ari })
}
