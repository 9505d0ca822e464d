//! Numerical rank of sparse constraint rows by incremental elimination.

use std::collections::HashMap;

/// Row echelon basis built one sparse row at a time.
pub(crate) struct EchelonBasis {
    dim: usize,
    threshold: f64,
    pivots: HashMap<usize, Vec<(usize, f64)>>,
}

impl EchelonBasis {
    /// `threshold` is relative to the largest norm of the rows that will be inserted.
    pub fn new(dim: usize, threshold: f64) -> Self {
        Self {
            dim,
            threshold,
            pivots: HashMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    /// Inserts a row given as `(column, value)` entries. Returns whether it raised the rank.
    pub fn insert(&mut self, entries: &[(usize, f64)]) -> bool {
        let mut row: Vec<(usize, f64)> = entries.to_vec();
        row.sort_by_key(|e| e.0);
        row = merge(&row, &[], 0.0, self.threshold);
        loop {
            let Some(&(lead, a)) = row.first() else {
                return false;
            };
            match self.pivots.get(&lead) {
                Some(p) => row = merge(&row, p, a, self.threshold),
                None => {
                    let row = row.iter().map(|&(c, v)| (c, v / a)).collect();
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }
}

/// `a - f * b` over sorted sparse rows, dropping entries at or below `thr`.
fn merge(a: &[(usize, f64)], b: &[(usize, f64)], f: f64, thr: f64) -> Vec<(usize, f64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (c, v) = match (a.get(i), b.get(j)) {
            (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                i += 1;
                j += 1;
                (ca, va - f * vb)
            }
            (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                i += 1;
                (ca, va)
            }
            (Some(&(ca, va)), None) => {
                i += 1;
                (ca, va)
            }
            (_, Some(&(cb, vb))) => {
                j += 1;
                (cb, -f * vb)
            }
            (None, None) => unreachable!(),
        };
        if v.abs() > thr {
            out.push((c, v));
        }
    }
    out
}
