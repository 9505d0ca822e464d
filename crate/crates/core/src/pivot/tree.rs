use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::pair_count;
use crate::seeding::rng_from;

/// An edge-weighted tree on vertices `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTree {
    n: usize,
    adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedTree {
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 || edges.len() != n - 1 {
            return Err(Error::Parameter(format!(
                "a tree on {n} vertices needs {} edges, got {}",
                n.saturating_sub(1),
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v, len) in edges {
            if u >= n || v >= n || u == v || !(0.0..=1.0).contains(&len) {
                return Err(Error::Parameter(format!("invalid tree edge ({u}, {v}, {len})")));
            }
            adj[u].push((v, len));
            adj[v].push((u, len));
        }
        let tree = Self { n, adj };
        if tree.distances_from(0).iter().any(|d| d.is_nan()) {
            return Err(Error::Parameter("edges do not form a connected tree".into()));
        }
        Ok(tree)
    }

    /// Random recursive tree: vertex `i` attaches to a uniform earlier vertex
    /// with a length uniform in `[0, max_len)`.
    pub fn random(n: usize, max_len: f64, seed: u64) -> Result<Self> {
        let mut rng = rng_from(seed, &[0x7EE]);
        let edges: Vec<_> = (1..n)
            .map(|i| (rng.random_range(0..i), i, rng.random::<f64>() * max_len))
            .collect();
        Self::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Path distances from `s`; NaN marks unreachable vertices.
    pub fn distances_from(&self, s: usize) -> Vec<f64> {
        let mut dist = vec![f64::NAN; self.n];
        dist[s] = 0.0;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &(v, len) in &self.adj[u] {
                if dist[v].is_nan() {
                    dist[v] = dist[u] + len;
                    stack.push(v);
                }
            }
        }
        dist
    }

    /// Vertices on the unique `u`–`v` path, endpoints included.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.n];
        parent[u] = u;
        let mut stack = vec![u];
        while let Some(a) = stack.pop() {
            for &(b, _) in &self.adj[a] {
                if parent[b] == usize::MAX {
                    parent[b] = a;
                    stack.push(b);
                }
            }
        }
        let mut path = vec![v];
        let mut cur = v;
        while cur != u {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Path metric in flat pair-index order.
    pub fn metric(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(pair_count(self.n));
        for u in 0..self.n {
            let d = self.distances_from(u);
            out.extend_from_slice(&d[u + 1..]);
        }
        out
    }
}

/// Witness width `2 min(d(u,w), d(w,v))` for a witness on the `u`–`v` path.
pub fn tree_metric_witness_width(tree: &WeightedTree, u: usize, v: usize, w: usize) -> Result<f64> {
    let n = tree.n();
    if u >= n || v >= n || w >= n || u == v {
        return Err(Error::Parameter(format!("invalid vertices ({u}, {v}, {w})")));
    }
    if w == u || w == v {
        return Err(Error::Precondition("the endpoints are not witnesses".into()));
    }
    let path = tree.path(u, v);
    if !path.contains(&w) {
        return Err(Error::Precondition(format!("{w} is not on the path from {u} to {v}")));
    }
    let dw = tree.distances_from(w);
    if dw[u] + dw[v] > 1.0 {
        return Err(Error::Precondition("path length exceeds 1".into()));
    }
    Ok(2.0 * dw[u].min(dw[v]))
}
