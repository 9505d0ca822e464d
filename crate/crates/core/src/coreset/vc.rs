use std::collections::HashSet;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::instance::{pair_count, pairs, CCInstance, Sign};
use crate::seeding::rng_from;
use rand::seq::index;

pub const MAX_SHATTER_EDGES: usize = 25;
pub const MAX_SHATTER_VERTICES: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shattering {
    pub shattered: bool,
    /// Number of distinct disagreement patterns realized by some partition.
    pub realized: usize,
    /// First unrealized pattern (bit `i` = edge `i` disagrees), if any.
    pub missing: Option<Vec<bool>>,
}

fn disagrees(sign: Sign, together: bool) -> bool {
    match sign {
        Sign::Positive => !together,
        Sign::Negative => together,
    }
}

/// Checks whether every disagreement pattern on `edges` is realized by some clustering.
pub fn vc_shattering(inst: &CCInstance, edges: &[(usize, usize)]) -> Result<Shattering> {
    let n = inst.n();
    if edges.len() > MAX_SHATTER_EDGES {
        return Err(Error::Size(format!("{} edges exceed the cap of {MAX_SHATTER_EDGES}", edges.len())));
    }
    let mut seen = HashSet::new();
    let mut touched: Vec<usize> = Vec::new();
    for &(u, v) in edges {
        if u == v || u >= n || v >= n {
            return Err(Error::Parameter(format!("invalid pair ({u}, {v}) for n={n}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::Parameter(format!("pair ({u}, {v}) listed twice")));
        }
        touched.extend([u, v]);
    }
    touched.sort_unstable();
    touched.dedup();
    if touched.len() > MAX_SHATTER_VERTICES {
        return Err(Error::Size(format!(
            "{} touched vertices exceed the cap of {MAX_SHATTER_VERTICES}",
            touched.len()
        )));
    }
    let local = |x: usize| touched.binary_search(&x).unwrap();
    let spec: Vec<(usize, usize, Sign)> = edges
        .iter()
        .map(|&(u, v)| (local(u), local(v), inst.sign(u, v)))
        .collect();
    let patterns = 1usize << edges.len();
    let mut hit = vec![false; patterns];
    let mut realized = 0usize;
    let mut labels = vec![0usize; touched.len()];
    enumerate_partitions(&mut labels, 0, 0, &mut |labels| {
        let mut mask = 0usize;
        for (i, &(a, b, s)) in spec.iter().enumerate() {
            if disagrees(s, labels[a] == labels[b]) {
                mask |= 1 << i;
            }
        }
        if !hit[mask] {
            hit[mask] = true;
            realized += 1;
        }
        realized < patterns
    });
    let missing = hit
        .iter()
        .position(|h| !h)
        .map(|m| (0..edges.len()).map(|i| m >> i & 1 == 1).collect());
    Ok(Shattering {
        shattered: realized == patterns,
        realized,
        missing,
    })
}

/// Restricted-growth enumeration; the visitor returns `false` to stop.
fn enumerate_partitions(labels: &mut [usize], i: usize, used: usize, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if i == labels.len() {
        return visit(labels);
    }
    for l in 0..=used {
        labels[i] = l;
        if !enumerate_partitions(labels, i + 1, used.max(l + 1), visit) {
            return false;
        }
    }
    true
}

/// Clustering realizing `pattern` on the star edges `(center, leaves[i])`:
/// a leaf joins the centre exactly when that makes its edge's disagreement bit match.
pub fn star_realization(inst: &CCInstance, center: usize, leaves: &[usize], pattern: &[bool]) -> Result<Clustering> {
    let n = inst.n();
    if leaves.len() != pattern.len() {
        return Err(Error::LengthMismatch {
            expected: leaves.len(),
            actual: pattern.len(),
        });
    }
    let mut labels: Vec<usize> = (0..n).collect();
    for (&leaf, &bit) in leaves.iter().zip(pattern) {
        if leaf == center || leaf >= n {
            return Err(Error::Parameter(format!("invalid leaf {leaf}")));
        }
        let join = match inst.sign(center, leaf) {
            Sign::Positive => !bit,
            Sign::Negative => bit,
        };
        if join {
            labels[leaf] = labels[center];
        }
    }
    Ok(Clustering::new(labels))
}

/// Builds and checks the realization of every pattern on the full star at `center`.
pub fn verify_star_shattering(inst: &CCInstance, center: usize) -> Result<bool> {
    let n = inst.n();
    let leaves: Vec<usize> = (0..n).filter(|&v| v != center).collect();
    if leaves.len() > MAX_SHATTER_EDGES {
        return Err(Error::Size(format!("star with {} edges exceeds the cap", leaves.len())));
    }
    for mask in 0..1usize << leaves.len() {
        let pattern: Vec<bool> = (0..leaves.len()).map(|i| mask >> i & 1 == 1).collect();
        let c = star_realization(inst, center, &leaves, &pattern)?;
        let ok = leaves
            .iter()
            .zip(&pattern)
            .all(|(&leaf, &bit)| disagrees(inst.sign(center, leaf), c.same_cluster(center, leaf)) == bit);
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcReport {
    pub n: usize,
    /// Every pattern on the star at vertex 0 realized by the explicit construction.
    pub star_constructive: bool,
    /// The same star confirmed shattered by partition enumeration.
    pub star_oracle: bool,
    pub size_n_sets_checked: usize,
    pub size_n_sets_shattered: usize,
    /// Whether all size-`n` edge sets were enumerated (otherwise a sample).
    pub exhaustive: bool,
    /// `n - 1` when the star is shattered and no checked size-`n` set is.
    pub vc: Option<usize>,
}

/// Confirms the VC dimension of the disagreement class on `inst` by a shattered
/// star of `n - 1` edges and the refutation of size-`n` edge sets.
pub fn vc_exact(inst: &CCInstance, max_sets: usize, seed: u64) -> Result<VcReport> {
    let n = inst.n();
    let d = pair_count(n);
    if n > MAX_SHATTER_VERTICES || n > MAX_SHATTER_EDGES {
        return Err(Error::Size(format!("vc_exact supports n <= {MAX_SHATTER_VERTICES}")));
    }
    let all_pairs: Vec<(usize, usize)> = pairs(n).collect();
    let star: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
    let star_constructive = verify_star_shattering(inst, 0)?;
    let star_oracle = vc_shattering(inst, &star)?.shattered;

    let exhaustive = binomial(d, n) <= max_sets as u128;
    let subsets: Vec<Vec<usize>> = if n > d {
        Vec::new()
    } else if exhaustive {
        combinations(d, n).collect()
    } else {
        let mut rng = rng_from(seed, &[0x7C]);
        (0..max_sets)
            .map(|_| {
                let mut s = index::sample(&mut rng, d, n).into_vec();
                s.sort_unstable();
                s
            })
            .collect()
    };
    let mut shattered = 0;
    for s in &subsets {
        let edges: Vec<(usize, usize)> = s.iter().map(|&i| all_pairs[i]).collect();
        if vc_shattering(inst, &edges)?.shattered {
            shattered += 1;
        }
    }
    let vc = (star_constructive && star_oracle && shattered == 0).then_some(n - 1);
    Ok(VcReport {
        n,
        star_constructive,
        star_oracle,
        size_n_sets_checked: subsets.len(),
        size_n_sets_shattered: shattered,
        exhaustive,
        vc,
    })
}
