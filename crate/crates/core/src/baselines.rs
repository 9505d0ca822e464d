//! Combinatorial comparison algorithms that do not use the LP.

use crate::clustering::{random_clustering, Clustering};
use crate::error::Result;
use crate::instance::CCInstance;
use crate::pivot::{pivot_recursion, SampleSet};

/// Classical pivot: each remaining positive neighbour of the pivot joins it.
pub fn pivot_acn(inst: &CCInstance, seed: u64) -> Clustering {
    pivot_recursion(inst.n(), seed, |_, p, u, _| inst.sign(p, u).is_positive())
}

/// Pivot on the observed positive subgraph; unobserved pairs count as non-edges.
pub fn kwikcluster_observed(inst: &CCInstance, sample: &SampleSet, seed: u64) -> Clustering {
    pivot_recursion(inst.n(), seed, |_, p, u, _| {
        sample.contains(p, u) && inst.sign(p, u).is_positive()
    })
}

/// Expected cost of labelling every vertex uniformly from `k` clusters.
pub fn uniform_random_expected_cost(inst: &CCInstance, k: usize) -> f64 {
    let same = 1.0 / k as f64;
    inst.signs()
        .iter()
        .zip(inst.weights())
        .map(|(s, w)| if s.is_positive() { w * (1.0 - same) } else { w * same })
        .sum()
}

/// The `k` in `1..=n` with the smallest expected uniform-random cost (smallest `k` on ties).
pub fn best_uniform_k(inst: &CCInstance) -> usize {
    let mut best = (1, uniform_random_expected_cost(inst, 1));
    for k in 2..=inst.n() {
        let c = uniform_random_expected_cost(inst, k);
        if c < best.1 {
            best = (k, c);
        }
    }
    best.0
}

/// Uniform random clustering with the expected-cost-optimal number of clusters.
pub fn uniform_random_baseline(inst: &CCInstance, seed: u64) -> Result<Clustering> {
    random_clustering(inst.n(), best_uniform_k(inst), seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::cost;
    use crate::instance::{generate, InstanceSpec, Sign};
    use proptest::prelude::*;

    #[test]
    fn extreme_sign_patterns() {
        let pos = CCInstance::uniform(8, Sign::Positive, 1.0).unwrap();
        assert_eq!(pivot_acn(&pos, 1).num_clusters(), 1);
        let neg = CCInstance::uniform(8, Sign::Negative, 1.0).unwrap();
        assert_eq!(pivot_acn(&neg, 1).num_clusters(), 8);
        let empty = SampleSet::from_pairs(8, &[]).unwrap();
        assert_eq!(kwikcluster_observed(&pos, &empty, 1).num_clusters(), 8);
        assert_eq!(best_uniform_k(&pos), 1);
        assert_eq!(best_uniform_k(&neg), 8);
    }

    #[test]
    fn uniform_expected_cost_matches_simulation() {
        let inst = generate(&InstanceSpec::General { n: 12, p_pos: 0.3 }, 2).unwrap().instance;
        let k = best_uniform_k(&inst);
        let runs = 4000;
        let mean = (0..runs)
            .map(|s| cost(&inst, &random_clustering(12, k, s).unwrap()).unwrap().total)
            .sum::<f64>()
            / runs as f64;
        let want = uniform_random_expected_cost(&inst, k);
        assert!((mean - want).abs() < 0.05 * want, "{mean} vs {want}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn recovers_disjoint_positive_cliques(labels in proptest::collection::vec(0usize..4, 2..20), seed in any::<u64>()) {
            let truth = Clustering::new(labels);
            let n = truth.len();
            let inst = CCInstance::from_fn(n, |u, v| {
                (if truth.same_cluster(u, v) { Sign::Positive } else { Sign::Negative }, 1.0)
            }).unwrap();
            let c = pivot_acn(&inst, seed);
            prop_assert!(c.same_partition(&truth));
            prop_assert_eq!(cost(&inst, &c).unwrap().total, 0.0);
        }

        #[test]
        fn complete_sample_matches_pivot(n in 2usize..25, iseed in 0u64..100, seed in any::<u64>()) {
            let inst = generate(&InstanceSpec::General { n: n.max(3), p_pos: 0.5 }, iseed).unwrap().instance;
            let s = SampleSet::complete(inst.n());
            prop_assert_eq!(kwikcluster_observed(&inst, &s, seed), pivot_acn(&inst, seed));
        }
    }
}
