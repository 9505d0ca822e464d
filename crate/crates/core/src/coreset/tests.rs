use super::*;
use crate::instance::{generate, pair_index, InstanceSpec, Sign};
use proptest::prelude::*;

#[test]
fn single_pair_coreset_is_the_graph() {
    let inst = CCInstance::new(2, vec![Sign::Negative], vec![2.5]).unwrap();
    for m in [1, 7, 100] {
        let h = sample_coreset(&inst, m, 3).unwrap();
        assert!((h.weights()[0] - 2.5).abs() < 1e-12);
        assert_eq!(h.signs(), inst.signs());
    }
}

#[test]
fn coreset_preserves_total_weight_and_signs() {
    let inst = generate(&InstanceSpec::Euclidean { n: 30 }, 2).unwrap().instance;
    let h = sample_coreset(&inst, 150, 9).unwrap();
    assert!((h.total_weight() - inst.total_weight()).abs() < 1e-9 * inst.total_weight());
    assert_eq!(h.signs(), inst.signs());
    assert!(h.weights().iter().filter(|&&w| w > 0.0).count() <= 150);
    assert_eq!(sample_coreset(&inst, 150, 9).unwrap(), h);
    let zero = inst.with_weights(vec![0.0; inst.num_pairs()]).unwrap();
    assert!(matches!(sample_coreset(&zero, 5, 0), Err(Error::Degenerate(_))));
    assert!(sample_coreset(&inst, 0, 0).is_err());
}

#[test]
fn error_of_identical_graph_is_zero() {
    let inst = generate(&InstanceSpec::General { n: 20, p_pos: 0.5 }, 1).unwrap().instance;
    let fam = evaluation_family(20, 10, 4).unwrap();
    assert_eq!(fam.len(), 50);
    assert_eq!(evaluate_coreset_error(&inst, &inst, &fam).unwrap(), 0.0);
    assert!(evaluate_coreset_error(&inst, &inst, &[]).is_err());
    let other = generate(&InstanceSpec::General { n: 21, p_pos: 0.5 }, 1).unwrap().instance;
    assert!(evaluate_coreset_error(&inst, &other, &fam).is_err());
}

#[test]
fn coreset_is_unbiased() {
    let inst = generate(&InstanceSpec::Euclidean { n: 12 }, 5).unwrap().instance;
    let c = random_clustering(12, 3, 1).unwrap();
    let truth = cost(&inst, &c).unwrap().total;
    let draws = 2000;
    let vals: Vec<f64> = (0..draws)
        .map(|s| cost(&sample_coreset(&inst, 20, s).unwrap(), &c).unwrap().total)
        .collect();
    let mean = vals.iter().sum::<f64>() / draws as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    let se = (var / draws as f64).sqrt();
    assert!((mean - truth).abs() <= 3.0 * se, "{mean} vs {truth} (se {se})");
}

#[test]
fn sample_size_values() {
    let p = CoresetParams::new(0.1, 0.1).unwrap();
    assert_eq!(sample_size(&p, 100, 1.0).unwrap(), 11513);
    let half = CoresetParams::new(0.05, 0.1).unwrap();
    assert_eq!(sample_size(&half, 100, 1.0).unwrap(), 59777);
    let small = CoresetParams::new(0.2, 0.05).unwrap();
    assert_eq!(sample_size(&small, 10, 1.0).unwrap(), 219);
    let thr = CoresetParams {
        tau: Some(50.0),
        ..p
    };
    assert_eq!(sample_size(&thr, 100, 200.0).unwrap(), 294002);
    let same = CoresetParams { tau: Some(7.0), ..p };
    assert_eq!(sample_size(&same, 100, 7.0).unwrap(), 11513);
    assert!(CoresetParams::new(1.0, 0.1).is_err());
    assert!(CoresetParams::new(0.1, 0.0).is_err());
}

#[test]
fn sensitivity_examples() {
    let inst = CCInstance::uniform(6, Sign::Negative, 1.0).unwrap();
    let s = sensitivity_bound(&inst, 5.0).unwrap();
    assert!(s.per_edge.iter().all(|&x| (x - 0.2).abs() < 1e-15));
    assert!((s.total - 3.0).abs() < 1e-12);
    assert!((s.per_edge.iter().sum::<f64>() - s.total).abs() <= 1e-9 * s.total);
    assert!(sensitivity_bound(&inst, 0.0).is_err());
}

#[test]
fn star_and_cycle_in_five_vertices() {
    let inst = CCInstance::uniform(5, Sign::Positive, 1.0).unwrap();
    let star = [(0, 1), (0, 2), (0, 3), (0, 4)];
    assert!(vc_shattering(&inst, &star).unwrap().shattered);
    let with_cycle = [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)];
    let r = vc_shattering(&inst, &with_cycle).unwrap();
    assert!(!r.shattered);
    assert!(r.missing.is_some());
    assert!(verify_star_shattering(&inst, 0).unwrap());
}

#[test]
fn mixed_signs_do_not_change_shattering() {
    let inst = generate(&InstanceSpec::General { n: 6, p_pos: 0.5 }, 3).unwrap().instance;
    let r = vc_exact(&inst, 10_000, 0).unwrap();
    assert_eq!(r.vc, Some(5));
    assert!(r.exhaustive);
    assert_eq!(r.size_n_sets_checked, 5005);
}

#[test]
fn vc_is_n_minus_one() {
    for n in 3..=6 {
        let inst = CCInstance::uniform(n, Sign::Positive, 1.0).unwrap();
        let r = vc_exact(&inst, 10_000, 1).unwrap();
        assert_eq!(r.vc, Some(n - 1), "{r:?}");
    }
}

#[test]
fn shattering_caps() {
    let inst = CCInstance::uniform(13, Sign::Positive, 1.0).unwrap();
    let edges: Vec<(usize, usize)> = (1..13).map(|v| (0, v)).collect();
    assert!(matches!(vc_shattering(&inst, &edges), Err(Error::Size(_))));
    assert!(vc_shattering(&inst, &[(0, 1), (1, 0)]).is_err());
}

#[test]
fn combinations_count() {
    assert_eq!(combinations(6, 3).count(), 20);
    assert_eq!(combinations(4, 0).count(), 1);
    assert_eq!(combinations(3, 4).count(), 0);
    assert_eq!(combinations(4, 2).last(), Some(vec![2, 3]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn superset_of_non_shattered_is_non_shattered(mask in 0u32..(1 << 10), extra in 0usize..10) {
        let inst = CCInstance::uniform(5, Sign::Positive, 1.0).unwrap();
        let all: Vec<(usize, usize)> = crate::instance::pairs(5).collect();
        let set: Vec<(usize, usize)> = (0..10).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        let r = vc_shattering(&inst, &set).unwrap();
        if !r.shattered && !set.contains(&all[extra]) {
            let mut sup = set.clone();
            sup.push(all[extra]);
            prop_assert!(!vc_shattering(&inst, &sup).unwrap().shattered);
        }
    }

    #[test]
    fn sample_size_monotone(e1 in 0.01f64..0.99, e2 in 0.01f64..0.99, d1 in 0.01f64..0.99, d2 in 0.01f64..0.99, n1 in 2usize..500, n2 in 2usize..500) {
        let (elo, ehi) = (e1.min(e2), e1.max(e2));
        let (dlo, dhi) = (d1.min(d2), d1.max(d2));
        let m = |e, d, n| sample_size(&CoresetParams::new(e, d).unwrap(), n, 1.0).unwrap();
        prop_assert!(m(elo, 0.1, 50) >= m(ehi, 0.1, 50));
        prop_assert!(m(0.1, dlo, 50) >= m(0.1, dhi, 50));
        prop_assert!(m(0.1, 0.1, n1.min(n2)) <= m(0.1, 0.1, n1.max(n2)));
    }

    #[test]
    fn coreset_weights_are_multiples(m in 1usize..200, seed in any::<u64>()) {
        let inst = generate(&InstanceSpec::Euclidean { n: 8 }, 1).unwrap().instance;
        let h = sample_coreset(&inst, m, seed).unwrap();
        let unit = inst.total_weight() / m as f64;
        let draws: f64 = h.weights().iter().map(|w| (w / unit).round()).sum();
        prop_assert_eq!(draws as usize, m);
        prop_assert_eq!(h.weight(0, 1), h.weights()[pair_index(8, 0, 1)]);
    }
}
