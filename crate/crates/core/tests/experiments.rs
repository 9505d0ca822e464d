use std::io::Write;

use cc_sparsify::experiments::{
    completion_instance, indistinguishable, read_csv, run_experiment, write_csv, ExperimentConfig, HEADER,
};
use cc_sparsify::instance::{generate, save_edge_list, CliqueVariant, InstanceSpec};
use cc_sparsify::pivot::SampleSet;
use cc_sparsify::{Error, Sign};
use proptest::prelude::*;

fn cfg(id: u8) -> ExperimentConfig {
    ExperimentConfig::new(id).unwrap()
}

#[test]
fn witness_rows_are_sizes_times_ratios_times_trials() {
    let mut c = cfg(3);
    c.sizes = vec![50, 100];
    let rows = run_experiment(&c).unwrap();
    assert_eq!(rows.len(), 2 * 4 * 20);
    assert!(rows.iter().all(|r| r.metric == "witness_fraction" && r.experiment == 3));
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(ExperimentConfig::new(0).is_err());
    assert!(ExperimentConfig::new(8).is_err());
    let mut c = cfg(3);
    c.trials = 0;
    assert!(matches!(run_experiment(&c), Err(Error::Parameter(_))));
    let mut c = cfg(5);
    c.sweep = vec![1.5];
    assert!(run_experiment(&c).is_err());
    let mut c = cfg(1);
    c.datasets = vec!["nope".into()];
    assert!(run_experiment(&c).is_err());
    assert!(matches!(run_experiment(&cfg(7)), Err(Error::Parameter(_))));
    let mut c = cfg(3);
    c.sizes = vec![2];
    assert!(run_experiment(&c).is_err());
}

#[test]
fn sparse_comparison_emits_every_algorithm() {
    let mut c = cfg(4);
    c.sizes = vec![15];
    c.trials = 2;
    c.timing = true;
    let rows = run_experiment(&c).unwrap();
    for alg in ["sparse_lp_pivot", "full_lp_pivot", "pivot", "kwikcluster", "uniform_random"] {
        for suffix in ["approx_ratio", "wallclock_ms"] {
            assert!(rows.iter().any(|r| r.metric == format!("{alg}.{suffix}")), "{alg}.{suffix}");
        }
        assert!(rows
            .iter()
            .any(|r| r.dataset == "sbm" && r.metric == format!("{alg}.ari")));
        assert!(!rows
            .iter()
            .any(|r| r.dataset == "euclidean" && r.metric == format!("{alg}.nmi")));
    }
    assert!(rows.iter().all(|r| r.value.is_finite()));
    let budgets: std::collections::BTreeSet<i64> = rows.iter().map(|r| r.sweep_value as i64).collect();
    assert_eq!(budgets.into_iter().collect::<Vec<_>>(), vec![8, 15, 30, 58, 105]);
}

#[test]
fn timing_rows_only_on_request() {
    let mut c = cfg(4);
    c.sizes = vec![12];
    c.trials = 1;
    let rows = run_experiment(&c).unwrap();
    assert!(!rows.iter().any(|r| r.metric.ends_with("wallclock_ms")));
}

#[test]
fn metric_violation_labels_budgets() {
    let mut c = cfg(5);
    c.sizes = vec![12];
    c.trials = 2;
    c.sweep = vec![0.0, 0.3];
    let rows = run_experiment(&c).unwrap();
    let datasets: std::collections::BTreeSet<&str> = rows.iter().map(|r| r.dataset.as_str()).collect();
    assert_eq!(
        datasets.into_iter().collect::<Vec<_>>(),
        vec!["metric_violation_r0.2", "metric_violation_r1"]
    );
    assert!(rows.iter().all(|r| r.sweep == "eta"));
}

#[test]
fn small_lower_bound_uses_exact_denominator() {
    let mut c = cfg(6);
    c.sizes = vec![9];
    c.trials = 3;
    c.sweep = vec![0.5];
    let rows = run_experiment(&c).unwrap();
    // the exact optimum can only lower the denominator
    assert!(rows
        .iter()
        .filter(|r| r.metric.ends_with(".ratio"))
        .all(|r| r.value >= 1.0 - 1e-12));
}

#[test]
fn completion_keeps_observed_pairs_only() {
    let g = generate(
        &InstanceSpec::HiddenClique {
            n: 16,
            variant: CliqueVariant::D1,
        },
        2,
    )
    .unwrap();
    let meta = g.hidden_clique.unwrap();
    let (a, b) = (meta.clique[0], meta.clique[1]);
    let (p, q) = meta.matching[0];

    let empty = SampleSet::from_pairs(16, &[]).unwrap();
    let blind = completion_instance(&g.instance, &empty).unwrap();
    assert!(blind.signs().iter().all(|&s| s == Sign::Positive));
    assert!(blind.weights().iter().all(|&w| w == 1.0));
    assert!(indistinguishable(&meta, &empty));

    let s = SampleSet::from_pairs(16, &[(a, b)]).unwrap();
    let seen = completion_instance(&g.instance, &s).unwrap();
    assert_eq!(seen.sign(a, b), Sign::Negative);
    assert_eq!(seen.weight(a, b), 256.0);
    assert!(!indistinguishable(&meta, &s));
    assert!(!indistinguishable(&meta, &SampleSet::from_pairs(16, &[(p, q)]).unwrap()));
}

#[test]
fn real_data_with_labels() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(
        &InstanceSpec::Sbm {
            n: 24,
            k: 3,
            p_intra: 0.9,
            p_inter: 0.9,
        },
        5,
    )
    .unwrap();
    let edges = dir.path().join("toy.txt");
    save_edge_list(&g.instance, &edges, true).unwrap();
    let labels = dir.path().join("labels.txt");
    let mut f = std::fs::File::create(&labels).unwrap();
    writeln!(f, "# planted blocks").unwrap();
    for l in g.ground_truth.as_ref().unwrap().labels() {
        writeln!(f, "{l}").unwrap();
    }
    drop(f);

    let mut c = cfg(7);
    c.edge_list = Some(edges.clone());
    c.labels = Some(labels);
    c.max_n = 20;
    c.trials = 2;
    let rows = run_experiment(&c).unwrap();
    assert!(rows.iter().all(|r| r.dataset == "toy" && r.n == 20));
    assert_eq!(rows.len(), 2 * 4 * 2 * 2);
    assert!(rows.iter().all(|r| (-1.0..=1.0 + 1e-12).contains(&r.value)));

    let short = dir.path().join("short.txt");
    std::fs::write(&short, "0\n1\n").unwrap();
    c.labels = Some(short);
    assert!(matches!(run_experiment(&c), Err(Error::LengthMismatch { .. })));
}

#[test]
fn csv_output_round_trips() {
    let mut c = cfg(2);
    c.sizes = vec![6, 8];
    c.trials = 2;
    let rows = run_experiment(&c).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with(HEADER));
    assert!(!text.contains('\r'));
    let back = read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in back.iter().zip(&rows) {
        assert_eq!((a.n, a.trial, &a.metric), (b.n, b.trial, &b.metric));
        assert!((a.value - b.value).abs() <= 1e-5 * b.value.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn same_seed_same_rows(id in prop::sample::select(vec![1u8, 2, 3, 4, 5, 6]), seed in 0u64..1000) {
        let mut c = cfg(id);
        c.seed = seed;
        c.trials = 2;
        c.sizes = vec![if id == 3 { 30 } else { 10 }];
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.iter().all(|r| r.value.is_finite()));
    }
}
