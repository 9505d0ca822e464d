//! Experiment harness: configurations, protocols, CSV output and the CLI.

mod cli;
mod csv;
mod protocols;
pub mod stats;

use std::path::PathBuf;

pub use cli::cli_main;
pub use csv::{format_g6, read_csv, write_csv, ResultRow, HEADER};
pub use protocols::{completion_instance, indistinguishable};

use crate::error::{Error, Result};
use crate::instance::InstanceSpec;

pub const THREADS_ENV: &str = "CC_SPARSIFY_THREADS";

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub id: u8,
    /// Instance families by name (`euclidean`, `general`, `sbm`).
    pub datasets: Vec<String>,
    /// Vertex counts.
    pub sizes: Vec<usize>,
    /// Sweep values; their meaning depends on the experiment. Empty selects the defaults.
    pub sweep: Vec<f64>,
    /// Budgets `m / n^1.5` at which the metric-violation sweep is run.
    pub budget_ratios: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Emit wall-clock rows (these make output nondeterministic).
    pub timing: bool,
    pub edge_list: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    /// Largest vertex count for which the real-data experiment solves the LP.
    pub max_n: usize,
}

impl ExperimentConfig {
    /// Desk-scale defaults for experiment `id`.
    pub fn new(id: u8) -> Result<Self> {
        let base = Self {
            id,
            datasets: vec!["euclidean".into()],
            sizes: vec![],
            sweep: vec![],
            budget_ratios: vec![],
            trials: 10,
            seed: 0,
            timing: false,
            edge_list: None,
            labels: None,
            max_n: 60,
        };
        let cfg = match id {
            1 => Self {
                sizes: vec![100],
                ..base
            },
            2 => Self {
                sizes: vec![10, 20, 30, 50],
                trials: 5,
                ..base
            },
            3 => Self {
                datasets: vec!["witness".into()],
                sizes: vec![50, 100, 200],
                sweep: vec![0.1, 0.5, 1.0, 2.0],
                trials: 20,
                ..base
            },
            4 => Self {
                datasets: vec!["sbm".into(), "euclidean".into()],
                sizes: vec![50],
                trials: 15,
                ..base
            },
            5 => Self {
                datasets: vec!["metric_violation".into()],
                sizes: vec![40],
                sweep: vec![0.0, 0.05, 0.1, 0.2, 0.3, 0.5],
                budget_ratios: vec![0.2, 1.0],
                trials: 15,
                ..base
            },
            6 => Self {
                datasets: vec!["hidden_clique_d0".into(), "hidden_clique_d1".into()],
                sizes: vec![100],
                sweep: vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0],
                ..base
            },
            7 => Self {
                datasets: vec!["edge_list".into()],
                trials: 5,
                ..base
            },
            _ => return Err(Error::Parameter(format!("experiment id must be 1..=7, got {id}"))),
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=7).contains(&self.id) {
            return Err(Error::Parameter(format!("experiment id must be 1..=7, got {}", self.id)));
        }
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        if self.id != 7 && (self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 3)) {
            return Err(Error::Parameter(format!("sizes must be nonempty and >= 3, got {:?}", self.sizes)));
        }
        if self.sweep.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Parameter(format!("invalid sweep values {:?}", self.sweep)));
        }
        match self.id {
            5 if self.sweep.iter().any(|&e| e > 1.0) => {
                Err(Error::Parameter("eta values must lie in [0, 1]".into()))
            }
            5 if self.budget_ratios.is_empty() || self.budget_ratios.iter().any(|&r| !(r > 0.0)) => {
                Err(Error::Parameter("metric-violation sweep needs positive budget ratios".into()))
            }
            7 if self.edge_list.is_none() => Err(Error::Parameter("experiment 7 requires --edge-list".into())),
            1 | 2 | 4 => {
                for d in &self.datasets {
                    dataset_spec(d, 10)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Named synthetic family at size `n`.
pub fn dataset_spec(name: &str, n: usize) -> Result<InstanceSpec> {
    Ok(match name {
        "euclidean" => InstanceSpec::Euclidean { n },
        "general" => InstanceSpec::General { n, p_pos: 0.7 },
        "sbm" => InstanceSpec::Sbm {
            n,
            k: 5,
            p_intra: 0.8,
            p_inter: 0.8,
        },
        other => return Err(Error::Parameter(format!("unknown dataset '{other}'"))),
    })
}

/// Runs one experiment with trial parallelism capped by `CC_SPARSIFY_THREADS`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parameter(format!("{THREADS_ENV} must be a nonnegative integer, got '{v}'")))?,
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Parameter(e.to_string()))?;
    pool.install(|| match cfg.id {
        1 => protocols::coreset_quality(cfg),
        2 => protocols::constraint_sparsification(cfg),
        3 => protocols::witness_density(cfg),
        4 => protocols::sparse_vs_baselines(cfg),
        5 => protocols::metric_violation(cfg),
        6 => protocols::lower_bound(cfg),
        _ => protocols::real_data(cfg),
    })
}
