use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::{run_experiment, write_csv, ExperimentConfig};
use crate::clustering::cost;
use crate::coreset::{evaluate_coreset_error, evaluation_family, sample_coreset, sample_size, vc_exact, CoresetParams};
use crate::error::{Error, Result};
use crate::instance::{check_pseudometric, generate, load_edge_list, save_edge_list, CCInstance, CliqueVariant, InstanceSpec, Sign};
use crate::lp::{cutting_plane_solve, write_solution_dump, CuttingPlaneOptions, DEFAULT_TOL};
use crate::pivot::{lp_pivot, sample_edges, sparse_lp_pivot, ObservedMarginals, RoundingFunctions, SampleModel, WitnessScope};
use crate::seeding::derive_seed;

#[derive(Parser, Debug)]
#[command(name = "cc-sparsify", version, about = "Sparsified LP-based correlation clustering")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Overrides the experiment's default trial count.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Euclidean,
    General,
    Sbm,
    HiddenClique,
    MetricViolation,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    D0,
    D1,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PivotMode {
    Full,
    Sparse,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic instance as an edge list.
    Gen(GenArgs),
    /// Report triangle-inequality violations of the weights.
    CheckMetric {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Solve the triangle LP by cutting planes and dump the marginals.
    SolveLp(SolveArgs),
    /// Draw a weight-proportional coreset and report its error on a clustering family.
    Coreset {
        #[arg(long)]
        input: PathBuf,
        /// Number of draws; derived from epsilon and delta when omitted.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
    /// Round the LP solution by full or sparse pivot and print the labels.
    Pivot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = PivotMode::Full)]
        mode: PivotMode,
        /// Observed pairs for sparse mode; defaults to n^1.5.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Confirm the VC dimension of the disagreement class by shattering.
    Vc {
        #[arg(long)]
        n: usize,
        /// Sample this many size-n edge sets when exhaustive search is larger.
        #[arg(long, default_value_t = 2000)]
        max_sets: usize,
    },
    /// Run one of the seven experiments and write tidy CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p_pos: f64,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0.8)]
    p_intra: f64,
    #[arg(long, default_value_t = 0.8)]
    p_inter: f64,
    #[arg(long, value_enum, default_value_t = Variant::D1)]
    variant: Variant,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed the working set with triangles whose weights are within this gap of tight.
    #[arg(long)]
    warm_start: Option<f64>,
    /// Drop slack working-set rows between rounds.
    #[arg(long)]
    purge: bool,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
    id: u8,
    /// Vertex counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Sweep values, comma separated.
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    dataset: Vec<String>,
    /// Budgets m / n^1.5 for experiment 5.
    #[arg(long, value_delimiter = ',')]
    budget_ratios: Vec<f64>,
    /// Add wall-clock rows.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    edge_list: Option<PathBuf>,
    /// One integer label per line for the edge-list vertices.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    max_n: Option<usize>,
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &Path) -> Result<CCInstance> {
    load_edge_list(path)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Lp(_) => 2,
        _ => 1,
    }
}

/// Parses `argv` (including the program name), runs the command and returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let Format::Csv = cli.format;
    match cli.command {
        Command::Gen(a) => {
            let spec = match a.kind {
                Kind::Euclidean => InstanceSpec::Euclidean { n: a.n },
                Kind::General => InstanceSpec::General { n: a.n, p_pos: a.p_pos },
                Kind::Sbm => InstanceSpec::Sbm {
                    n: a.n,
                    k: a.k,
                    p_intra: a.p_intra,
                    p_inter: a.p_inter,
                },
                Kind::HiddenClique => InstanceSpec::HiddenClique {
                    n: a.n,
                    variant: match a.variant {
                        Variant::D0 => CliqueVariant::D0,
                        Variant::D1 => CliqueVariant::D1,
                    },
                },
                Kind::MetricViolation => InstanceSpec::MetricViolation { n: a.n, eta: a.eta },
            };
            let path = cli
                .out
                .ok_or_else(|| Error::Parameter("gen requires --out".into()))?;
            let inst = generate(&spec, cli.seed)?.instance;
            save_edge_list(&inst, &path, true)
        }
        Command::CheckMetric { input, tol } => {
            let inst = load(&input)?;
            let violations = check_pseudometric(&inst, tol);
            let mut out = output(&cli.out)?;
            for v in violations.iter().take(20) {
                writeln!(out, "{v:?}")?;
            }
            writeln!(out, "violations={}", violations.len())?;
            out.flush()?;
            Ok(())
        }
        Command::SolveLp(a) => {
            let inst = load(&a.input)?;
            let opts = CuttingPlaneOptions {
                tol: a.tol,
                warm_start: a.warm_start,
                purge: a.purge,
                ..Default::default()
            };
            let (sol, trace) = cutting_plane_solve(&inst, &opts)?;
            let mut out = output(&cli.out)?;
            write_solution_dump(&mut out, &sol, &trace)?;
            out.flush()?;
            Ok(())
        }
        Command::Coreset { input, m, epsilon, delta } => {
            let inst = load(&input)?;
            let m = match m {
                Some(m) => m,
                None => sample_size(&CoresetParams::new(epsilon, delta)?, inst.n(), inst.total_weight())?,
            };
            let h = sample_coreset(&inst, m, cli.seed)?;
            let family = evaluation_family(inst.n(), 250, derive_seed(cli.seed, &[1]))?;
            let err = evaluate_coreset_error(&inst, &h, &family)?;
            if let Some(p) = &cli.out {
                save_edge_list(&h, p, true)?;
            }
            println!("m={m} coreset_error={err}");
            Ok(())
        }
        Command::Pivot { input, mode, m } => {
            let inst = load(&input)?;
            let n = inst.n();
            let (sol, _) = cutting_plane_solve(&inst, &CuttingPlaneOptions::default())?;
            let rf = RoundingFunctions::default();
            let rs = derive_seed(cli.seed, &[2]);
            let c = match mode {
                PivotMode::Full => lp_pivot(&inst, &sol, &rf, rs)?,
                PivotMode::Sparse => {
                    let m = m.unwrap_or(((n as f64).powf(1.5)) as usize).min(inst.num_pairs());
                    let s = sample_edges(n, SampleModel::ExactM(m), derive_seed(cli.seed, &[3]))?;
                    let obs = ObservedMarginals::from_solution(&sol, &s)?;
                    sparse_lp_pivot(&inst, &obs, &rf, rs, WitnessScope::Residual)?
                }
            };
            let mut out = output(&cli.out)?;
            for l in c.labels() {
                writeln!(out, "{l}")?;
            }
            out.flush()?;
            eprintln!("cost={} lp={}", cost(&inst, &c)?.total, sol.objective);
            Ok(())
        }
        Command::Vc { n, max_sets } => {
            let inst = CCInstance::uniform(n, Sign::Positive, 1.0)?;
            let report = vc_exact(&inst, max_sets, cli.seed)?;
            let mut out = output(&cli.out)?;
            match report.vc {
                Some(d) => writeln!(out, "VC={d}")?,
                None => writeln!(out, "VC=unconfirmed")?,
            }
            writeln!(
                out,
                "star_constructive={} star_oracle={} checked={} shattered={} exhaustive={}",
                report.star_constructive,
                report.star_oracle,
                report.size_n_sets_checked,
                report.size_n_sets_shattered,
                report.exhaustive
            )?;
            out.flush()?;
            Ok(())
        }
        Command::Experiment(a) => {
            let mut cfg = ExperimentConfig::new(a.id)?;
            cfg.seed = cli.seed;
            if let Some(t) = cli.trials {
                cfg.trials = t;
            }
            if !a.n.is_empty() {
                cfg.sizes = a.n;
            }
            if !a.sweep.is_empty() {
                cfg.sweep = a.sweep;
            }
            if !a.dataset.is_empty() {
                cfg.datasets = a.dataset;
            }
            if !a.budget_ratios.is_empty() {
                cfg.budget_ratios = a.budget_ratios;
            }
            if let Some(m) = a.max_n {
                cfg.max_n = m;
            }
            cfg.timing = a.timing;
            cfg.edge_list = a.edge_list;
            cfg.labels = a.labels;
            let rows = run_experiment(&cfg)?;
            let mut out = output(&cli.out)?;
            write_csv(&mut out, &rows)?;
            out.flush()?;
            Ok(())
        }
    }
}
