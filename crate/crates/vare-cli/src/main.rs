use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vare::directions::ReferenceDirectionSet;
use vare_cli::experiment::{compare, load_summary, run_experiment, sweep, SweepParameter};
use vare_cli::{ExperimentConfig, OperatorChoice, Variant};

#[derive(Parser)]
#[command(
    name = "vare",
    about = "Dynamic multi-objective optimisation experiments with the vare algorithm",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment (several independent seeded runs) and write
    /// trace/summary files.
    Run(RunArgs),
    /// Compare two experiment directories by their per-run MIGD values.
    Compare(CompareArgs),
    /// Run one experiment per parameter value and write a sweep CSV.
    Sweep(SweepArgs),
    /// Print a reference-direction set as CSV.
    Refdirs(RefdirsArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Problem name: df1, df4, df5 or fda4.
    #[arg(long)]
    problem: String,

    /// Severity of change n_t.
    #[arg(long, default_value_t = 10)]
    nt: u32,

    /// Frequency of change τ_t (generations per environment).
    #[arg(long, default_value_t = 10)]
    taut: u32,

    /// Number of environments per run.
    #[arg(long, default_value_t = 50)]
    changes: usize,

    /// Independent runs (seeds base-seed, base-seed+1, ...).
    #[arg(long, default_value_t = 5)]
    runs: usize,

    /// Base seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Algorithm variant: vare, var-only or eah-only.
    #[arg(long, default_value_t = Variant::Vare)]
    variant: Variant,

    /// VAR lag order l.
    #[arg(long, default_value_t = 5)]
    lag: usize,

    /// Success-window multiplier γ.
    #[arg(long, default_value_t = 1)]
    gamma: usize,

    /// Reproduction operator: rm-meda or sbx-pm.
    #[arg(long, default_value_t = OperatorChoice::RmMeda)]
    operator: OperatorChoice,

    /// True-PF sample size per environment.
    #[arg(long, default_value_t = 10_000)]
    pf_samples: usize,

    /// Output directory.
    #[arg(long)]
    out: PathBuf,

    /// Parallel run workers (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,

    /// Also export the PF reference set of every environment as CSV.
    #[arg(long)]
    export_pf: bool,
}

impl ExperimentArgs {
    fn to_config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(&self.problem, &self.out);
        cfg.severity = self.nt;
        cfg.frequency = self.taut;
        cfg.environments = self.changes;
        cfg.runs = self.runs;
        cfg.base_seed = self.seed;
        cfg.variant = self.variant;
        cfg.lag = self.lag;
        cfg.gamma = self.gamma;
        cfg.operator = self.operator;
        cfg.pf_samples = self.pf_samples;
        cfg.workers = self.workers;
        cfg.export_pf = self.export_pf;
        cfg
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Experiment directory A (as written by `vare run`).
    #[arg(long)]
    a: PathBuf,

    /// Experiment directory B.
    #[arg(long)]
    b: PathBuf,

    /// Write the comparison report JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,

    /// Parameter to sweep: lag or gamma.
    #[arg(long)]
    param: SweepParameter,

    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<usize>,
}

#[derive(Args)]
struct RefdirsArgs {
    /// Objective count M.
    #[arg(long, default_value_t = 2)]
    objectives: usize,

    /// Simplex-lattice resolution H.
    #[arg(long, default_value_t = 99)]
    resolution: usize,

    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<(), String> {
    match command {
        Command::Run(args) => {
            let cfg = args.experiment.to_config();
            let summary = run_experiment(&cfg).map_err(|e| e.to_string())?;
            println!(
                "{} | variant {} | {} runs x {} environments",
                cfg.problem, cfg.variant, cfg.runs, cfg.environments
            );
            println!(
                "MIGD {:.6e} ({:.3e})  MHV {:.6e} ({:.3e})  runtime {} ms",
                summary.migd_mean,
                summary.migd_std,
                summary.mhv_mean,
                summary.mhv_std,
                summary.total_runtime_ms
            );
            println!("results in {}", cfg.out_dir.display());
            Ok(())
        }
        Command::Compare(args) => {
            let a = load_summary(&args.a).map_err(|e| e.to_string())?;
            let b = load_summary(&args.b).map_err(|e| e.to_string())?;
            let report = compare(&a, &b).map_err(|e| e.to_string())?;
            let body = serde_json::to_string_pretty(&report).expect("serializable");
            match args.out {
                Some(path) => {
                    std::fs::write(&path, body + "\n")
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    println!("report written to {}", path.display());
                }
                None => println!("{body}"),
            }
            Ok(())
        }
        Command::Sweep(args) => {
            let cfg = args.experiment.to_config();
            let rows = sweep(&cfg, args.param, &args.values).map_err(|e| e.to_string())?;
            for row in &rows {
                println!(
                    "{} {} -> MHV {:.6e} ({:.3e})",
                    args.param, row.value, row.mhv_mean, row.mhv_std
                );
            }
            println!(
                "sweep written to {}",
                cfg.out_dir.join("sweep.csv").display()
            );
            Ok(())
        }
        Command::Refdirs(args) => {
            let dirs = ReferenceDirectionSet::generate(args.objectives, args.resolution)
                .map_err(|e| e.to_string())?;
            let mut body = String::new();
            for d in dirs.iter() {
                let row: Vec<String> = d.iter().map(|v| format!("{v}")).collect();
                body.push_str(&row.join(","));
                body.push('\n');
            }
            match args.out {
                Some(path) => {
                    std::fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display()))?
                }
                None => print!("{body}"),
            }
            Ok(())
        }
    }
}
