// `!(x > 0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cache;
mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shapeshift::bem::solver::SolverSettings;
use shapeshift::validation::ConvergenceStudy;

use cache::{Cache, CACHE_ENV};
use commands::Context;
use config::{Format, RunConfig, CONFIG_HELP};
use error::CliError;

/// Energy tables, dissipation curves and minimum-energy schedules for
/// shape-changing microrobots.
#[derive(Parser)]
#[command(name = "shapeshift", version, after_long_help = CONFIG_HELP)]
struct Cli {
    /// Run configuration (TOML); see `--help` for keys.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file; stdout by default. For `optimize`, the profile CSV.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Refine meshes until the dissipated power changes by less than this
    /// relative amount between levels.
    #[arg(long, global = true, value_name = "REL_TOL")]
    refine: Option<f64>,

    /// Worker threads for grid solves.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensionless groups, power factors, energies and savings for the configured run.
    ScenarioTable,
    /// Dissipation (and mobility) coefficients over the configured grid as CSV.
    Curve,
    /// Uniform versus constant-power schedule; writes the optimal profile CSV.
    Optimize,
    /// Runs the solver against analytic and reference solutions.
    Validate {
        /// Asymmetric relative error injected into the kernel.
        #[arg(long, hide = true, default_value_t = 0.0)]
        kernel_perturbation: f64,
        /// Panel refinement factor of the first convergence level.
        #[arg(long, default_value_t = ConvergenceStudy::default().start)]
        convergence_start: f64,
        /// Levels tried by the convergence study.
        #[arg(long, default_value_t = ConvergenceStudy::default().max_levels)]
        convergence_levels: usize,
    },
    /// Mobility-curve cache (directory from SHAPESHIFT_CACHE_DIR).
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    List,
    Clear,
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs --config <PATH>".into()))?;
    RunConfig::load(path)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    }
    if let Some(t) = cli.refine {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("--refine must be positive, got {t}")));
        }
    }
    let ctx = Context {
        cache: Cache::from_env(),
        refine_target: cli.refine,
    };
    match &cli.command {
        Command::ScenarioTable => {
            let cfg = load(&cli)?;
            let out = cli.out.clone().or_else(|| cfg.output_path.clone());
            let format = cli.format.or(cfg.format).unwrap_or(Format::Table);
            commands::scenario_table(&cfg, &ctx, format, out.as_deref())
        }
        Command::Curve => {
            let cfg = load(&cli)?;
            let out = cli.out.clone().or_else(|| cfg.output_path.clone());
            let format = cli.format.or(cfg.format).unwrap_or(Format::Csv);
            commands::curve(&cfg, &ctx, format, out.as_deref())
        }
        Command::Optimize => {
            let cfg = load(&cli)?;
            let out = cli
                .out
                .clone()
                .or_else(|| cfg.output_path.clone())
                .unwrap_or_else(|| PathBuf::from("profile.csv"));
            let format = cli.format.or(cfg.format).unwrap_or(Format::Table);
            commands::optimize(&cfg, &ctx, format, &out)
        }
        Command::Validate {
            kernel_perturbation,
            convergence_start,
            convergence_levels,
        } => {
            if !(*convergence_start > 0.0) || *convergence_levels == 0 {
                return Err(CliError::Config("convergence study needs a positive start and at least one level".into()));
            }
            let mut settings = SolverSettings::new(1.0);
            settings.kernel_perturbation = *kernel_perturbation;
            let study = ConvergenceStudy {
                start: *convergence_start,
                max_levels: *convergence_levels,
                ..ConvergenceStudy::default()
            };
            commands::validate(&settings, study, cli.format.unwrap_or(Format::Table), cli.out.as_deref())
        }
        Command::Cache { action } => match action {
            CacheAction::List => {
                let entries = ctx.cache.list()?;
                println!("{} ({} entries)", ctx.cache.dir().display(), entries.len());
                for (name, bytes) in entries {
                    println!("{name}\t{bytes}");
                }
                Ok(())
            }
            CacheAction::Clear => {
                let n = ctx.cache.clear()?;
                println!("removed {n} entries from {}", ctx.cache.dir().display());
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shapeshift: {e}");
            if matches!(e, CliError::Solver(_)) {
                eprintln!("(cache directory: set {CACHE_ENV} to relocate)");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
