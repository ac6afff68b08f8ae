//! `vps`: extendability verdicts for radial densities, refinement ladders for the
//! discretized direct problem, and Abel/Eddington transforms of sampled data.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, Format, RunConfig, TransformKind};
use error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "vps",
    version,
    about = "Stationary spherical Vlasov–Poisson models: inverse and direct problems"
)]
struct Cli {
    /// `key=value` file; its entries override flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $VPS_OUTPUT_DIR, else stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    #[command(subcommand)]
    command: Commands,
}

#[derive(Debug, Subcommand)]
enum Commands {
    /// Decide whether a fixture density is the density of a model depending on local energy.
    Inverse {
        #[command(flatten)]
        fixture: FixtureArgs,
        /// Samples per scan of X, q and dH/dh.
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Solve the discretized direct problem for n = 1, 2, 4, …, N.
    Direct {
        #[command(flatten)]
        fixture: FixtureArgs,
        /// Finest grid (a power of two).
        #[arg(long = "n", default_value_t = 128)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-9)]
        newton_tol: f64,
        #[arg(long, default_value_t = 1e-12)]
        bisection_tol: f64,
        #[arg(long, default_value_t = 50)]
        max_iterations: usize,
    },
    /// Apply an Abel or Eddington transform to a fixture or to sampled `x,y` data.
    Transform {
        #[arg(long, value_enum)]
        kind: TransformKind,
        #[arg(long)]
        fixture: Option<String>,
        /// CSV of `x,y` rows, x strictly increasing from 0.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long = "R")]
        cutoff: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        /// Right end of the output grid.
        #[arg(long)]
        upper: Option<f64>,
        /// Number of grid intervals.
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Built-in fixtures.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
}

#[derive(Debug, Subcommand)]
enum ModelsAction {
    /// Names, parameters and expected verdicts.
    List,
}

#[derive(Debug, Args)]
struct FixtureArgs {
    #[arg(long)]
    fixture: Option<String>,
    /// Cutoff radius.
    #[arg(long = "R")]
    cutoff: Option<f64>,
    /// Power-law exponent.
    #[arg(long)]
    b: Option<f64>,
    /// Constant of q(s) = c√s.
    #[arg(long)]
    c: Option<f64>,
}

impl FixtureArgs {
    fn apply(self, cfg: &mut RunConfig) {
        cfg.fixture = self.fixture;
        cfg.cutoff = self.cutoff;
        cfg.b = self.b;
        cfg.c = self.c;
    }
}

fn run_config(cli: Cli) -> Result<RunConfig> {
    let mut cfg = match cli.command {
        Commands::Inverse { fixture, grid } => {
            let mut cfg = RunConfig::new(Command::Inverse);
            fixture.apply(&mut cfg);
            cfg.grid = grid;
            cfg
        }
        Commands::Direct {
            fixture,
            n_max,
            newton_tol,
            bisection_tol,
            max_iterations,
        } => {
            let mut cfg = RunConfig::new(Command::Direct);
            fixture.apply(&mut cfg);
            cfg.n_max = n_max;
            cfg.newton_tol = newton_tol;
            cfg.bisection_tol = bisection_tol;
            cfg.max_iterations = max_iterations;
            cfg
        }
        Commands::Transform {
            kind,
            fixture,
            input,
            cutoff,
            c,
            upper,
            points,
        } => {
            let mut cfg = RunConfig::new(Command::Transform);
            cfg.kind = Some(kind);
            cfg.fixture = fixture;
            cfg.input = input;
            cfg.cutoff = cutoff;
            cfg.c = c;
            cfg.upper = upper;
            cfg.points = points;
            cfg
        }
        Commands::Models {
            action: ModelsAction::List,
        } => RunConfig::new(Command::ModelsList),
    };
    cfg.out = cli.out;
    cfg.format = cli.format;
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = run_config(cli)?;
    match cfg.command {
        Command::Inverse => commands::inverse(&cfg),
        Command::Direct => commands::direct(&cfg),
        Command::Transform => commands::transform(&cfg),
        Command::ModelsList => commands::models_list(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vps: {e}");
            e.exit_code()
        }
    }
}
