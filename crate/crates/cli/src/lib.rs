//! Command-line driver: loads a JSON run configuration, runs the requested
//! checks and writes a JSON report plus CSV profiles.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::run;
pub use config::{load_config, Command, RunConfig};
pub use error::CliError;
pub use report::Report;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_CHECK_FAILED: u8 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "HODGEMETRIC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hodgemetric", version, about = "Numerical checks of Hodge-metric curvature on horizontal slices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Holomorphic sectional, bisectional, Ricci and Riemannian sectional bounds at each point.
    VerifyBounds(CommonArgs),
    /// Hodge-metric curvature tensor with split and finite-difference cross-checks.
    Curvature(CommonArgs),
    /// Siegel-space projection of the Hodge filtration.
    ProjectSiegel(CommonArgs),
    /// Compares the Siegel pullback metric with the Hodge metric.
    ConstantMultiple(CommonArgs),
    /// Hodge-Riemann bilinear relations and violation fixtures.
    HodgeRiemann(CommonArgs),
    /// Density profile along a ray into the puncture.
    DegenerationProbe(CommonArgs),
    /// Curvature formula applied to the Poincaré disk metric.
    CalibratePoincare(CommonArgs),
    /// Every command listed in the config.
    Run(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the primary tolerance of the selected command.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "fd-step")]
    pub fd_step: Option<f64>,
}

impl Sub {
    fn split(&self) -> (Option<Command>, &CommonArgs) {
        match self {
            Sub::VerifyBounds(a) => (Some(Command::VerifyBounds), a),
            Sub::Curvature(a) => (Some(Command::Curvature), a),
            Sub::ProjectSiegel(a) => (Some(Command::ProjectSiegel), a),
            Sub::ConstantMultiple(a) => (Some(Command::ConstantMultiple), a),
            Sub::HodgeRiemann(a) => (Some(Command::HodgeRiemann), a),
            Sub::DegenerationProbe(a) => (Some(Command::DegenerationProbe), a),
            Sub::CalibratePoincare(a) => (Some(Command::CalibratePoincare), a),
            Sub::Run(a) => (None, a),
        }
    }
}

/// Loads the config named on the command line and applies the flag overrides.
pub fn resolve_config(sub: &Sub) -> Result<RunConfig, CliError> {
    let (cmd, args) = sub.split();
    let mut cfg = load_config(&args.config)?;
    if let Some(c) = cmd {
        cfg.commands = vec![c];
    }
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    if let Some(step) = args.fd_step {
        cfg.fd_step = step;
    }
    if let Some(tol) = args.tol {
        let c = cmd.ok_or_else(|| CliError::Usage("--tol needs a single command, not `run`".into()))?;
        *cfg.tolerances.primary_mut(c) = tol;
    }
    if let Some(out) = &args.out {
        cfg.output.dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Sizes the global thread pool from the environment.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
        log::warn!("thread pool already initialized, {THREADS_ENV} ignored");
    }
    Ok(())
}

/// Runs one invocation and returns the process exit code.
pub fn execute(cli: &Cli) -> u8 {
    let result = resolve_config(&cli.command).and_then(|cfg| {
        let (report, tables) = run(&cfg)?;
        let path = report::write_outputs(&cfg.output.dir, &cfg.output.report, &report, &tables)?;
        for c in &report.commands {
            match &c.error {
                Some(e) => println!("{:<20} FAIL  {e}", c.command.name()),
                None => println!("{:<20} {}", c.command.name(), if c.pass { "pass" } else { "FAIL" }),
            }
        }
        println!("report written to {}", path.display());
        Ok(report.pass)
    });
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("hodgemetric: {e}");
            EXIT_CONFIG
        }
    }
}
