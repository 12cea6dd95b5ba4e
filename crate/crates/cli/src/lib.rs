//! `driventop` command-line front end.

pub mod config;
pub mod experiments;
pub mod output;

use clap::{Args, Parser, Subcommand};

use config::Common;
use experiments::{classical, quantum, spectro, stateprep};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) | CliError::Output(_) => 2,
        }
    }
}

impl From<driventop_core::Error> for CliError {
    fn from(e: driventop_core::Error) -> Self {
        use driventop_core::Error as E;
        match e {
            E::InvalidSpin(_)
            | E::InvalidParameter(_)
            | E::UnknownDonor(_)
            | E::NoQuadrupoleMoment
            | E::AddressabilityViolated { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "driventop", version, about = "Driven-top simulations: classical maps, Floquet dynamics, NMR spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct With<F: Args> {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub flags: F,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stroboscopic maps of classical trajectories.
    ClassicalMap(With<classical::MapFlags>),
    /// Percentage of phase space classified chaotic.
    ChaosFraction(With<classical::FractionFlags>),
    /// Purity of evolved coherent states under parameter noise.
    PurityMap(With<quantum::PurityFlags>),
    /// Tunneling frequency between regular islands.
    Tunneling(With<quantum::TunnelingFlags>),
    /// Return overlap |<psi(0)|psi(t)>| per drive period.
    OverlapTrace(With<quantum::TraceFlags>),
    /// NMR (and ESR) line positions and intensities.
    Spectrum(With<spectro::SpectrumFlags>),
    /// Spectra along a rotation of the static field.
    OrientationScan(With<spectro::OrientationFlags>),
    /// Compile and simulate a state-preparation pulse sequence.
    Stateprep(With<stateprep::StateprepFlags>),
    /// Husimi Q grids of an evolving coherent state, one file per frame.
    HusimiFrames(With<quantum::HusimiFlags>),
    /// Run the experiment named in a config file.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
}

pub const EXPERIMENTS: [&str; 9] = [
    "classical-map",
    "chaos-fraction",
    "purity-map",
    "tunneling",
    "overlap-trace",
    "spectrum",
    "orientation-scan",
    "stateprep",
    "husimi-frames",
];

/// Run `body` on a pool of exactly `workers` threads.
pub fn with_pool<T>(workers: usize, body: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    Ok(pool.install(body))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::ClassicalMap(a) => classical::run_map(&a.common, &a.flags),
        Command::ChaosFraction(a) => classical::run_fraction(&a.common, &a.flags),
        Command::PurityMap(a) => quantum::run_purity(&a.common, &a.flags),
        Command::Tunneling(a) => quantum::run_tunneling(&a.common, &a.flags),
        Command::OverlapTrace(a) => quantum::run_trace(&a.common, &a.flags),
        Command::Spectrum(a) => spectro::run_spectrum(&a.common, &a.flags),
        Command::OrientationScan(a) => spectro::run_orientation(&a.common, &a.flags),
        Command::Stateprep(a) => stateprep::run(&a.common, &a.flags),
        Command::HusimiFrames(a) => quantum::run_husimi(&a.common, &a.flags),
        Command::Run(a) => run_from_file(&a.common),
    }
}

fn run_from_file(common: &Common) -> Result<(), CliError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("run needs --config".into()))?;
    let file = config::read_file(path)?;
    let name = file
        .experiment
        .ok_or_else(|| CliError::Config(format!("{}: missing \"experiment\"", path.display())))?;
    match name.as_str() {
        "classical-map" => classical::run_map(common, &Default::default()),
        "chaos-fraction" => classical::run_fraction(common, &Default::default()),
        "purity-map" => quantum::run_purity(common, &Default::default()),
        "tunneling" => quantum::run_tunneling(common, &Default::default()),
        "overlap-trace" => quantum::run_trace(common, &Default::default()),
        "spectrum" => spectro::run_spectrum(common, &Default::default()),
        "orientation-scan" => spectro::run_orientation(common, &Default::default()),
        "stateprep" => stateprep::run(common, &Default::default()),
        "husimi-frames" => quantum::run_husimi(common, &Default::default()),
        other => Err(CliError::Config(format!(
            "unknown experiment '{other}' (expected one of {EXPERIMENTS:?})"
        ))),
    }
}
