use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinbath::{Boundary, Model, Provenance, ScheduleKind};

mod config;
mod output;
mod run;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "spinbath", version, about = "Decoherence factor of a qubit coupled to a spin chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// κ(t) for a constant coupling, one CSV per backend
    Static(Flags),
    /// κ(t) for a switched coupling J(t)
    Timedep(Flags),
    /// Cross-check two or more backends and write a report
    Validate(Flags),
    /// Data behind the κ(t) and J(t) figures
    Figures(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Ising,
    Xx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundaryArg {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScheduleArg {
    Constant,
    SwitchOff,
    SwitchOffOn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    ExactEd,
    FreeFermion,
    ClosedForm,
    IntegralLimit,
    TimeDependent,
}

#[derive(Args, Debug, Clone)]
struct Flags {
    #[arg(long, value_enum, default_value = "ising")]
    model: ModelArg,
    /// Number of bath spins
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Qubit-bath coupling J
    #[arg(long, default_value_t = 0.5)]
    j: f64,
    /// Intra-chain coupling V
    #[arg(long, default_value_t = 1.0)]
    v: f64,
    #[arg(long, value_enum, default_value = "open")]
    boundary: BoundaryArg,
    #[arg(long, value_enum)]
    schedule: Option<ScheduleArg>,
    /// Coupling before the switch-off; defaults to --j
    #[arg(long)]
    j0: Option<f64>,
    /// Logistic rate k of the switch
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    #[arg(long, default_value_t = 0.0)]
    t_off: f64,
    #[arg(long)]
    t_on: Option<f64>,
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, default_value_t = 201)]
    samples: usize,
    /// Repeat to request several backends
    #[arg(long = "backend", value_enum)]
    backends: Vec<BackendArg>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override every agreement tolerance in `validate`
    #[arg(long)]
    tolerance: Option<f64>,
    /// Reserved; every computation is deterministic
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ising => Model::Model1Ising,
            ModelArg::Xx => Model::Model2XX,
        }
    }
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Open => Boundary::OpenChain,
            BoundaryArg::Periodic => Boundary::PeriodicModeGrid,
        }
    }
}

impl From<ScheduleArg> for ScheduleKind {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Constant => ScheduleKind::Constant,
            ScheduleArg::SwitchOff => ScheduleKind::SwitchOff,
            ScheduleArg::SwitchOffOn => ScheduleKind::SwitchOffOn,
        }
    }
}

impl From<BackendArg> for Provenance {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::ExactEd => Provenance::ExactED,
            BackendArg::FreeFermion => Provenance::FreeFermionFiniteN,
            BackendArg::ClosedForm => Provenance::ClosedForm,
            BackendArg::IntegralLimit => Provenance::IntegralLimit,
            BackendArg::TimeDependent => Provenance::TimeDependent,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Static(f) => RunConfig::static_run(&f).and_then(|c| run::run_static(&c)),
        Command::Timedep(f) => RunConfig::timedep_run(&f).and_then(|c| run::run_static(&c)),
        Command::Validate(f) => RunConfig::validate_run(&f).and_then(|c| run::run_validate(&c)),
        Command::Figures(f) => RunConfig::figures_run(&f).and_then(|c| run::run_figures(&c)),
    };
    match result {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("spinbath: {e}");
            e.exit_code()
        }
    }
}
