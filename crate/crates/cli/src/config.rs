use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use spinbath::{ChainSpec, CouplingSchedule, Provenance, ScheduleKind, TimeGrid};

use crate::Flags;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Static,
    TimeDep,
    Validate,
    Figures,
}

/// Everything a run needs, checked once up front.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub spec: ChainSpec,
    /// Present for switched couplings; `None` means the static `J` applies.
    pub schedule: Option<CouplingSchedule>,
    pub grid: TimeGrid,
    /// Sorted and deduplicated.
    pub backends: Vec<Provenance>,
    pub out: PathBuf,
    pub tolerance: Option<f64>,
    #[allow(dead_code)]
    pub seed: u64,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Io(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
        }
    }

    /// Wraps a library error, naming the backend and parameters that produced it.
    pub fn from_backend(e: spinbath::Error, backend: Provenance, spec: &ChainSpec) -> Self {
        let msg = format!(
            "{backend} (model={}, n={}, j={}, v={}): {e}",
            spec.model, spec.n_bath, spec.j_coupling, spec.v_coupling
        );
        if e.is_numerical() {
            CliError::Numerical(msg)
        } else {
            CliError::Config(msg)
        }
    }
}

impl From<spinbath::Error> for CliError {
    fn from(e: spinbath::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Outcome of a run that did not error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    ValidationFailed,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        match s {
            Status::Ok => ExitCode::SUCCESS,
            Status::ValidationFailed => ExitCode::from(1),
        }
    }
}

fn schedule(f: &Flags) -> Result<Option<CouplingSchedule>, CliError> {
    let j0 = f.j0.unwrap_or(f.j);
    let Some(kind) = f.schedule.map(ScheduleKind::from) else {
        return Ok(None);
    };
    let s = match kind {
        ScheduleKind::Constant => CouplingSchedule::constant(j0)?,
        ScheduleKind::SwitchOff => CouplingSchedule::switch_off(j0, f.rate, f.t_off)?,
        ScheduleKind::SwitchOffOn => {
            let t_on = f
                .t_on
                .ok_or_else(|| CliError::Config("--schedule switch-off-on needs --t-on".into()))?;
            CouplingSchedule::switch_off_on(j0, f.rate, f.t_off, t_on)?
        }
    };
    Ok(Some(s))
}

fn backends(f: &Flags, default: &[Provenance]) -> Vec<Provenance> {
    let mut b: Vec<Provenance> = if f.backends.is_empty() {
        default.to_vec()
    } else {
        f.backends.iter().map(|&b| b.into()).collect()
    };
    b.sort();
    b.dedup();
    b
}

impl RunConfig {
    fn base(f: &Flags, mode: Mode, schedule: Option<CouplingSchedule>, grid: TimeGrid, backends: Vec<Provenance>) -> Result<Self, CliError> {
        let mut spec = ChainSpec::new(f.model.into(), f.n, f.j, f.v)?.with_boundary(f.boundary.into());
        if let Some(s) = &schedule {
            spec = spec.with_coupling(s.j0);
        }
        if let Some(t) = f.tolerance {
            if !(t >= 0.0) {
                return Err(CliError::Config(format!("tolerance {t} must be non-negative")));
            }
        }
        Ok(RunConfig {
            mode,
            spec,
            schedule,
            grid,
            backends,
            out: f.out.clone(),
            tolerance: f.tolerance,
            seed: f.seed,
        })
    }

    fn static_grid(f: &Flags) -> Result<TimeGrid, CliError> {
        Ok(TimeGrid::new(f.t_start.unwrap_or(0.0), f.t_end.unwrap_or(10.0), f.samples)?)
    }

    /// Switched runs start once the coupling is fully on and end once it has settled.
    fn timedep_grid(f: &Flags, s: &CouplingSchedule) -> Result<TimeGrid, CliError> {
        let start = f.t_start.unwrap_or_else(|| spinbath::timedep::default_start(s));
        let last_switch = if s.t_on.is_finite() { s.t_on } else { s.t_off };
        let end = f
            .t_end
            .unwrap_or(last_switch + spinbath::timedep::START_MARGIN / s.rate);
        Ok(TimeGrid::new(start, end, f.samples)?)
    }

    pub fn static_run(f: &Flags) -> Result<Self, CliError> {
        if f.schedule.is_some_and(|s| ScheduleKind::from(s) != ScheduleKind::Constant) {
            return Err(CliError::Config("static runs take a constant coupling; use `timedep`".into()));
        }
        let grid = Self::static_grid(f)?;
        let b = backends(f, &[Provenance::ClosedForm]);
        Self::base(f, Mode::Static, None, grid, b)
    }

    pub fn timedep_run(f: &Flags) -> Result<Self, CliError> {
        let s = schedule(f)?
            .ok_or_else(|| CliError::Config("timedep needs --schedule".into()))?;
        let grid = Self::timedep_grid(f, &s)?;
        let b = backends(f, &[Provenance::TimeDependent]);
        Self::base(f, Mode::TimeDep, Some(s), grid, b)
    }

    pub fn validate_run(f: &Flags) -> Result<Self, CliError> {
        let s = schedule(f)?.filter(|s| s.kind != ScheduleKind::Constant);
        let grid = match &s {
            Some(s) => Self::timedep_grid(f, s)?,
            None => Self::static_grid(f)?,
        };
        let b = backends(f, &[]);
        if b.len() < 2 {
            return Err(CliError::Config("validate needs at least two distinct --backend".into()));
        }
        Self::base(f, Mode::Validate, s, grid, b)
    }

    pub fn figures_run(f: &Flags) -> Result<Self, CliError> {
        let grid = Self::static_grid(f)?;
        Self::base(f, Mode::Figures, None, grid, vec![Provenance::IntegralLimit])
    }
}
