use std::fmt::Write as _;

use spinbath::ed::{self, BathState};
use spinbath::{
    analytic, freefermion, timedep, ChainSpec, CouplingSchedule, DecoherenceSeries, Error, Model,
    Provenance, TimeGrid, KAPPA_EPS,
};

use crate::config::{CliError, RunConfig, Status};
use crate::output::{self, Check};

/// Rates drawn in the coupling figure.
pub const FIGURE_RATES: [f64; 4] = [0.1, 0.5, 1.0, 10.0];

/// Propagated κ for a constant coupling, started at `t = 0` so that it lines
/// up with the static backends.
fn static_timedep(spec: &ChainSpec, grid: &TimeGrid) -> spinbath::Result<DecoherenceSeries> {
    if grid.t_start < 0.0 {
        return Err(Error::Precondition(
            "the time-dependent backend starts at t = 0 for a constant coupling".into(),
        ));
    }
    let mut times = grid.times();
    let shifted = grid.t_start > 0.0;
    if shifted {
        times.insert(0, 0.0);
    }
    let schedule = CouplingSchedule::constant(spec.j_coupling)?;
    let mut values = timedep::kappa_at_times(spec, &schedule, &times, |_| true)?;
    if shifted {
        values.remove(0);
    }
    DecoherenceSeries::new(*grid, values, Provenance::TimeDependent, *spec, None)
}

fn compute(cfg: &RunConfig, p: Provenance) -> Result<DecoherenceSeries, CliError> {
    let (spec, grid) = (&cfg.spec, &cfg.grid);
    let r = match (&cfg.schedule, p) {
        (None, Provenance::ExactED) => ed::kappa_ed_static(spec, &BathState::FullyMixed, grid),
        (None, Provenance::FreeFermionFiniteN) => freefermion::free_fermion_series(spec, grid),
        (None, Provenance::ClosedForm) => analytic::closed_form_series(spec, grid),
        (None, Provenance::IntegralLimit) => analytic::integral_limit_series(spec, grid),
        (None, Provenance::TimeDependent) => static_timedep(spec, grid),
        (Some(s), Provenance::TimeDependent) => timedep::kappa_timedep(spec, s, grid),
        (Some(s), Provenance::ExactED) => ed::kappa_ed_timedep(spec, s, &BathState::FullyMixed, grid),
        (Some(_), other) => {
            return Err(CliError::Config(format!(
                "backend {other} has no switched-coupling form; use exact-ed or time-dependent"
            )))
        }
    };
    r.map_err(|e| CliError::from_backend(e, p, spec))
}

fn compute_all(cfg: &RunConfig) -> Result<Vec<DecoherenceSeries>, CliError> {
    cfg.backends.iter().map(|&p| compute(cfg, p)).collect()
}

pub fn run_static(cfg: &RunConfig) -> Result<Status, CliError> {
    let all = compute_all(cfg)?;
    for s in &all {
        let name = output::series_file_name(s.provenance);
        output::write(&cfg.out, &name, &output::series_csv(cfg, s))?;
        println!("{}", cfg.out.join(name).display());
    }
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    /// Exact for the finite chain.
    Exact,
    /// The factorised mode product, however evaluated.
    Product,
    /// The product with each mode factor exponentiated to second order in `J`.
    Expanded,
    /// `N → ∞`.
    Limit,
}

fn class(model: Model, p: Provenance) -> Class {
    match (model, p) {
        (_, Provenance::ExactED) | (Model::Model1Ising, Provenance::ClosedForm) => Class::Exact,
        (_, Provenance::IntegralLimit) => Class::Limit,
        (Model::Model2XX, Provenance::ClosedForm) => Class::Expanded,
        _ => Class::Product,
    }
}

/// Default agreement tolerance between two backends.
fn agreement_tolerance(cfg: &RunConfig, a: Provenance, b: Provenance) -> f64 {
    let (ca, cb) = (class(cfg.spec.model, a), class(cfg.spec.model, b));
    let elapsed = match &cfg.schedule {
        Some(_) => cfg.grid.t_end - cfg.grid.t_start,
        None => cfg.grid.t_start.abs().max(cfg.grid.t_end.abs()),
    };
    match (ca, cb) {
        (Class::Limit, _) | (_, Class::Limit) => 1e-3,
        (Class::Exact, Class::Exact) | (Class::Expanded, Class::Expanded) => 1e-10,
        (Class::Product, Class::Product) => 1e-8,
        _ => (5.0 * (cfg.spec.j_coupling * elapsed).powi(4)).max(1e-10),
    }
}

fn disc_excess(s: &DecoherenceSeries) -> f64 {
    s.values.iter().map(|k| k.norm() - 1.0).fold(0.0, f64::max)
}

pub fn validation_checks(cfg: &RunConfig, all: &[DecoherenceSeries]) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for s in all {
        checks.push(Check {
            name: format!("unit-disc:{}", s.provenance),
            deviation: disc_excess(s),
            tolerance: KAPPA_EPS,
        });
    }
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            checks.push(Check {
                name: format!("agree:{}:{}", a.provenance, b.provenance),
                deviation: a.max_abs_diff(b)?,
                tolerance: cfg
                    .tolerance
                    .unwrap_or_else(|| agreement_tolerance(cfg, a.provenance, b.provenance)),
            });
        }
    }
    Ok(checks)
}

pub fn run_validate(cfg: &RunConfig) -> Result<Status, CliError> {
    let all = compute_all(cfg)?;
    let checks = validation_checks(cfg, &all)?;
    let report = output::report(&checks);
    output::write(&cfg.out, "validate_report.txt", &report)?;
    print!("{report}");
    if checks.iter().all(Check::passed) {
        Ok(Status::Ok)
    } else {
        Ok(Status::ValidationFailed)
    }
}

fn coupling_csv() -> Result<String, CliError> {
    let grid = TimeGrid::new(-10.0, 10.0, 401)?;
    let schedules = FIGURE_RATES
        .iter()
        .map(|&k| CouplingSchedule::switch_off(1.0, k, 0.0))
        .collect::<spinbath::Result<Vec<_>>>()?;
    let mut s = String::new();
    let _ = writeln!(s, "#figure=coupling");
    let _ = writeln!(s, "#schedule=switch-off");
    let _ = writeln!(s, "#t_off=0");
    let _ = writeln!(s, "#version={}", env!("CARGO_PKG_VERSION"));
    s.push('t');
    for k in FIGURE_RATES {
        let _ = write!(s, ",j_over_j0_k={k}");
    }
    s.push('\n');
    for t in grid.times() {
        s.push_str(&output::float(t));
        for sch in &schedules {
            let _ = write!(s, ",{}", output::float(sch.eval(t)));
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn run_figures(cfg: &RunConfig) -> Result<Status, CliError> {
    let mut files = Vec::new();
    for (name, model) in [("fig2.csv", Model::Model1Ising), ("fig3.csv", Model::Model2XX)] {
        let spec = ChainSpec { model, ..cfg.spec };
        let cfg = RunConfig { spec, ..cfg.clone() };
        let series = analytic::integral_limit_series(&spec, &cfg.grid)
            .map_err(|e| CliError::from_backend(e, Provenance::IntegralLimit, &spec))?;
        files.push((name, output::series_csv(&cfg, &series)));
    }
    files.push(("fig4.csv", coupling_csv()?));
    for (name, body) in files {
        output::write(&cfg.out, name, &body)?;
        println!("{}", cfg.out.join(name).display());
    }
    Ok(Status::Ok)
}
