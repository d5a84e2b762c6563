//! Shared domain types: the chain, the coupling schedule, time grids, the
//! decoherence series every backend returns, and the reduced density matrix
//! of the central qubit.
//!
//! Units: ħ = 1 and the bath coupling V sets the energy scale. Times are in
//! units of 1/V when V = 1.

use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};

/// Slack allowed on |κ| ≤ 1 before a sample is treated as a numerical failure.
pub const KAPPA_EPS: f64 = 1e-9;

/// Which bath Hamiltonian couples the chain spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// `V Σ σᶻᵢ σᶻᵢ₊₁`: Ising bonds, no spin waves.
    Model1Ising,
    /// `V Σ (σ⁺ᵢ σ⁻ᵢ₊₁ + h.c.)`: transverse hopping, spin waves propagate.
    Model2XX,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Model1Ising => "ising",
            Model::Model2XX => "xx",
        })
    }
}

/// Boundary convention of the bath chain in the exact-diagonalization oracle.
///
/// The free-fermion mode grid `kₙ = 2πn/N` is periodic regardless; this only
/// decides whether the ED Hamiltonian carries the closing bond `(N-1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Boundary {
    #[default]
    OpenChain,
    PeriodicModeGrid,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::OpenChain => "open",
            Boundary::PeriodicModeGrid => "periodic",
        })
    }
}

/// A central qubit coupled through `J τʸ σʸ₀` to a chain of `n_bath` spins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub model: Model,
    pub n_bath: usize,
    pub j_coupling: f64,
    pub v_coupling: f64,
    pub boundary: Boundary,
}

impl ChainSpec {
    /// Validated constructor with an open chain.
    pub fn new(model: Model, n_bath: usize, j_coupling: f64, v_coupling: f64) -> Result<Self> {
        let spec = ChainSpec {
            model,
            n_bath,
            j_coupling,
            v_coupling,
            boundary: Boundary::OpenChain,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_coupling(mut self, j_coupling: f64) -> Self {
        self.j_coupling = j_coupling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bath < 2 {
            return Err(Error::invalid(format!(
                "n_bath must be at least 2, got {}",
                self.n_bath
            )));
        }
        if !(self.j_coupling.is_finite() && self.j_coupling >= 0.0) {
            return Err(Error::invalid(format!(
                "J must be finite and >= 0, got {}",
                self.j_coupling
            )));
        }
        if !(self.v_coupling.is_finite() && self.v_coupling > 0.0) {
            return Err(Error::invalid(format!(
                "V must be finite and > 0, got {}",
                self.v_coupling
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScheduleKind {
    Constant,
    SwitchOff,
    SwitchOffOn,
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleKind::Constant => "constant",
            ScheduleKind::SwitchOff => "switch-off",
            ScheduleKind::SwitchOffOn => "switch-off-on",
        })
    }
}

/// Time-dependent system-bath coupling `J(t)`.
///
/// The switch-off ramp is the logistic `J₀ / (e^{k(t - t_off)} + 1)`; the
/// off-then-on schedule adds a mirrored logistic centred on `t_on`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSchedule {
    pub kind: ScheduleKind,
    pub j0: f64,
    pub rate: f64,
    pub t_off: f64,
    pub t_on: f64,
}

impl CouplingSchedule {
    pub fn constant(j0: f64) -> Result<Self> {
        let s = CouplingSchedule {
            kind: ScheduleKind::Constant,
            j0,
            rate: 1.0,
            t_off: 0.0,
            t_on: 0.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn switch_off(j0: f64, rate: f64, t_off: f64) -> Result<Self> {
        let s = CouplingSchedule {
            kind: ScheduleKind::SwitchOff,
            j0,
            rate,
            t_off,
            t_on: f64::INFINITY,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn switch_off_on(j0: f64, rate: f64, t_off: f64, t_on: f64) -> Result<Self> {
        let s = CouplingSchedule {
            kind: ScheduleKind::SwitchOffOn,
            j0,
            rate,
            t_off,
            t_on,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j0.is_finite() && self.j0 >= 0.0) {
            return Err(Error::invalid(format!("j0 must be finite and >= 0, got {}", self.j0)));
        }
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return Err(Error::invalid(format!("rate must be finite and > 0, got {}", self.rate)));
        }
        if self.kind != ScheduleKind::Constant && !self.t_off.is_finite() {
            return Err(Error::invalid("t_off must be finite"));
        }
        if self.kind == ScheduleKind::SwitchOffOn {
            if !(self.t_on.is_finite() && self.t_on > self.t_off) {
                return Err(Error::invalid(format!(
                    "switch-off-on needs t_on > t_off, got t_off = {}, t_on = {}",
                    self.t_off, self.t_on
                )));
            }
            if (self.t_on - self.t_off) * self.rate < 10.0 {
                return Err(Error::invalid(format!(
                    "(t_on - t_off) * rate = {} < 10: the coupling never reaches zero between ramps",
                    (self.t_on - self.t_off) * self.rate
                )));
            }
        }
        Ok(())
    }

    /// `J(t)`; see [`eval_coupling`].
    pub fn eval(&self, t: f64) -> f64 {
        eval_coupling(self, t)
    }

    /// Time at which the coupling is within `e^{-margin}` of `J₀` on the way in,
    /// i.e. `t_off - margin / rate`. Constant schedules have no such time.
    pub fn fully_on_before(&self, margin: f64) -> Option<f64> {
        match self.kind {
            ScheduleKind::Constant => None,
            _ => Some(self.t_off - margin / self.rate),
        }
    }
}

/// Logistic step `1 / (e^{x} + 1)`, falling from 1 to 0.
fn fall(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (x.exp() + 1.0)
    }
}

/// Coupling strength `J(t)` for a schedule.
///
/// The off-on form is `J₀[f(t - t_off) + 1 - f(t - t_on)]`, which stays
/// strictly below `J₀` whenever `t_on > t_off`.
pub fn eval_coupling(schedule: &CouplingSchedule, t: f64) -> f64 {
    let k = schedule.rate;
    match schedule.kind {
        ScheduleKind::Constant => schedule.j0,
        ScheduleKind::SwitchOff => schedule.j0 * fall(k * (t - schedule.t_off)),
        ScheduleKind::SwitchOffOn => {
            schedule.j0 * (fall(k * (t - schedule.t_off)) + fall(-k * (t - schedule.t_on)))
        }
    }
}

/// Uniform sampling of `[t_start, t_end]`, both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_samples: usize) -> Result<Self> {
        let g = TimeGrid {
            t_start,
            t_end,
            n_samples,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_end > self.t_start) {
            return Err(Error::invalid(format!(
                "time grid needs finite t_end > t_start, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::invalid(format!(
                "time grid needs at least 2 samples, got {}",
                self.n_samples
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_samples - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.n_samples {
            return self.t_end;
        }
        let frac = i as f64 / (self.n_samples - 1) as f64;
        self.t_start + (self.t_end - self.t_start) * frac
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|i| self.time(i)).collect()
    }
}

/// Which computation produced a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    ExactED,
    FreeFermionFiniteN,
    ClosedForm,
    IntegralLimit,
    TimeDependent,
}

impl Provenance {
    pub const ALL: [Provenance; 5] = [
        Provenance::ExactED,
        Provenance::FreeFermionFiniteN,
        Provenance::ClosedForm,
        Provenance::IntegralLimit,
        Provenance::TimeDependent,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Provenance::ExactED => "exact-ed",
            Provenance::FreeFermionFiniteN => "free-fermion",
            Provenance::ClosedForm => "closed-form",
            Provenance::IntegralLimit => "integral-limit",
            Provenance::TimeDependent => "time-dependent",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// κ(t) sampled on a grid, tagged with what produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceSeries {
    pub grid: TimeGrid,
    pub values: Vec<Complex64>,
    pub provenance: Provenance,
    pub spec_echo: ChainSpec,
    pub schedule_echo: Option<CouplingSchedule>,
}

impl DecoherenceSeries {
    /// Checks the length and `|κ| ≤ 1 + KAPPA_EPS` at every sample.
    pub fn new(
        grid: TimeGrid,
        values: Vec<Complex64>,
        provenance: Provenance,
        spec_echo: ChainSpec,
        schedule_echo: Option<CouplingSchedule>,
    ) -> Result<Self> {
        if values.len() != grid.n_samples {
            return Err(Error::invalid(format!(
                "{} values for a grid of {} samples",
                values.len(),
                grid.n_samples
            )));
        }
        for (i, v) in values.iter().enumerate() {
            let m = v.norm();
            if !(m <= 1.0 + KAPPA_EPS) {
                return Err(Error::KappaOutOfRange {
                    backend: provenance.name(),
                    t: grid.time(i),
                    modulus: m,
                });
            }
        }
        Ok(DecoherenceSeries {
            grid,
            values,
            provenance,
            spec_echo,
            schedule_echo,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.grid.time(i), *v))
    }

    /// Largest pointwise `|κ_a - κ_b|` against another series on the same grid.
    pub fn max_abs_diff(&self, other: &DecoherenceSeries) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::invalid("series live on different grids"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Reduced density matrix of the central qubit in the `τʸ` eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub rho11: f64,
    pub rho22: f64,
    pub rho12: Complex64,
}

impl QubitState {
    const TOL: f64 = 1e-12;

    pub fn new(rho11: f64, rho22: f64, rho12: Complex64) -> Result<Self> {
        let s = QubitState { rho11, rho22, rho12 };
        s.validate()?;
        Ok(s)
    }

    /// The state `a|+⟩ + b|−⟩`, normalised.
    pub fn pure(a: Complex64, b: Complex64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid("pure state amplitudes must not vanish"));
        }
        QubitState::new(a.norm_sqr() / norm, b.norm_sqr() / norm, a.conj() * b / norm)
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| (-Self::TOL..=1.0 + Self::TOL).contains(&x);
        if !(in_unit(self.rho11) && in_unit(self.rho22)) {
            return Err(Error::invalid("diagonal entries must lie in [0, 1]"));
        }
        if (self.rho11 + self.rho22 - 1.0).abs() > Self::TOL {
            return Err(Error::invalid(format!(
                "trace is {}, not 1",
                self.rho11 + self.rho22
            )));
        }
        if self.rho12.norm_sqr() > self.rho11 * self.rho22 + Self::TOL {
            return Err(Error::invalid("|rho12|^2 exceeds rho11 * rho22"));
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22
    }
}

/// Multiplies the coherence `ρ₁₂` by κ, leaving the populations untouched.
///
/// Moduli in `(1, 1 + KAPPA_EPS]` are clipped onto the unit circle; anything
/// larger is rejected as an upstream numerical failure.
pub fn apply_kappa(rho0: &QubitState, kappa: Complex64) -> Result<QubitState> {
    let m = kappa.norm();
    if !(m <= 1.0 + KAPPA_EPS) {
        return Err(Error::KappaOutOfRange {
            backend: "apply_kappa",
            t: f64::NAN,
            modulus: m,
        });
    }
    let kappa = if m > 1.0 { kappa / m } else { kappa };
    Ok(QubitState {
        rho11: rho0.rho11,
        rho22: rho0.rho22,
        rho12: rho0.rho12 * kappa,
    })
}
