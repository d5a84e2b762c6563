//! Mode-by-mode propagation under a time-dependent coupling `J(t)`.
//!
//! Each mode evolves under `H±(t) = [[2E, ∓ig(t)], [±ig(t), 0]]` with
//! `g(t) = J(t)/√N`, i.e. `E·I + E σᶻ ± g(t) σʸ`. The mode factor is
//! `½ tr(u⁻† u⁺)` and κ is the product over modes.

use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::freefermion::{mode_cos, mode_spectrum, ModeBlock};
use crate::integrator::{self, Cf4System, StepControl, ALPHA1, ALPHA2, C1, C2};
use crate::model::{
    eval_coupling, ChainSpec, CouplingSchedule, DecoherenceSeries, Provenance, ScheduleKind,
    TimeGrid,
};

/// How far before `t_off` the coupling must still be fully on, in units of `1/rate`.
pub const START_MARGIN: f64 = 20.0;

const UNITARITY_TOL: f64 = 1e-9;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub type Mat2 = [[Complex64; 2]; 2];

const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// `exp(−iτ(aI + bσᶻ + cσʸ))` for real `a, b, c`.
fn expm_su2(tau: f64, a: f64, b: f64, c: f64) -> Mat2 {
    let r = b.hypot(c);
    let (cos, s) = if r * tau.abs() < 1e-8 {
        let x2 = (r * tau).powi(2);
        (1.0 - 0.5 * x2, tau * (1.0 - x2 / 6.0))
    } else {
        ((tau * r).cos(), (tau * r).sin() / r)
    };
    let phase = Complex64::from_polar(1.0, -tau * a);
    [
        [phase * Complex64::new(cos, -s * b), phase * (-s * c)],
        [phase * (s * c), phase * Complex64::new(cos, s * b)],
    ]
}

/// Both sector propagators of one mode at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePropagatorState {
    pub u_plus: Mat2,
    pub u_minus: Mat2,
    pub t: f64,
}

impl ModePropagatorState {
    /// `½ tr(u⁻† u⁺)`.
    pub fn kappa(&self) -> Complex64 {
        mode_kappa(&self.u_plus, &self.u_minus)
    }

    pub fn unitarity_defect(&self) -> f64 {
        defect(&self.u_plus).max(defect(&self.u_minus))
    }
}

fn mode_kappa(up: &Mat2, um: &Mat2) -> Complex64 {
    let mut acc = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            acc += um[i][j].conj() * up[i][j];
        }
    }
    0.5 * acc
}

fn defect(u: &Mat2) -> f64 {
    let p = mul(&adjoint(u), u);
    let mut d: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { ONE } else { ZERO };
            d = d.max((p[i][j] - want).norm());
        }
    }
    d
}

struct ModeSystem {
    energy: f64,
    /// `g(t) = g_scale · J(t)`.
    g_scale: f64,
    schedule: CouplingSchedule,
}

impl Cf4System for ModeSystem {
    type State = (Mat2, Mat2);

    fn identity(&self) -> Self::State {
        (IDENTITY, IDENTITY)
    }

    fn step(&self, u: &Self::State, t: f64, h: f64) -> Self::State {
        let g1 = self.g_scale * eval_coupling(&self.schedule, t + C1 * h);
        let g2 = self.g_scale * eval_coupling(&self.schedule, t + C2 * h);
        let first = ALPHA2 * g1 + ALPHA1 * g2;
        let second = ALPHA1 * g1 + ALPHA2 * g2;
        let e = 0.5 * self.energy;
        let adv = |s: f64, u: &Mat2| {
            let a = expm_su2(h, e, e, s * first);
            let b = expm_su2(h, e, e, s * second);
            mul(&b, &mul(&a, u))
        };
        (adv(1.0, &u.0), adv(-1.0, &u.1))
    }

    fn distance(&self, a: &Self::State, b: &Self::State) -> f64 {
        let mut d: f64 = 0.0;
        for (x, y) in [(&a.0, &b.0), (&a.1, &b.1)] {
            for i in 0..2 {
                for j in 0..2 {
                    d = d.max((x[i][j] - y[i][j]).norm());
                }
            }
        }
        d
    }
}

/// Earliest start allowed for a ramped schedule: `t_off − 20/rate`.
pub fn default_start(schedule: &CouplingSchedule) -> f64 {
    schedule.t_off - START_MARGIN / schedule.rate
}

fn check_start(schedule: &CouplingSchedule, t_start: f64) -> Result<()> {
    schedule.validate()?;
    if schedule.kind != ScheduleKind::Constant
        && schedule.rate * (t_start - schedule.t_off) > -START_MARGIN * (1.0 - 1e-12)
    {
        return Err(Error::Precondition(format!(
            "rate·(t_start − t_off) = {} > −{START_MARGIN}: the coupling is not fully on at t_start = {t_start}",
            schedule.rate * (t_start - schedule.t_off)
        )));
    }
    Ok(())
}

fn mode_system(block: &ModeBlock, schedule: &CouplingSchedule) -> ModeSystem {
    let g_scale = if schedule.j0 > 0.0 { block.g / schedule.j0 } else { 0.0 };
    ModeSystem {
        energy: block.energy,
        g_scale,
        schedule: *schedule,
    }
}

fn run_mode(
    block: &ModeBlock,
    schedule: &CouplingSchedule,
    times: &[f64],
    mut visit: impl FnMut(usize, &(Mat2, Mat2)),
) -> Result<()> {
    let sys = mode_system(block, schedule);
    let end = integrator::propagate(&sys, times, StepControl::default(), &mut visit)?;
    let d = defect(&end.0).max(defect(&end.1));
    if d > UNITARITY_TOL {
        return Err(Error::Convergence {
            context: "mode propagation".into(),
            detail: format!("unitarity defect {d:e} at t = {}", times[times.len() - 1]),
        });
    }
    Ok(())
}

/// Propagators of one mode at every grid time. The block's `g` is the
/// coupling at `J = j0`; it is scaled by `J(t)/j0` along the schedule.
pub fn integrate_mode(
    block: &ModeBlock,
    schedule: &CouplingSchedule,
    grid: &TimeGrid,
) -> Result<Vec<ModePropagatorState>> {
    grid.validate()?;
    check_start(schedule, grid.t_start)?;
    let times = grid.times();
    let mut out = Vec::with_capacity(times.len());
    run_mode(block, schedule, &times, |i, u| {
        out.push(ModePropagatorState {
            u_plus: u.0,
            u_minus: u.1,
            t: times[i],
        })
    })?;
    Ok(out)
}

fn mode_factors(block: &ModeBlock, schedule: &CouplingSchedule, times: &[f64]) -> Result<Vec<Complex64>> {
    let mut out = vec![ONE; times.len()];
    if block.g == 0.0 || schedule.j0 == 0.0 {
        return Ok(out);
    }
    run_mode(block, schedule, times, |i, u| out[i] = mode_kappa(&u.0, &u.1))?;
    Ok(out)
}

/// κ at arbitrary increasing `times` (propagation starts at `times[0]`), over
/// the modes accepted by `keep`. Identical modes are integrated once.
pub fn kappa_at_times(
    spec: &ChainSpec,
    schedule: &CouplingSchedule,
    times: &[f64],
    keep: impl Fn(&ModeBlock) -> bool,
) -> Result<Vec<Complex64>> {
    let spec = spec.with_coupling(schedule.j0);
    spec.validate()?;
    let Some(&t_start) = times.first() else {
        return Ok(vec![]);
    };
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("sample times must be strictly increasing"));
    }
    check_start(schedule, t_start)?;

    // Unique (E, g) pairs in order of first appearance, with multiplicities.
    let mut unique: Vec<(ModeBlock, usize)> = Vec::new();
    let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
    for b in mode_spectrum(&spec).into_iter().filter(|b| keep(b)) {
        let key = (b.energy.to_bits(), b.g.to_bits());
        match seen.get(&key) {
            Some(&slot) => unique[slot].1 += 1,
            None => {
                seen.insert(key, unique.len());
                unique.push((b, 1));
            }
        }
    }

    let mut kappa = vec![ONE; times.len()];
    // Bounded memory: a chunk of modes in parallel, folded in order.
    for chunk in unique.chunks(32) {
        let factors: Vec<Result<Vec<Complex64>>> = chunk
            .par_iter()
            .map(|(b, _)| {
                mode_factors(b, schedule, times).map_err(|e| Error::Mode {
                    mode: b.index,
                    source: Box::new(e),
                })
            })
            .collect();
        for ((_, mult), f) in chunk.iter().zip(factors) {
            let f = f?;
            for (k, fi) in kappa.iter_mut().zip(&f) {
                for _ in 0..*mult {
                    *k *= fi;
                }
            }
        }
    }
    Ok(kappa)
}

/// κ(t) on a grid for a switched coupling; the chain's `J` is replaced by `j0`.
pub fn kappa_timedep(
    spec: &ChainSpec,
    schedule: &CouplingSchedule,
    grid: &TimeGrid,
) -> Result<DecoherenceSeries> {
    grid.validate()?;
    let values = kappa_at_times(spec, schedule, &grid.times(), |_| true)?;
    DecoherenceSeries::new(
        *grid,
        values,
        Provenance::TimeDependent,
        spec.with_coupling(schedule.j0),
        Some(*schedule),
    )
}

/// As [`kappa_timedep`] but dropping the modes with `|cos kₙ| < delta`.
pub fn kappa_timedep_band_excluded(
    spec: &ChainSpec,
    schedule: &CouplingSchedule,
    grid: &TimeGrid,
    delta: f64,
) -> Result<Vec<Complex64>> {
    grid.validate()?;
    let n = spec.n_bath;
    kappa_at_times(spec, schedule, &grid.times(), |b| mode_cos(b.index, n).abs() >= delta)
}

/// Extrapolates `κ(N) ≈ κ∞ + a/N` from the two largest sizes.
pub fn richardson_inverse_n(samples: &[(usize, f64)]) -> Option<f64> {
    let mut s = samples.to_vec();
    s.sort_by_key(|&(n, _)| n);
    let [.., (n1, k1), (n2, k2)] = s[..] else {
        return None;
    };
    if n1 == n2 {
        return None;
    }
    let (n1, n2) = (n1 as f64, n2 as f64);
    Some((n2 * k2 - n1 * k1) / (n2 - n1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoherenceReport {
    /// Max |κ| over one period `2π/V` ending `10/rate` before switch-off.
    pub kappa_initial_envelope: f64,
    /// |κ| midway between switch-off and switch-on.
    pub kappa_off_plateau: f64,
    /// Max |κ| over one period starting `10/rate` after switch-on.
    pub kappa_final_envelope: f64,
}

/// Decouple slowly at `t = 0`, recouple at `t = gap`, and compare the
/// coherence envelope before and after.
///
/// Only the two observation windows and the plateau are sampled.
pub fn recoherence_experiment(
    spec: &ChainSpec,
    j0: f64,
    rate: f64,
    gap: f64,
    samples_per_window: usize,
) -> Result<RecoherenceReport> {
    spec.validate()?;
    let v = spec.v_coupling;
    if !(rate <= 0.05 * v) {
        return Err(Error::Precondition(format!(
            "adiabatic recoupling needs rate <= 0.05·V, got rate = {rate}"
        )));
    }
    if samples_per_window < 2 {
        return Err(Error::invalid("need at least 2 samples per window"));
    }
    let schedule = CouplingSchedule::switch_off_on(j0, rate, 0.0, gap)?;
    let period = 2.0 * PI / v;
    let window = |start: f64| -> Vec<f64> {
        (0..samples_per_window)
            .map(|i| start + period * i as f64 / (samples_per_window - 1) as f64)
            .collect()
    };
    let t_start = default_start(&schedule);
    let first = window(-10.0 / rate - period);
    let last = window(gap + 10.0 / rate);
    let mid = 0.5 * gap;

    let mut times = vec![t_start];
    times.extend(&first);
    times.push(mid);
    times.extend(&last);
    let kappa = kappa_at_times(spec, &schedule, &times, |_| true)?;

    let w = samples_per_window;
    let envelope = |s: &[Complex64]| s.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(RecoherenceReport {
        kappa_initial_envelope: envelope(&kappa[1..1 + w]),
        kappa_off_plateau: kappa[1 + w].norm(),
        kappa_final_envelope: envelope(&kappa[2 + w..]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freefermion::mode_trace_static;
    use crate::model::Model;

    fn block(energy: f64, g: f64) -> ModeBlock {
        ModeBlock {
            index: 0,
            k: 0.0,
            energy,
            g,
        }
    }

    #[test]
    fn su2_exponential_is_unitary_and_composes() {
        let a = expm_su2(0.7, 0.3, -1.1, 0.4);
        assert!(defect(&a) < 1e-15);
        let b = expm_su2(0.35, 0.3, -1.1, 0.4);
        let bb = mul(&b, &b);
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - bb[i][j]).norm() < 1e-15);
            }
        }
        assert_eq!(expm_su2(1.0, 0.0, 0.0, 0.0), IDENTITY);
    }

    #[test]
    fn zero_coupling_mode_is_free() {
        let sched = CouplingSchedule::constant(0.0).unwrap();
        let grid = TimeGrid::new(0.0, 3.0, 4).unwrap();
        let states = integrate_mode(&block(0.8, 0.0), &sched, &grid).unwrap();
        for s in &states {
            let want = Complex64::from_polar(1.0, -2.0 * 0.8 * s.t);
            assert!((s.u_plus[0][0] - want).norm() < 1e-12);
            assert!((s.u_plus[1][1] - ONE).norm() < 1e-12);
            assert!(s.u_plus[0][1].norm() < 1e-12);
            assert!((s.kappa() - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_coupling_matches_static_factor() {
        let sched = CouplingSchedule::constant(0.5).unwrap();
        let grid = TimeGrid::new(0.0, 20.0, 81).unwrap();
        let b = block(0.6, 0.5 / 8f64.sqrt());
        for s in integrate_mode(&b, &sched, &grid).unwrap() {
            assert!((s.kappa().re - mode_trace_static(&b, s.t)).abs() < 1e-8);
            assert!(s.kappa().im.abs() < 1e-8);
            assert!(s.unitarity_defect() < 1e-9);
        }
    }

    #[test]
    fn late_start_is_rejected() {
        let sched = CouplingSchedule::switch_off(0.5, 1.0, 0.0).unwrap();
        let grid = TimeGrid::new(-10.0, 5.0, 4).unwrap();
        assert!(matches!(
            integrate_mode(&block(1.0, 0.1), &sched, &grid),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zero_j0_recoherence_is_trivial() {
        let spec = ChainSpec::new(Model::Model2XX, 8, 0.0, 1.0).unwrap();
        let r = recoherence_experiment(&spec, 0.0, 0.05, 400.0, 8).unwrap();
        assert_eq!(r.kappa_initial_envelope, 1.0);
        assert_eq!(r.kappa_off_plateau, 1.0);
        assert_eq!(r.kappa_final_envelope, 1.0);
    }

    #[test]
    fn fast_switch_freezes_kappa() {
        let spec = ChainSpec::new(Model::Model1Ising, 16, 0.3, 1.0).unwrap();
        let sched = CouplingSchedule::switch_off(0.3, 100.0, 0.0).unwrap();
        let grid = TimeGrid::new(-5.0, 5.0, 201).unwrap();
        let k = kappa_timedep(&spec, &sched, &grid).unwrap();
        let after: Vec<Complex64> = k.iter().filter(|&(t, _)| t >= 0.1).map(|(_, v)| v).collect();
        for v in &after {
            assert!((v - after[0]).norm() < 1e-6);
        }
    }

    #[test]
    fn richardson() {
        assert_eq!(richardson_inverse_n(&[(64, 0.3)]), None);
        let k = |n: usize| 0.1 + 2.0 / n as f64;
        let e = richardson_inverse_n(&[(64, k(64)), (256, k(256)), (128, k(128))]).unwrap();
        assert!((e - 0.1).abs() < 1e-14);
    }

    #[test]
    fn duplicates_are_counted() {
        // Model 1: every mode is identical, so one integration stands for all.
        let spec = ChainSpec::new(Model::Model1Ising, 12, 0.4, 1.0).unwrap();
        let sched = CouplingSchedule::constant(0.4).unwrap();
        let times = [0.0, 1.3, 2.9];
        let k = kappa_at_times(&spec, &sched, &times, |_| true).unwrap();
        let b = mode_spectrum(&spec)[0];
        for (t, v) in times.iter().zip(&k) {
            assert!((v.re - mode_trace_static(&b, *t).powi(12)).abs() < 1e-8);
        }
    }
}
