//! Switched-coupling dynamics of the mode product.

use proptest::prelude::*;
use spinbath::freefermion::{kappa_product, mode_spectrum, ModeBlock};
use spinbath::timedep::{
    default_start, integrate_mode, kappa_timedep, kappa_timedep_band_excluded,
    recoherence_experiment,
};
use spinbath::{ChainSpec, CouplingSchedule, Model, TimeGrid};

fn block(energy: f64, g: f64) -> ModeBlock {
    ModeBlock { index: 0, k: 0.0, energy, g }
}

fn plateau(b: &ModeBlock, j0: f64, rate: f64) -> f64 {
    let schedule = CouplingSchedule::switch_off(j0, rate, 0.0).unwrap();
    let start = default_start(&schedule);
    let grid = TimeGrid::new(start, -start, 3).unwrap();
    integrate_mode(b, &schedule, &grid).unwrap()[2].kappa().re
}

#[test]
fn adiabatic_mode_factor_is_cosine_of_mixing_angle() {
    for (energy, g) in [(1.0, 0.0625), (0.5, 0.0625), (1.0, 0.2)] {
        let want = energy / f64::hypot(energy, g);
        let got = plateau(&block(energy, g), g, 0.01);
        assert!(((1.0 - got) - (1.0 - want)).abs() < 0.02 * (1.0 - want), "E = {energy}, g = {g}: {got} vs {want}");
    }
}

#[test]
fn sudden_model2_matches_static() {
    let spec = ChainSpec::new(Model::Model2XX, 64, 0.5, 1.0).unwrap();
    let schedule = CouplingSchedule::switch_off(0.5, 100.0, 0.0).unwrap();
    let grid = TimeGrid::new(-5.0, 1.0, 61).unwrap();
    let k = kappa_timedep(&spec, &schedule, &grid).unwrap();
    let frozen = k.values[60];
    assert!((frozen.re - kappa_product(&mode_spectrum(&spec), 5.0)).abs() < 1e-4);
}

#[test]
fn finite_ramp_correction_falls_as_inverse_rate_squared() {
    let spec = ChainSpec::new(Model::Model1Ising, 64, 0.5, 1.0).unwrap();
    let stat = kappa_product(&mode_spectrum(&spec), 5.0);
    let dev = |rate: f64| {
        let schedule = CouplingSchedule::switch_off(0.5, rate, 0.0).unwrap();
        let grid = TimeGrid::new(-5.0, 1.0, 3).unwrap();
        (kappa_timedep(&spec, &schedule, &grid).unwrap().values[2].re - stat).abs()
    };
    let r = dev(100.0) / dev(200.0);
    assert!((3.5..=4.5).contains(&r), "ratio {r}");
}

#[test]
fn model1_recovers_model2_does_not() {
    let m1 = recoherence_experiment(&ChainSpec::new(Model::Model1Ising, 32, 0.5, 1.0).unwrap(), 0.5, 0.02, 1000.0, 65).unwrap();
    assert!(m1.kappa_final_envelope >= 0.98 * m1.kappa_initial_envelope);
    assert!(m1.kappa_off_plateau < m1.kappa_initial_envelope);
    let m2 = recoherence_experiment(&ChainSpec::new(Model::Model2XX, 128, 0.5, 1.0).unwrap(), 0.5, 0.02, 1000.0, 65).unwrap();
    assert!(m2.kappa_final_envelope <= 0.05);
}

#[test]
fn excluding_band_centre_raises_plateau() {
    let spec = ChainSpec::new(Model::Model2XX, 64, 0.5, 1.0).unwrap();
    let schedule = CouplingSchedule::switch_off(0.5, 0.05, 0.0).unwrap();
    let start = default_start(&schedule);
    let grid = TimeGrid::new(start, -start, 3).unwrap();
    let mut last = 0.0;
    for delta in [0.0, 0.05, 0.2, 0.5, 0.9] {
        let k = kappa_timedep_band_excluded(&spec, &schedule, &grid, delta).unwrap()[2].norm();
        assert!(k >= last, "delta = {delta}: {k} < {last}");
        last = k;
    }
    assert!(last > 0.9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn propagators_stay_unitary(
        energy in -1.0..1.0f64, g in 0.0..0.5f64, rate in 0.05..20.0f64, gap in 10.0..40.0f64,
    ) {
        let schedule = CouplingSchedule::switch_off_on(g.max(1e-3), rate, 0.0, gap / rate).unwrap();
        let start = default_start(&schedule);
        let grid = TimeGrid::new(start, gap / rate + 20.0 / rate, 41).unwrap();
        for s in integrate_mode(&block(energy, g), &schedule, &grid).unwrap() {
            prop_assert!(s.unitarity_defect() <= 1e-9);
            prop_assert!(s.kappa().norm() <= 1.0 + 1e-9);
        }
    }
}
