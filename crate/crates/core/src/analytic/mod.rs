//! Closed-form and semi-analytic decoherence factors.

mod hyp1f2;
pub mod quadrature;

pub use hyp1f2::{
    hyp1f2_asymptotic, hyp1f2_series, hyp1f2_special, Hyp1F2Method, Hyp1F2Result, MAX_TERMS,
    X_SWITCH,
};

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::Result;
use crate::freefermion::mode_cos;
use crate::model::{ChainSpec, DecoherenceSeries, Model, Provenance, TimeGrid};

/// `sin²(y)/y²`, continuous through `y = 0`.
pub(crate) fn sinc_sq(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 3.0 + 2.0 * y2 * y2 / 45.0
    } else {
        let s = y.sin() / y;
        s * s
    }
}

/// Model 1, any `N`: `1 − 2J² sin²(Ωt)/Ω²` with `Ω = √(V² + J²)`.
pub fn kappa_model1_exact(j: f64, v: f64, t: f64) -> f64 {
    debug_assert!(v > 0.0);
    let omega2 = v * v + j * j;
    let s = (omega2.sqrt() * t).sin();
    1.0 - 2.0 * j * j * s * s / omega2
}

/// Model 1 in the product-of-modes limit: `exp(−2J² sin²(Vt)/V²)`.
pub fn kappa_model1_limit(j: f64, v: f64, t: f64) -> f64 {
    debug_assert!(v > 0.0);
    let s = (v * t).sin();
    (-2.0 * j * j * s * s / (v * v)).exp()
}

/// Model 2 on `N` modes after the large-`N` reduction of each mode factor:
/// `exp(−(2J²t²/N) Σₙ sin²(Vt cos kₙ)/(Vt cos kₙ)²)`.
///
/// Modes sitting exactly at `cos kₙ = 0` contribute their limit `2J²t²/N`.
pub fn kappa_model2_finite_n(j: f64, v: f64, t: f64, n: usize) -> f64 {
    debug_assert!(v > 0.0 && n >= 2);
    let vt = v * t;
    let total: f64 = (0..n).map(|i| sinc_sq(vt * mode_cos(i, n))).sum();
    (-2.0 * j * j * t * t / n as f64 * total).exp()
}

/// Model 2 as `N → ∞`: `exp(−2J²t² ₁F₂(1/2; 3/2, 2; −V²t²))`.
pub fn kappa_model2_integral(j: f64, v: f64, t: f64) -> f64 {
    debug_assert!(v > 0.0);
    (-2.0 * j * j * t * t * hyp1f2_special(v * t).value).exp()
}

/// The same limit by direct quadrature of
/// `(J²/πV²) ∫_{−π}^{π} sin²(Vt cos k)/cos²k dk`.
pub fn kappa_model2_integral_quadrature(j: f64, v: f64, t: f64) -> Result<f64> {
    let avg = mode_average_quadrature(v * t)?;
    Ok((-2.0 * j * j * t * t * avg.value).exp())
}

/// `(1/2πx²) ∫_{−π}^{π} sin²(x cos k)/cos²k dk`, which equals
/// `₁F₂(1/2; 3/2, 2; −x²)`.
pub fn mode_average_quadrature(x: f64) -> Result<quadrature::Quadrature> {
    let x = x.abs();
    if x == 0.0 {
        return Ok(quadrature::Quadrature {
            value: 1.0,
            abs_error: 0.0,
            panels: 0,
        });
    }
    let integrand = |k: f64| x * x * sinc_sq(x * k.cos());
    // One panel per half oscillation, with ±π/2 on the grid.
    let m = 4 * (x.ceil() as usize + 1);
    let points: Vec<f64> = (0..=m)
        .map(|i| match i {
            0 => -PI,
            _ if i == m => PI,
            _ if 4 * i == m => -PI / 2.0,
            _ if 4 * i == 3 * m => PI / 2.0,
            _ => -PI + 2.0 * PI * i as f64 / m as f64,
        })
        .collect();
    let q = quadrature::integrate(integrand, &points, 1e-10, 1e-14, 200_000)?;
    let norm = 2.0 * PI * x * x;
    Ok(quadrature::Quadrature {
        value: q.value / norm,
        abs_error: q.abs_error / norm,
        panels: q.panels,
    })
}

fn real_series(
    spec: &ChainSpec,
    grid: &TimeGrid,
    provenance: Provenance,
    f: impl Fn(f64) -> f64,
) -> Result<DecoherenceSeries> {
    spec.validate()?;
    grid.validate()?;
    let values = grid.times().into_iter().map(|t| Complex64::new(f(t), 0.0)).collect();
    DecoherenceSeries::new(*grid, values, provenance, *spec, None)
}

/// Closed form at the chain's `N`: the exact model-1 solution, or the
/// finite-`N` model-2 product.
pub fn closed_form_series(spec: &ChainSpec, grid: &TimeGrid) -> Result<DecoherenceSeries> {
    let (j, v, n) = (spec.j_coupling, spec.v_coupling, spec.n_bath);
    match spec.model {
        Model::Model1Ising => {
            real_series(spec, grid, Provenance::ClosedForm, |t| kappa_model1_exact(j, v, t))
        }
        Model::Model2XX => real_series(spec, grid, Provenance::ClosedForm, |t| {
            kappa_model2_finite_n(j, v, t, n)
        }),
    }
}

/// The `N → ∞` form for either model.
pub fn integral_limit_series(spec: &ChainSpec, grid: &TimeGrid) -> Result<DecoherenceSeries> {
    let (j, v) = (spec.j_coupling, spec.v_coupling);
    match spec.model {
        Model::Model1Ising => {
            real_series(spec, grid, Provenance::IntegralLimit, |t| kappa_model1_limit(j, v, t))
        }
        Model::Model2XX => real_series(spec, grid, Provenance::IntegralLimit, |t| {
            kappa_model2_integral(j, v, t)
        }),
    }
}
