//! Jordan–Wigner mode decomposition.
//!
//! Neglecting the commutators between different modes, each mode `kₙ = 2πn/N`
//! becomes an independent two-level block `E σᶻ ± g σʸ` (up to a constant) and
//! κ factorises into a product over modes.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::Result;
use crate::model::{ChainSpec, DecoherenceSeries, Model, Provenance, TimeGrid};

/// One fermion mode: energy `Eₙ`, qubit coupling `g = J/√N`, wavenumber `kₙ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBlock {
    pub index: usize,
    pub k: f64,
    pub energy: f64,
    pub g: f64,
}

/// `cos(2πn/N)`, exact at quarter and sixth turns and exactly symmetric
/// under `n → N − n` and `k → π − k`.
pub fn mode_cos(n: usize, big_n: usize) -> f64 {
    let n = n % big_n;
    let m = n.min(big_n - n);
    // Now k = 2πm/N ∈ [0, π].
    if 4 * m == big_n {
        return 0.0;
    }
    if 4 * m > big_n && big_n % 2 == 0 {
        return -mode_cos(big_n / 2 - m, big_n);
    }
    if 6 * m == big_n {
        return 0.5;
    }
    if 3 * m == big_n {
        return -0.5;
    }
    (2.0 * PI * m as f64 / big_n as f64).cos()
}

pub fn mode_spectrum(spec: &ChainSpec) -> Vec<ModeBlock> {
    let n = spec.n_bath;
    let g = spec.j_coupling / (n as f64).sqrt();
    (0..n)
        .map(|i| {
            let energy = match spec.model {
                Model::Model1Ising => spec.v_coupling,
                Model::Model2XX => spec.v_coupling * mode_cos(i, n),
            };
            ModeBlock {
                index: i,
                k: 2.0 * PI * i as f64 / n as f64,
                energy,
                g,
            }
        })
        .collect()
}

/// Exact static factor of one mode: `1 − 2g² sin²(√(E² + g²) t)/(E² + g²)`.
pub fn mode_trace_static(block: &ModeBlock, t: f64) -> f64 {
    let g2 = block.g * block.g;
    if g2 == 0.0 {
        return 1.0;
    }
    let w2 = block.energy * block.energy + g2;
    let s = (w2.sqrt() * t).sin();
    1.0 - 2.0 * g2 * s * s / w2
}

/// Product of the mode factors in index order.
pub fn kappa_product(blocks: &[ModeBlock], t: f64) -> f64 {
    blocks.iter().map(|b| mode_trace_static(b, t)).product()
}

/// Scale `J⁴t⁴(N − 1)/N` of the leading correction dropped by factorising.
pub fn commutator_error_estimate(j: f64, t: f64, n: usize) -> f64 {
    let n = n as f64;
    (j * t).powi(4) * (n - 1.0) / n
}

/// κ on a grid from the mode product.
pub fn free_fermion_series(spec: &ChainSpec, grid: &TimeGrid) -> Result<DecoherenceSeries> {
    spec.validate()?;
    grid.validate()?;
    let blocks = mode_spectrum(spec);
    let values: Vec<Complex64> = (0..grid.n_samples)
        .into_par_iter()
        .map(|i| Complex64::new(kappa_product(&blocks, grid.time(i)), 0.0))
        .collect();
    DecoherenceSeries::new(*grid, values, Provenance::FreeFermionFiniteN, *spec, None)
}
