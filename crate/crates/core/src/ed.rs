//! Exact diagonalization of the qubit-conditioned bath Hamiltonians
//! `H± = ±J σ₀ʸ + H_bath` on the full `2^N` bath space.
//!
//! Basis states are bit strings: bit `i` of the index is bath spin `i`, with
//! 0 meaning spin up (`σᶻ = +1`).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrator::{self, Cf4System, StepControl, ALPHA1, ALPHA2, C1, C2};
use crate::model::{
    eval_coupling, Boundary, ChainSpec, CouplingSchedule, DecoherenceSeries, Model, Provenance,
    TimeGrid,
};

pub const MAX_STATIC_SPINS: usize = 14;
pub const MAX_TIMEDEP_SPINS: usize = 10;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// τʸ sector of the central qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A block Hamiltonian in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHamiltonian {
    pub n_bath: usize,
    pub sign: Sign,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl BlockHamiltonian {
    pub fn dimension(&self) -> usize {
        1 << self.n_bath
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored entries of row `r` as `(column, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.row(r).find(|&(j, _)| j == c).map_or(ZERO, |(_, v)| v)
    }

    /// `max |H − H†|` over stored entries.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.dimension())
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.dimension();
        let mut m = DMatrix::zeros(d, d);
        for r in 0..d {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }
}

fn bonds(spec: &ChainSpec) -> Vec<(usize, usize)> {
    let n = spec.n_bath;
    let mut b: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    // For two spins the closing bond would duplicate the only one.
    if spec.boundary == Boundary::PeriodicModeGrid && n > 2 {
        b.push((n - 1, 0));
    }
    b
}

/// Row `r` of `V Σ σᶻσᶻ` or `V Σ (σ⁺σ⁻ + h.c.)`, plus `coupling · σ₀ʸ`.
fn row_entries(spec: &ChainSpec, bonds: &[(usize, usize)], coupling: f64, r: usize) -> Vec<(usize, Complex64)> {
    let v = spec.v_coupling;
    let bit = |i: usize| (r >> i) & 1;
    let mut out = Vec::with_capacity(bonds.len() + 2);
    match spec.model {
        Model::Model1Ising => {
            let e: f64 = bonds
                .iter()
                .map(|&(i, j)| if bit(i) == bit(j) { v } else { -v })
                .sum();
            out.push((r, Complex64::new(e, 0.0)));
        }
        Model::Model2XX => {
            for &(i, j) in bonds {
                if bit(i) != bit(j) {
                    out.push((r ^ (1 << i) ^ (1 << j), Complex64::new(v, 0.0)));
                }
            }
        }
    }
    if coupling != 0.0 {
        // σʸ|↑⟩ = i|↓⟩, σʸ|↓⟩ = −i|↑⟩; row r picks up the column with bit 0 flipped.
        let amp = if bit(0) == 1 { I } else { -I };
        out.push((r ^ 1, amp * coupling));
    }
    out.sort_by_key(|&(c, _)| c);
    // Merge duplicate columns.
    out.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 += b.1;
            true
        } else {
            false
        }
    });
    out
}

fn build_block(spec: &ChainSpec, coupling: f64, sign: Sign) -> BlockHamiltonian {
    let d = 1usize << spec.n_bath;
    let bonds = bonds(spec);
    let mut row_ptr = Vec::with_capacity(d + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for r in 0..d {
        for (c, v) in row_entries(spec, &bonds, sign.factor() * coupling, r) {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    BlockHamiltonian {
        n_bath: spec.n_bath,
        sign,
        row_ptr,
        cols,
        vals,
    }
}

fn guard(spec: &ChainSpec, max: usize, backend: &'static str) -> Result<()> {
    spec.validate()?;
    if spec.n_bath > max {
        return Err(Error::ResourceGuard {
            backend,
            n_bath: spec.n_bath,
            max,
        });
    }
    Ok(())
}

/// `(H⁺, H⁻)` for the chain's coupling.
pub fn build_block_hamiltonians(spec: &ChainSpec) -> Result<(BlockHamiltonian, BlockHamiltonian)> {
    guard(spec, MAX_STATIC_SPINS, "exact diagonalization")?;
    Ok((
        build_block(spec, spec.j_coupling, Sign::Plus),
        build_block(spec, spec.j_coupling, Sign::Minus),
    ))
}

/// Initial bath state.
#[derive(Debug, Clone, PartialEq)]
pub enum BathState {
    /// `ρ_b = I / 2^N`.
    FullyMixed,
    /// A normalised pure state on the `2^N` basis.
    ProductPure(Vec<Complex64>),
}

impl BathState {
    /// Tensor product of single-spin states `(⟨↑|ψᵢ⟩, ⟨↓|ψᵢ⟩)`, spin 0 first.
    pub fn product(spins: &[[Complex64; 2]]) -> Result<Self> {
        let mut amps = vec![ONE];
        for (i, s) in spins.iter().enumerate() {
            let norm = (s[0].norm_sqr() + s[1].norm_sqr()).sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::invalid(format!("spin {i} has a vanishing state")));
            }
            let (up, down) = (s[0] / norm, s[1] / norm);
            // Spin i is bit i, so bit i = 0 fills the low half.
            let mut next = Vec::with_capacity(amps.len() * 2);
            next.extend(amps.iter().map(|a| a * up));
            next.extend(amps.iter().map(|a| a * down));
            amps = next;
        }
        Self::from_amplitudes(amps)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("pure bath state has norm {norm}")));
        }
        if !amps.len().is_power_of_two() {
            return Err(Error::invalid("pure bath state length is not a power of two"));
        }
        Ok(BathState::ProductPure(amps))
    }

    fn check_dimension(&self, d: usize) -> Result<()> {
        match self {
            BathState::ProductPure(a) if a.len() != d => Err(Error::invalid(format!(
                "pure bath state has {} amplitudes, expected {d}",
                a.len()
            ))),
            _ => Ok(()),
        }
    }
}

struct Eigen {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

fn eigh(h: DMatrix<Complex64>) -> Eigen {
    let e = h.symmetric_eigen();
    Eigen {
        values: e.eigenvalues.iter().copied().collect(),
        vectors: e.eigenvectors,
    }
}

fn unit_series(spec: &ChainSpec, grid: &TimeGrid, provenance: Provenance, schedule: Option<CouplingSchedule>) -> Result<DecoherenceSeries> {
    DecoherenceSeries::new(*grid, vec![ONE; grid.n_samples], provenance, *spec, schedule)
}

/// κ(t) for a static coupling by dense eigendecomposition of both blocks.
///
/// For the fully mixed bath this uses `κ = (1/D) Σ_ab |O_ab|² e^{−i(λ⁺_a − λ⁻_b)t}`
/// with `O = W₊†W₋`.
pub fn kappa_ed_static(spec: &ChainSpec, bath: &BathState, grid: &TimeGrid) -> Result<DecoherenceSeries> {
    guard(spec, MAX_STATIC_SPINS, "exact diagonalization")?;
    grid.validate()?;
    let d = 1usize << spec.n_bath;
    bath.check_dimension(d)?;
    if spec.j_coupling == 0.0 {
        return unit_series(spec, grid, Provenance::ExactED, None);
    }
    let (hp, hm) = build_block_hamiltonians(spec)?;
    let ep = eigh(hp.to_dense());
    let em = eigh(hm.to_dense());

    let values: Vec<Complex64> = match bath {
        BathState::FullyMixed => {
            let o = ep.vectors.adjoint() * &em.vectors;
            let w: Vec<f64> = o.iter().map(|z| z.norm_sqr()).collect();
            // Column-major: entry (a, b) sits at a + b·d.
            (0..grid.n_samples)
                .into_par_iter()
                .map(|s| {
                    let t = grid.time(s);
                    let pa: Vec<Complex64> = ep.values.iter().map(|&l| Complex64::from_polar(1.0, -l * t)).collect();
                    let mut acc = ZERO;
                    for (b, &lb) in em.values.iter().enumerate() {
                        let col = &w[b * d..(b + 1) * d];
                        let inner: Complex64 = col.iter().zip(&pa).map(|(&wab, &p)| p * wab).sum();
                        acc += inner * Complex64::from_polar(1.0, lb * t);
                    }
                    acc / d as f64
                })
                .collect()
        }
        BathState::ProductPure(psi) => {
            let psi = nalgebra::DVector::from_column_slice(psi);
            let cp = ep.vectors.adjoint() * &psi;
            let cm = em.vectors.adjoint() * &psi;
            (0..grid.n_samples)
                .into_par_iter()
                .map(|s| {
                    let t = grid.time(s);
                    let vp = &ep.vectors
                        * nalgebra::DVector::from_iterator(
                            d,
                            cp.iter().zip(&ep.values).map(|(c, &l)| c * Complex64::from_polar(1.0, -l * t)),
                        );
                    let vm = &em.vectors
                        * nalgebra::DVector::from_iterator(
                            d,
                            cm.iter().zip(&em.values).map(|(c, &l)| c * Complex64::from_polar(1.0, -l * t)),
                        );
                    vm.dotc(&vp)
                })
                .collect()
        }
    };
    DecoherenceSeries::new(*grid, values, Provenance::ExactED, *spec, None)
}

/// Both sector propagators under `H±(t) = H_bath ± J(t) σ₀ʸ`.
struct EdPair {
    bath: DMatrix<Complex64>,
    y: DMatrix<Complex64>,
    schedule: CouplingSchedule,
}

impl EdPair {
    fn expm(&self, bath_weight: f64, coupling: f64, h: f64) -> DMatrix<Complex64> {
        let m = &self.bath * Complex64::new(bath_weight, 0.0) + &self.y * Complex64::new(coupling, 0.0);
        (m * Complex64::new(0.0, -h)).exp()
    }
}

impl Cf4System for EdPair {
    type State = (DMatrix<Complex64>, DMatrix<Complex64>);

    fn identity(&self) -> Self::State {
        let d = self.bath.nrows();
        (DMatrix::identity(d, d), DMatrix::identity(d, d))
    }

    fn step(&self, u: &Self::State, t: f64, h: f64) -> Self::State {
        let j1 = eval_coupling(&self.schedule, t + C1 * h);
        let j2 = eval_coupling(&self.schedule, t + C2 * h);
        let first = ALPHA2 * j1 + ALPHA1 * j2;
        let second = ALPHA1 * j1 + ALPHA2 * j2;
        let adv = |s: f64, u: &DMatrix<Complex64>| {
            let a = self.expm(0.5, s * first, h);
            let b = self.expm(0.5, s * second, h);
            b * (a * u)
        };
        (adv(1.0, &u.0), adv(-1.0, &u.1))
    }

    fn distance(&self, a: &Self::State, b: &Self::State) -> f64 {
        let m = |x: &DMatrix<Complex64>, y: &DMatrix<Complex64>| {
            x.iter().zip(y.iter()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
        };
        m(&a.0, &b.0).max(m(&a.1, &b.1))
    }
}

/// `max |U†U − I|`.
pub(crate) fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let p = u.adjoint() * u;
    let d = p.nrows();
    (0..d)
        .flat_map(|r| (0..d).map(move |c| (r, c)))
        .map(|(r, c)| (p[(r, c)] - if r == c { ONE } else { ZERO }).norm())
        .fold(0.0, f64::max)
}

fn kappa_from(u: &(DMatrix<Complex64>, DMatrix<Complex64>), bath: &BathState) -> Complex64 {
    let (up, um) = u;
    match bath {
        BathState::FullyMixed => {
            let d = up.nrows() as f64;
            up.iter().zip(um.iter()).map(|(p, m)| p * m.conj()).sum::<Complex64>() / d
        }
        BathState::ProductPure(psi) => {
            let psi = nalgebra::DVector::from_column_slice(psi);
            (um * &psi).dotc(&(up * &psi))
        }
    }
}

/// κ(t) under a time-dependent coupling, with both propagators starting at
/// the identity at `grid.t_start`.
pub fn kappa_ed_timedep(
    spec: &ChainSpec,
    schedule: &CouplingSchedule,
    bath: &BathState,
    grid: &TimeGrid,
) -> Result<DecoherenceSeries> {
    guard(spec, MAX_TIMEDEP_SPINS, "time-dependent exact diagonalization")?;
    schedule.validate()?;
    grid.validate()?;
    let d = 1usize << spec.n_bath;
    bath.check_dimension(d)?;
    if schedule.j0 == 0.0 {
        return unit_series(spec, grid, Provenance::ExactED, Some(*schedule));
    }
    let bath_h = build_block(spec, 0.0, Sign::Plus).to_dense();
    let y_dense = build_block(spec, 1.0, Sign::Plus).to_dense() - &bath_h;
    let sys = EdPair {
        bath: bath_h,
        y: y_dense,
        schedule: *schedule,
    };
    let times = grid.times();
    let mut values = vec![ZERO; grid.n_samples];
    let end = integrator::propagate(&sys, &times, StepControl::default(), |i, u| {
        values[i] = kappa_from(u, bath);
    })?;
    let defect = unitarity_defect(&end.0).max(unitarity_defect(&end.1));
    if defect > 1e-9 {
        return Err(Error::Convergence {
            context: "time-dependent exact diagonalization".into(),
            detail: format!("unitarity defect {defect:e} at t = {}", grid.t_end),
        });
    }
    DecoherenceSeries::new(*grid, values, Provenance::ExactED, *spec, Some(*schedule))
}
