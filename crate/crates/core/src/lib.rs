//! Decoherence of a qubit coupled to a spin-chain bath.
//!
//! The qubit couples through `J τʸ σ₀ʸ` to the first spin of a chain with
//! either Ising bonds ([`Model::Model1Ising`]) or XX hopping
//! ([`Model::Model2XX`]). Its coherence is multiplied by the decoherence
//! factor `κ(t) = tr(e^{−iH⁺t} ρ_b e^{+iH⁻t})`, where `H± = ±J σ₀ʸ + H_bath`.
//!
//! κ is available from several independent routes that check one another:
//!
//! * [`ed`]: exact diagonalization of the full `2^N` bath space,
//! * [`freefermion`]: the Jordan–Wigner mode product,
//! * [`analytic`]: closed forms and their `N → ∞` limits,
//! * [`timedep`]: mode-resolved propagation for a switched coupling `J(t)`.
//!
//! ```
//! use spinbath::{analytic, ed, ChainSpec, Model, TimeGrid};
//!
//! let spec = ChainSpec::new(Model::Model1Ising, 4, 0.5, 1.0)?;
//! let grid = TimeGrid::new(0.0, 10.0, 51)?;
//! let exact = ed::kappa_ed_static(&spec, &ed::BathState::FullyMixed, &grid)?;
//! for (t, k) in exact.iter() {
//!     assert!((k.re - analytic::kappa_model1_exact(0.5, 1.0, t)).abs() < 1e-10);
//! }
//! # Ok::<(), spinbath::Error>(())
//! ```

pub mod analytic;
pub mod ed;
mod error;
pub mod freefermion;
pub mod integrator;
mod model;
pub mod timedep;

pub use error::{Error, Result};
pub use model::{
    apply_kappa, eval_coupling, Boundary, ChainSpec, CouplingSchedule, DecoherenceSeries, Model,
    Provenance, QubitState, ScheduleKind, TimeGrid, KAPPA_EPS,
};
pub use num_complex::Complex64;
