use thiserror::Error;

/// Errors produced by the simulation backends.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter set violates a type invariant (bad N, negative V, empty grid, ...).
    #[error("invalid parameters: {0}")]
    InvalidParameter(String),

    /// The request is well formed but too large for the dense backend.
    #[error("bath of {n_bath} spins exceeds the {max} spin limit of {backend}")]
    ResourceGuard {
        backend: &'static str,
        n_bath: usize,
        max: usize,
    },

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A computed decoherence factor left the unit disc.
    #[error("|kappa| = {modulus} at t = {t} exceeds 1 + 1e-9 ({backend})")]
    KappaOutOfRange {
        backend: &'static str,
        t: f64,
        modulus: f64,
    },

    /// The time integrator could not reach the requested accuracy.
    #[error("convergence failure in {context}: {detail}")]
    Convergence { context: String, detail: String },

    /// Failure while integrating one Jordan-Wigner mode.
    #[error("mode {mode}: {source}")]
    Mode {
        mode: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::KappaOutOfRange { .. } | Error::Convergence { .. } => true,
            Error::Mode { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
