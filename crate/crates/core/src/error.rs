//! Error type shared by every stage of the pipeline.
//!
//! Gate violations always carry the measured margin so that callers (and the
//! CLI) can report exactly which quantity failed and by how much.

use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("matrix is not normal ({stage}): residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NotNormal {
        residual: f64,
        tolerance: f64,
        stage: &'static str,
    },

    #[error(
        "operator is not near-unitary: singular values span [{sigma_min:.6e}, {sigma_max:.6e}]"
    )]
    NotNearUnitary { sigma_min: f64, sigma_max: f64 },

    #[error("gate violated at {stage}: measured {measured:.6e}, limit {limit:.6e}")]
    GateViolation {
        stage: String,
        measured: f64,
        limit: f64,
    },

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("function returned a non-finite value on eigenvalue {re}+{im}i")]
    NonFiniteFunction { re: f64, im: f64 },

    #[error("perturbation budget must be positive (got {0})")]
    NonPositiveBudget(f64),

    #[error("circle map is undefined at the curve centre")]
    CurveCentre,

    #[error("spectrum point {re}+{im}i is off the curve by {residual:.3e}")]
    SpectrumOffCurve { re: f64, im: f64, residual: f64 },

    #[error(
        "spectrum in O_3 around the hole is {residual:.3e} off the line at angle {theta} (limit {limit:.1e})"
    )]
    LineCondition {
        theta: f64,
        residual: f64,
        limit: f64,
    },

    #[error("hole centres {i} and {j} are {separation:.3} apart; pairwise separation must be >= 4")]
    HoleSeparation { i: usize, j: usize, separation: f64 },

    #[error("hole {index}: {source}")]
    Hole {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("self-commutator is zero; the extension normalisation is undefined")]
    ZeroSelfCommutator,

    #[error("invalid bump parameters: {0}")]
    InvalidBump(String),

    #[error("spectrum of X is {residual:.3e} away from the integer clusters (limit {limit:.3e})")]
    SpectrumDispersion { residual: f64, limit: f64 },

    #[error("dimension {n} exceeds the oracle gate (n <= {max})")]
    DimensionGate { n: usize, max: usize },
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Wrap an error with the index of the hole that produced it.
    pub fn at_hole(self, index: usize) -> Error {
        Error::Hole {
            index,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
