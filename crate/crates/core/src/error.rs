//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge: value={value:.9e} achieved={achieved:.3e} requested={requested:.3e}")]
    QuadratureNonConvergence {
        value: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("fit needs at least {needed} usable points, got {got}")]
    TooFewFitPoints { needed: usize, got: usize },

    #[error("kernel width mismatch: expansion sigma={expansion}, problem sigma={problem}")]
    KernelMismatch { expansion: f64, problem: f64 },

    #[error("expansion carries offset {offset} but the problem is the no-offset formulation")]
    OffsetNotAllowed { offset: f64 },

    #[error("solver budget exhausted after {passes} passes: duality gap {gap:.6e} exceeds tolerance {tol:.6e}")]
    SolverBudget { passes: u64, gap: f64, tol: f64 },

    #[error("gram matrix is not positive semidefinite: eigenvalue {eigenvalue:.6e}")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("sup |f| = {sup:.6} violates |f| <= 1 + {tol:.1e}")]
    RangeViolation { sup: f64, tol: f64 },

    #[error("point with norm {norm:.6} lies outside the input domain")]
    OutsideDomain { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("divergent integral: {0}")]
    Divergent(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
