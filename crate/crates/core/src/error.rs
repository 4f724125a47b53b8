use thiserror::Error;

use crate::poly::MultiIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("Poisson matrix is not antisymmetric at ({i}, {j})")]
    NotAntisymmetric { i: usize, j: usize },

    #[error("Jacobi identity fails for indices ({i}, {j}, {k})")]
    JacobiViolation { i: usize, j: usize, k: usize },

    #[error("Moyal product requires a constant Poisson structure")]
    NonConstantPoisson,

    #[error("invalid operator series: {0}")]
    InvalidOperatorSeries(String),

    #[error("operator does not vanish on constants")]
    NotNullOnConstants,

    #[error("operator does not vanish on the linear monomial {0}")]
    NotNullOnLinear(String),

    #[error("probe is not a differential operator of order <= {max_order}: residual on monomial {monomial:?}")]
    FitResidual { max_order: usize, monomial: MultiIndex },

    #[error("Hochschild coboundary is only implemented for 1- and 2-cochains, got arity {0}")]
    UnsupportedArity(usize),

    #[error("reconstructed cochain rho_{order} disagrees with the sun-cochain table on {monomial:?}")]
    ReconstructionMismatch { order: usize, monomial: MultiIndex },

    #[error("missing reconstructed cochain rho_{0}")]
    MissingCochain(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
