use thiserror::Error;

/// Errors raised by the simulation and subspace routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error(
        "overlap matrix is numerically singular (smallest eigenvalue {min_eigenvalue:.3e}); \
         supply a threshold to discard small eigenpairs"
    )]
    IllConditioned { min_eigenvalue: f64 },

    #[error("threshold {threshold} removes every eigenpair of the overlap matrix")]
    EmptySubspace { threshold: f64 },

    #[error("group labels differ between basis family and target family: {0}")]
    GroupMismatch(String),

    #[error("state preparation failed at training point {index} {point:?}: {source}")]
    Preparation {
        index: usize,
        point: Vec<f64>,
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
