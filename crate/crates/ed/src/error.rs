use thiserror::Error;

#[derive(Debug, Error)]
pub enum EdError {
    #[error("{0} sites exceeds the exact-diagonalization limit of {max}", max = crate::MAX_SITES)]
    SizeLimit(usize),

    #[error("number of sites must be even and at least 4, got {0}")]
    InvalidSize(usize),

    #[error("dense diagonalization is limited to {max} sites, got {0}", max = crate::MAX_DENSE_SITES)]
    DenseLimit(usize),

    #[error("eigensolver failed: {0}")]
    EigensolverFailure(&'static str),

    #[error(transparent)]
    Model(#[from] qbat_core::Error),
}

pub type Result<T> = std::result::Result<T, EdError>;
