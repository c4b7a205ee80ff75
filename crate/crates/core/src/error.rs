use thiserror::Error;

use crate::jets::JetError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("invalid prepotential: {0}")]
    InvalidPrepotential(String),
    #[error("log terms require a nonzero base point, got z = 0")]
    LogAtPuncture,
    #[error("not a polarized point: pairing i·Q(Ω, Ω̄) vanishes")]
    NotPolarized,
    #[error("slice not normal at point: Weil-Petersson metric is not positive definite")]
    NotNormal,
    #[error("singular matrix in {0}")]
    Singular(&'static str),
    #[error("period data is not in normal gauge (residual {0:.3e})")]
    NotNormalGauge(f64),
    #[error("insufficient jet order: need {needed}, have {have}")]
    InsufficientOrder { needed: usize, have: usize },
    #[error("rank deficiency: {0}")]
    RankDeficient(String),
    #[error("projection undefined at point: μ has a pole")]
    ProjectionUndefined,
    #[error("matrix A must be symmetric (residual {0:.3e})")]
    AsymmetricA(f64),
    #[error("finite-difference stencil failed: {0}")]
    Stencil(String),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
