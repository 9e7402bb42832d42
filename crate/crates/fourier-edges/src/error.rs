use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("quadrature did not reach tolerance at mode {mode} (lambda = {lambda})")]
    Quadrature { mode: usize, lambda: f64 },
    #[error("ill-conditioned posterior (condition estimate {0:.3e})")]
    IllConditioned(f64),
    #[error("degenerate design: kernel normalization {0:.3e} is numerically zero")]
    DegenerateDesign(f64),
    #[error("singular normal matrix; try a larger regularization weight")]
    Singular,
    #[error("truth vector has zero norm")]
    ZeroTruth,
    #[error("marginal covariance is not positive definite")]
    NotPositiveDefinite,
}

pub type Result<T> = std::result::Result<T, Error>;
