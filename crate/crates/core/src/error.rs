use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the gamma function at {0}")]
    Pole(f64),
    #[error("series did not converge within {terms} terms")]
    NoConvergence { terms: usize },
    #[error("argument outside the supported domain: {0}")]
    Domain(String),
    #[error("point lies on an excluded branch cut: {0}")]
    Branch(String),
    #[error("quadrature refinement stalled: {0}")]
    Quadrature(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("quadrilateral has a pair of parallel sides")]
    ParallelSides,
    #[error("residual has no sign change on [{lo:e}, {hi:e}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("value outside the parameter range: {0}")]
    Range(String),
}

impl Error {
    /// True for failures of numerical machinery rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::Quadrature(_) | Error::NoBracket { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
