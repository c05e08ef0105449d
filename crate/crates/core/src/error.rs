use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Young diagram {0:?}: rows must be positive and weakly decreasing")]
    InvalidDiagram(Vec<usize>),

    #[error("box count mismatch: {left} vs {right}")]
    BoxCountMismatch { left: usize, right: usize },

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        last_radius: f64,
        last_vector: Vec<f64>,
    },

    #[error("matrix is not primitive (irreducible={irreducible}, positive diagonal={positive_diagonal})")]
    NotPrimitive {
        irreducible: bool,
        positive_diagonal: bool,
    },

    #[error("operator dimension {dim} exceeds the oracle cap {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("identity check failed: {0}")]
    IdentityFailed(String),
}

impl Error {
    /// Validation errors are caller mistakes; everything else is a
    /// computation failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidDiagram(_)
                | Error::BoxCountMismatch { .. }
                | Error::Parse { .. }
                | Error::InvalidParameter(_)
        )
    }
}
