use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the function.
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    /// A model parameter is not admissible (e.g. non-positive mean power).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An integral over the radial axis does not converge for this tier.
    #[error("divergence error: tier {tier}: {detail}")]
    Divergent { tier: usize, detail: String },

    /// The scenario has zero interference variance, so standardization is undefined.
    #[error("degenerate scenario: {0}")]
    Degenerate(String),

    #[error("invalid scenario: {0}")]
    Invalid(ValidationReport),

    /// The adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature error: {0}")]
    Quadrature(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    /// Short machine-parseable category used by the command line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::Parameter(_) => "parameter",
            Error::Divergent { .. } => "divergence",
            Error::Degenerate(_) => "degenerate",
            Error::Invalid(_) => "validation",
            Error::Quadrature(_) => "quadrature",
            Error::Empty(_) => "empty",
        }
    }
}
