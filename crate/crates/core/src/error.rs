use thiserror::Error;

/// Failures surfaced by the numerical kernels and the layers built on them.
///
/// Verdicts and inequality violations are not errors; they are reported as
/// data. Only situations where no number can be produced end up here.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A series could not be summed: no ratio bound below one was certified
    /// before the index cap (or before the known coefficients ran out).
    #[error("NoDecayCertificate: series not certified to converge within {index_cap} terms")]
    NoDecayCertificate { index_cap: usize },

    /// Bracket expansion left the admissible coordinate range; the extremum
    /// sits at (or beyond) the edge of what doubles can represent.
    #[error("NotBracketable: extremum escapes the search range at {coordinate:e}")]
    NotBracketable { coordinate: f64 },

    #[error("TargetOutOfRange: target {target} not bracketed on [{lo}, {hi}]")]
    TargetOutOfRange { target: f64, lo: f64, hi: f64 },

    #[error("PreconditionViolated: {0}")]
    PreconditionViolated(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short kernel name, used by the CLI when reporting numeric failures.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NoDecayCertificate { .. } => "NoDecayCertificate",
            Error::NotBracketable { .. } => "NotBracketable",
            Error::TargetOutOfRange { .. } => "TargetOutOfRange",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
