use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spectrum too short: {check} needs {needed} values, {available} available")]
    SpectrumTooShort {
        check: String,
        needed: usize,
        available: usize,
    },

    #[error("index base mismatch: {check} expects a {expected} spectrum")]
    IndexBase { check: String, expected: &'static str },

    #[error("degenerate immersion at {point:?}: {reason}")]
    DegenerateImmersion { point: Vec<f64>, reason: String },

    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    #[error("degenerate cell {cell}: {reason}")]
    DegenerateCell { cell: usize, reason: String },

    #[error("matrix is not positive definite: {0}")]
    Definiteness(String),

    #[error("no convergence after {iterations} iterations (worst residual {worst_residual:e}, pairs converged {converged}/{requested})")]
    Convergence {
        iterations: usize,
        worst_residual: f64,
        converged: usize,
        requested: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing constant `{field}` required by {check}")]
    MissingConstant { field: &'static str, check: String },

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Wrap an error with the pipeline stage in which it happened.
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for errors caused by bad user input rather than numerical trouble.
    pub fn is_configuration(&self) -> bool {
        match self {
            Error::Config(_)
            | Error::Parse(_)
            | Error::UnknownCheck(_)
            | Error::MissingConstant { .. }
            | Error::InvalidArgument(_)
            | Error::IndexBase { .. }
            | Error::SpectrumTooShort { .. } => true,
            Error::Stage { source, .. } => source.is_configuration(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
