use thiserror::Error;

/// Errors produced by the mesh/laplacian/spectral/synthesis pipeline.
///
/// Each variant maps to a stable category string (see [`Error::category`])
/// that the CLI prints alongside its nonzero exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("eigensolver failed to converge: best relative residual {residual:.3e} (tolerance {tol:.3e})")]
    SolverFailure { residual: f64, tol: f64 },

    #[error("spectral domain error: {0}")]
    SpectralDomain(String),

    #[error("stale cache: {0}")]
    StaleCache(String),

    #[error("structure mismatch: {0}")]
    StructureMismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Format { .. } => "format",
            Error::Topology(_) => "topology",
            Error::DegenerateGeometry(_) => "degenerate-geometry",
            Error::InvalidGeometry(_) => "invalid-geometry",
            Error::Configuration(_) => "configuration",
            Error::SolverFailure { .. } => "solver-failure",
            Error::SpectralDomain(_) => "spectral-domain",
            Error::StaleCache(_) => "stale-cache",
            Error::StructureMismatch(_) => "structure-mismatch",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
