use thiserror::Error;

/// Errors surfaced by every stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("grid constraint violated: {0}")]
    Grid(String),
    #[error("detector geometry: {0}")]
    Detector(String),
    #[error("optics: {0}")]
    Optics(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by user input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Param(_) | Error::Grid(_) | Error::Detector(_) | Error::Optics(_) | Error::Config(_)
        )
    }

    /// Prefixes the message with the stage that failed, keeping the error class.
    pub fn context(self, stage: &str) -> Error {
        match self {
            Error::Param(m) => Error::Param(format!("{stage}: {m}")),
            Error::Grid(m) => Error::Grid(format!("{stage}: {m}")),
            Error::Detector(m) => Error::Detector(format!("{stage}: {m}")),
            Error::Optics(m) => Error::Optics(format!("{stage}: {m}")),
            Error::Quadrature(m) => Error::Quadrature(format!("{stage}: {m}")),
            Error::Numerical(m) => Error::Numerical(format!("{stage}: {m}")),
            Error::Config(m) => Error::Config(format!("{stage}: {m}")),
            Error::Io(e) => Error::Io(std::io::Error::new(e.kind(), format!("{stage}: {e}"))),
        }
    }
}
