use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// Invalid construction or sampler parameters.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A level beyond the mass accumulated by the simulated path was requested.
    /// The caller has to simulate on a longer horizon.
    #[error("level {level} exceeds the accumulated path mass {reachable}")]
    HorizonExceeded { level: f64, reachable: f64 },

    /// The operational time E(t) lies beyond the horizon of the Poisson clock.
    #[error("operational time {time} exceeds the Poisson path horizon {horizon}")]
    OperationalHorizon { time: f64, horizon: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// A statistic is undefined because a sample has zero variance.
    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
