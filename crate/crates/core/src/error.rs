use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid coordinate: lon {lon}, lat {lat}")]
    InvalidCoordinate { lon: f64, lat: f64 },

    #[error("negative timestamp {0}")]
    NegativeTime(i64),

    #[error("trajectory `{device}` is empty")]
    EmptyTrajectory { device: String },

    #[error("trajectory `{device}`: timestamps not strictly increasing at index {index} ({prev} -> {next})")]
    NonIncreasingTime {
        device: String,
        index: usize,
        prev: i64,
        next: i64,
    },

    #[error("invalid mobility parameters: {0}")]
    InvalidParams(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("trajectory of {len} records exceeds the oracle limit of {limit}")]
    OracleLimit { len: usize, limit: usize },

    #[error("index {index} out of range for trajectory of {len} records")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("power-law fit diverges: every sample equals xmin")]
    DivergentFit,

    #[error("timestamp {time} outside path duration [0, {duration}]")]
    TimeOutOfRange { time: f64, duration: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("elapsed time is negative: {time} precedes segment start {start}")]
    NegativeElapsed { time: i64, start: i64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
