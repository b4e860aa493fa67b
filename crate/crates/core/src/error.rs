use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two points (or a point and a metric) do not describe the same space.
    SpaceMismatch(String),
    /// A coordinate was NaN or infinite.
    NonFinite,
    /// A dataset was empty or its columns had different lengths.
    InvalidDataset(String),
    /// A response lay outside `[0, 1]`, or a label was not binary.
    InvalidResponse { index: usize, value: f64 },
    /// Confidence parameter outside `(0, 1)`.
    InvalidDelta(f64),
    /// Neighbour count outside `1..=n`.
    KOutOfRange { k: usize, n: usize },
    /// Noise rates do not allow the ratio correction (`pi0 + pi1 >= 1`).
    RatesNotInvertible { pi0: f64, pi1: f64 },
    /// A distribution or construction parameter violated a named constraint.
    Parameter(String),
    /// Exact risk requested for a family without finite support.
    NotAtomic,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SpaceMismatch(msg) => write!(f, "point/metric mismatch: {msg}"),
            Error::NonFinite => f.write_str("coordinates must be finite"),
            Error::InvalidDataset(msg) => write!(f, "invalid dataset: {msg}"),
            Error::InvalidResponse { index, value } => {
                write!(f, "invalid response {value} at index {index}")
            }
            Error::InvalidDelta(d) => write!(f, "delta must lie in (0, 1), got {d}"),
            Error::KOutOfRange { k, n } => write!(f, "k = {k} outside 1..={n}"),
            Error::RatesNotInvertible { pi0, pi1 } => {
                write!(f, "noise rates pi0 = {pi0}, pi1 = {pi1} do not satisfy pi0 + pi1 < 1")
            }
            Error::Parameter(msg) => write!(f, "parameter constraint violated: {msg}"),
            Error::NotAtomic => f.write_str("exact risk requires a family with finite support"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}
