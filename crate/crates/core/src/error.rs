use core::fmt;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A dimension was zero where at least one entry is required.
    InvalidDimension { what: &'static str },
    /// Two operands disagree on a length.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// A tunable is outside its admissible range.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// NaN or infinity where a finite value is required.
    NonFinite { what: &'static str },
    /// A time index outside the domain of a plant or reference.
    OutOfRange { what: &'static str, index: i64 },
    /// Forecast requested without any PG history.
    EmptyHistory,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension { what } => write!(f, "invalid dimension: {what} must be at least 1"),
            Error::DimensionMismatch { what, expected, found } => {
                write!(f, "dimension mismatch in {what}: expected {expected}, found {found}")
            }
            Error::InvalidParameter { name, reason } => write!(f, "invalid parameter `{name}`: {reason}"),
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::OutOfRange { what, index } => write!(f, "{what}: index {index} out of range"),
            Error::EmptyHistory => f.write_str("forecast requested with empty PG history"),
        }
    }
}

#[cfg(feature = "std")]
extern crate std;

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn ensure_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, found })
    }
}

pub(crate) fn ensure_finite(what: &'static str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}
