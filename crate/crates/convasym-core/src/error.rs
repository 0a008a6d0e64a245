use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Requested term lies beyond the stored prefix of a custom sequence.
    IndexOutOfRange { index: usize, len: usize },
    /// Exhaustive work capped to keep cost bounded (enumeration, node counts).
    CapExceeded { what: &'static str, requested: usize, cap: usize },
    /// Argument outside a function's domain.
    OutOfDomain { what: &'static str, value: f64 },
    /// A closed form that must produce an integer did not; arithmetic bug.
    NonIntegral { what: &'static str },
    /// Series truncation cannot certify the requested accuracy.
    TailBound { tail: f64, limit: f64 },
    /// The saddle equation has no interior root resolvable away from the
    /// radius of convergence.
    SaddleAtRadius { kappa: f64 },
    /// Joint statistics over walks of unequal or wrong length.
    LengthMismatch { expected: usize, got: usize },
    /// Tail event has zero probability; no finite exponent.
    ZeroProbability,
    /// Custom sequences must be nonempty and start with a_0 = 1.
    BadCustomSequence,
    /// A bracketing root finder found no sign change.
    NoBracket { what: &'static str },
    /// A solver finished but its residual failed the contract.
    Residual { what: &'static str, residual: f64 },
    /// Operation not defined for this input kind (e.g. a custom series with
    /// no known radius, or an ensemble without an explicit rate).
    Unsupported { what: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndexOutOfRange { index, len } => {
                write!(f, "term index {index} beyond stored prefix of length {len}")
            }
            Error::CapExceeded { what, requested, cap } => {
                write!(f, "{what}: requested {requested} exceeds cap {cap}")
            }
            Error::OutOfDomain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::NonIntegral { what } => write!(f, "{what}: non-integral result"),
            Error::TailBound { tail, limit } => {
                write!(f, "series tail bound {tail:e} exceeds limit {limit:e}")
            }
            Error::SaddleAtRadius { kappa } => {
                write!(f, "saddle at radius for kappa = {kappa}; no interior root")
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "walk length mismatch: expected {expected}, got {got}")
            }
            Error::ZeroProbability => write!(f, "event has zero probability"),
            Error::BadCustomSequence => {
                write!(f, "custom sequence must be nonempty with a_0 = 1")
            }
            Error::NoBracket { what } => write!(f, "{what}: no sign change bracketed"),
            Error::Residual { what, residual } => {
                write!(f, "{what}: residual {residual:e} above tolerance")
            }
            Error::Unsupported { what } => write!(f, "unsupported: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
