use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument is outside its admissible domain.
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// A covariance matrix produced a symplectic eigenvalue below one.
    NonPhysical { which: &'static str, value: f64 },
    /// I_AB is zero, so the ratio I_E / I_AB is undefined.
    ZeroMutualInformation,
    /// A degree distribution is malformed or cannot be realized.
    Distribution(String),
    /// A parity-check graph violates a structural invariant.
    Graph(String),
    /// Input vector has the wrong length.
    Length { expected: usize, found: usize },
    /// An LLR is NaN or infinite.
    NonFiniteLlr { index: usize },
    /// A stopping rule that could never terminate or never run.
    StoppingRule(&'static str),
    /// The WER cap or V_A window excluded every operating point.
    NoFeasiblePoint,
    /// Empty input where at least one element is required.
    Empty(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain {
                name,
                value,
                expected,
            } => write!(f, "{name} = {value} is out of range (expected {expected})"),
            Error::NonPhysical { which, value } => {
                write!(f, "non-physical covariance matrix: {which} = {value}")
            }
            Error::ZeroMutualInformation => {
                f.write_str("mutual information is zero, required efficiency is undefined")
            }
            Error::Distribution(msg) => write!(f, "invalid degree distribution: {msg}"),
            Error::Graph(msg) => write!(f, "invalid parity-check graph: {msg}"),
            Error::Length { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::NonFiniteLlr { index } => write!(f, "LLR at index {index} is not finite"),
            Error::StoppingRule(msg) => write!(f, "invalid stopping rule: {msg}"),
            Error::NoFeasiblePoint => f.write_str("no feasible operating point"),
            Error::Empty(what) => write!(f, "{what} must not be empty"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        expected,
    }
}
