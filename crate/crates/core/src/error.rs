use alloc::string::String;
use core::fmt;

/// Errors raised by the code constructions and samplers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    Domain(String),
    /// Input length does not match what the key or scheme expects.
    Length { expected: usize, actual: usize },
    /// A construction precondition does not hold (e.g. alpha <= delta).
    Precondition(String),
    /// Unknown strategy or inconsistent configuration.
    Config(String),
    /// Malformed serialized input.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "parameter out of domain: {msg}"),
            Error::Length { expected, actual } => {
                write!(f, "length mismatch: expected {expected} bits, got {actual}")
            }
            Error::Precondition(msg) => write!(f, "precondition failed: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<(), Error> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Length { expected, actual })
    }
}

pub(crate) fn check_prob(name: &str, p: f64) -> Result<(), Error> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(alloc::format!(
            "{name} = {p} is not a probability"
        )))
    }
}
