use thiserror::Error;

use crate::geometry::Domain;

/// Errors raised by the majorant toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MajorantError {
    #[error("point ({re}, {im}) is not interior to the {domain}")]
    OutsideDomain { re: f64, im: f64, domain: Domain },

    #[error("cannot mix a {left} point with a {right} point")]
    DomainMismatch { left: Domain, right: Domain },

    #[error("parameter `{name}` = {value} is out of range: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid dyadic index ({level}, {position})")]
    DyadicIndex { level: u32, position: u64 },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MajorantError {
    fn from(err: std::io::Error) -> Self {
        MajorantError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MajorantError>;

pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> MajorantError {
    MajorantError::Parameter {
        name,
        value,
        reason,
    }
}
