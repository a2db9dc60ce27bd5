//! Crate-wide error type.

use std::fmt;
use std::path::PathBuf;

use crate::odr::validate::Violation;

/// Errors produced by generation, fitting, parsing and I/O.
#[derive(Debug)]
pub enum Error {
    /// Input data is degenerate for the requested operation (too few points,
    /// collinear layouts, coincident points).
    DegenerateInput(String),
    /// A parameter is outside its documented domain.
    InvalidParams(String),
    /// The layout admits no roundabout satisfying the clearance constraints.
    Infeasible(String),
    /// A generated network failed post-generation link validation.
    Validation(Vec<Violation>),
    /// The input is not well-formed XML.
    MalformedXml {
        line: u32,
        col: u32,
        message: String,
    },
    /// A mandatory attribute is absent.
    MissingAttribute {
        element: String,
        attribute: String,
        line: u32,
    },
    /// An attribute is present but cannot be interpreted.
    BadAttribute {
        element: String,
        attribute: String,
        line: u32,
        message: String,
    },
    /// The document uses a reference-line primitive outside the supported set.
    UnsupportedGeometry { name: String, line: u32 },
    /// The document is well-formed XML but not a usable network description.
    InvalidDocument { message: String, line: u32 },
    /// The network contains no closed circular chain.
    NoRing(String),
    /// Filesystem failure, annotated with the offending path.
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateInput(msg) => write!(f, "degenerate input: {msg}"),
            Error::InvalidParams(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Infeasible(msg) => write!(f, "infeasible layout: {msg}"),
            Error::Validation(violations) => {
                write!(f, "network validation failed ({} violation", violations.len())?;
                if violations.len() != 1 {
                    write!(f, "s")?;
                }
                write!(f, ")")?;
                for v in violations {
                    write!(f, "\n  {v}")?;
                }
                Ok(())
            }
            Error::MalformedXml { line, col, message } => {
                write!(f, "malformed XML at line {line}, column {col}: {message}")
            }
            Error::MissingAttribute {
                element,
                attribute,
                line,
            } => write!(
                f,
                "missing attribute '{attribute}' on <{element}> at line {line}"
            ),
            Error::BadAttribute {
                element,
                attribute,
                line,
                message,
            } => write!(
                f,
                "bad attribute '{attribute}' on <{element}> at line {line}: {message}"
            ),
            Error::UnsupportedGeometry { name, line } => {
                write!(f, "unsupported geometry '{name}' at line {line}")
            }
            Error::InvalidDocument { message, line } => {
                write!(f, "invalid document at line {line}: {message}")
            }
            Error::NoRing(msg) => write!(f, "no ring: {msg}"),
            Error::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
