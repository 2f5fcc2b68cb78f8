//! Crate-wide error type.
//!
//! Errors are grouped by how the command line layer maps them to exit codes:
//! configuration (bad input data), domain (mathematically invalid request),
//! resource (a configured cap was exceeded), and invariant (an internal
//! consistency check failed — always a bug or a falsified assumption).

use thiserror::Error;

/// All errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or mutually inconsistent input data.
    #[error("configuration: {0}")]
    Config(String),

    /// Structurally valid input outside the mathematical domain of the
    /// operation (e.g. a divisor that is not torsion, a pairing that is not
    /// well defined on the given generators).
    #[error("domain: {0}")]
    Domain(String),

    /// A resource cap (enumeration size, truncation, recursion depth) was
    /// exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// An internal invariant failed. These indicate bugs, not bad input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
