use thiserror::Error;

/// Errors raised by the library. Every variant maps onto one of two
/// caller-facing classes: bad input ([`Error::is_validation`]) or an
/// exceeded resource guard ([`Error::is_resource_limit`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: expected a power-of-two length of at least 2, got {len}")]
    NotPowerOfTwo { len: usize },

    #[error("dimension mismatch: {what} has {found} sites, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{what} is limited to n <= {limit} (requested n = {requested})")]
    ResourceLimit {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("no optimum defined: alpha * conj(beta) = 0, every setting yields 0")]
    NoOptimum,

    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }

    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::ResourceLimit { .. } | Error::Internal(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
