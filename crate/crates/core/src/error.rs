use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: String, reason: String },

    #[error("unbounded region: {0}")]
    UnboundedRegion(String),

    #[error("region is empty")]
    EmptyRegion,

    #[error("unsupported bound `{bound}` for protocol `{protocol}`: {reason}")]
    UnsupportedBound {
        protocol: String,
        bound: String,
        reason: String,
    },

    #[error("enumeration of {count} input tuples exceeds the limit of {limit}")]
    ResourceLimit { count: u128, limit: u128 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
