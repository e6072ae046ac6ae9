use crate::Model;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("n = {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("{what} = {count} exceeds the exhaustive cap {cap}")]
    WorkCapExceeded { what: &'static str, count: u128, cap: u128 },

    #[error("placement has attacking rooks in the {0} model")]
    AttackViolation(Model),

    #[error("no non-attacking placement after {0} attempts")]
    AttemptCapExceeded(u64),

    #[error("invalid {field}: {reason}")]
    Domain { field: &'static str, reason: String },

    #[error("cannot parse {what}: {reason}")]
    Parse { what: &'static str, reason: String },
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
