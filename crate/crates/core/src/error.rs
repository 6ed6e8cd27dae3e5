use thiserror::Error;

/// Errors raised by the subgroup library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown generator `{token}` for an alphabet of rank {rank}")]
    UnknownGenerator { token: String, rank: usize },

    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("alphabet mismatch: rank {left} vs rank {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("not a basis of the ambient free group: {0}")]
    NotABasis(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Fails with `AlphabetMismatch` unless both ranks agree.
pub(crate) fn same_rank(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch { left, right })
    }
}
