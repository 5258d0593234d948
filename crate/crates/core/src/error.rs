use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("the zero polynomial has no well-defined real-root count")]
    ZeroPolynomial,
    #[error("entries live in different number fields")]
    MixedNumberFields,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("pencil is outside the catalogued sizes (m, n <= 4)")]
    OutOfCatalog,
    #[error("pencil has a nonempty singular part")]
    SingularPart,
    #[error("pencil is not absolutely nonsingular")]
    NotInC,
    #[error("invalid ranks: {0}")]
    InvalidRanks(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
