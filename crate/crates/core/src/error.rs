use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not invertible")]
    NotInvertible,
    #[error("requires upper triangular")]
    NotTriangular,
    #[error("requires unipotent")]
    NotUnipotent,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("too many generators: {got} > {max}")]
    TooManyGenerators { got: usize, max: usize },
    #[error("membership undecidable")]
    MembershipUndecidable,
    #[error("zero value")]
    ZeroValue,
    #[error("dimension mismatch")]
    Dimension,
    #[error("ball size cap {0} exceeded")]
    BallCap(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("unrecognized — conjugate the input first: {0}")]
    Unrecognized(String),
}

pub type Result<T> = std::result::Result<T, Error>;
