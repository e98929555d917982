use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("operands live in different parent objects")]
    ParentMismatch,
    #[error("denominator is not contained in numerator{0}")]
    NotNested(String),
    #[error("map {index} is not well defined: relation column {column} is not sent into the target relations")]
    IllDefinedMap { index: usize, column: usize },
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("naturality failure: {0}")]
    NaturalityFailure(String),
    #[error("infinite-length object: {0}")]
    InfiniteLength(String),
    #[error("inconsistent results: {0}")]
    Inconsistent(String),
    #[error("negative coordinate in Moebius inversion at {0}")]
    NegativeCoordinate(String),
    #[error("set of intervals is not down-closed: missing {0}")]
    NotDownset(String),
    #[error("order is not a linear extension of the interval poset: {0}")]
    NotLinearExtension(String),
    #[error("operation requires field coefficients")]
    NotField,
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("boundary of boundary is nonzero: cell {cell} reaches face {face} with coefficient {coefficient}")]
    BoundarySquare {
        cell: String,
        face: String,
        coefficient: String,
    },
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("group of order {order} exceeds the cap of {cap}")]
    OrderCap { order: usize, cap: usize },
    #[error("malformed group table: {0}")]
    MalformedGroup(String),
    #[error("map {index} is not a homomorphism: {detail}")]
    NotHomomorphism { index: usize, detail: String },
    #[error("schema error: {0}")]
    Schema(String),
}
