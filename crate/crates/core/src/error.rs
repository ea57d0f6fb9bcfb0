use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("oracle too large: size {size} exceeds cap {cap}")]
    OracleTooLarge { size: usize, cap: usize },
    #[error("size cap exceeded: degree {degree} exceeds cap {cap}")]
    CapExceeded { degree: usize, cap: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not injective: matrix has rank {rank} but {cols} columns")]
    NotInjective { rank: usize, cols: usize },
    #[error("no flattening for a constant atom")]
    NoFlattening,
    #[error("unsupported functor: {0}")]
    UnsupportedFunctor(String),
    #[error("unknown variety: {0}")]
    UnknownVariety(String),
    #[error("parametrization-only variety: {0} has no equations")]
    ParametrizationOnly(String),
    #[error("variety {0} has no parametrization")]
    NoParametrization(String),
    #[error("point is not a member of {0}")]
    NotMember(String),
    #[error("dimension law undefined for {name} at n = {n}")]
    DimLawUndefined { name: String, n: usize },
    #[error("outside resolution's isomorphism locus: {0}")]
    OutsideIsomorphismLocus(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
}

pub type Result<T> = std::result::Result<T, Error>;
