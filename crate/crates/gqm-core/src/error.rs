use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid generator index {index} for a group with {count} generators")]
    InvalidGenerator { index: usize, count: usize },
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("defect bound must be positive")]
    NonpositiveDefect,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("centrality violated: {0}")]
    CentralityViolated(String),
    #[error("linear program is infeasible on the given support")]
    Infeasible,
    #[error("missing value: {0}")]
    MissingValue(String),
    #[error("malformed complex: {0}")]
    MalformedComplex(String),
    #[error("chain boundary does not match the target")]
    BoundaryMismatch,
    #[error("chain has non-integral coefficients")]
    NonIntegral,
    #[error("commutator product does not reproduce the target")]
    ProductMismatch,
    #[error("second commutator argument is not in the normal subgroup")]
    NonNormalArgument,
    #[error("counting pattern is empty")]
    EmptyPattern,
    #[error("no defect upper bound available")]
    MissingDefectBound,
    #[error("sample element is not in the normal subgroup")]
    NonNormalSample,
    #[error("automorphism list is not closed under composition")]
    NotClosed,
    #[error("supplied map is not a transversal")]
    NotTransversal,
    #[error("coset space is not finite")]
    InfiniteCosetSpace,
    #[error("invalid group specification: {0}")]
    InvalidSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
