use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid party system: {0}")]
    InvalidParties(String),

    #[error("party systems do not match: {0}")]
    SystemMismatch(String),

    #[error("subsets overlap: {0}")]
    Overlap(String),

    #[error("scale mismatch: {0}")]
    ScaleMismatch(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension guard exceeded: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("generator {0} is dependent on the preceding generators")]
    DependentGenerator(usize),

    #[error("stabiliser group is not maximal: {k} generators on {n} qudits")]
    NotMaximal { k: usize, n: usize },

    #[error("inconsistent phase assignment: projector vanishes")]
    InconsistentPhases,

    #[error("invalid stabiliser data: {0}")]
    Stabiliser(String),

    #[error("invalid group data: {0}")]
    Group(String),

    #[error("subgroup is not normal: {0}")]
    NotNormal(String),

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("cone is not pointed (constraint rank {rank} < dimension {dim})")]
    NotPointed { rank: usize, dim: usize },

    #[error("cone error: {0}")]
    Cone(String),

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("unknown tag: {0}")]
    UnknownTag(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sampling gave up after {0} attempts")]
    RetryCap(usize),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
