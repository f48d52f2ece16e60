use thiserror::Error;

/// Errors raised by state construction and the erasure/catalysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid energy ladder: {0}")]
    InvalidLadder(String),

    #[error("invalid joint state: {0}")]
    InvalidJointState(String),

    #[error("state is not thermal for the given ladder (max deviation {deviation:.3e})")]
    NotThermal { deviation: f64 },

    #[error("target entropy {target} outside the reachable range (0, {max}]")]
    EntropyOutOfRange { target: f64, max: f64 },

    #[error("zero population at system level {system}, environment level {environment}")]
    ZeroPopulation { system: usize, environment: usize },

    #[error("no equal-transfer catalyst of dimension {dim}: {reason}")]
    CatalystInfeasible { dim: usize, reason: String },

    #[error("uncorrelated state, no catalytic gain possible")]
    Uncorrelated,

    #[error("marginal preservation violated: {0}")]
    MarginalViolation(String),

    #[error("state is not full rank: {0}")]
    NotFullRank(String),

    #[error("no periodicity condition holds for the block-sorting permutation")]
    PeriodicityViolated,

    #[error("block-sorted output is not a product state (deviation {0:.3e})")]
    NotProduct(f64),

    #[error("truncation {given} leaves thermal tail {tail:.3e}; need at least {required} levels")]
    TruncationTooSmall { given: usize, required: usize, tail: f64 },

    #[error("dimension {dim} exceeds enumeration cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("coefficient undefined: {0}")]
    Undefined(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
