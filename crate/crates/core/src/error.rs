use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("arm is not a member of the arm set (violation {violation:.3e})")]
    NotInSet { violation: f64 },

    #[error("arm set is rank deficient: achieved rank {rank} of {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("hypercube of dimension {dim} has too many extreme points to enumerate (limit 20)")]
    TooManyExtremePoints { dim: usize },

    #[error("SBAR undefined: arm set is not strongly convex")]
    SbarUndefined,

    #[error("operation requires a {expected} arm set")]
    WrongArmSet { expected: &'static str },

    #[error("unsupported polytope representation: {0}")]
    UnsupportedPolytope(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular Gram matrix (condition number {condition:.3e})")]
    Singular { condition: f64 },

    #[error("reward must be finite, got {0}")]
    NonFiniteReward(f64),

    #[error("weighted norm is negative beyond round-off: {0:.3e}")]
    NegativeWeightedNorm(f64),

    #[error("uncertainty radius undefined at t = {t} (needs t >= 2)")]
    RadiusUndefined { t: usize },

    #[error("policy protocol violation: {0}")]
    Protocol(String),

    #[error("policy/geometry mismatch: {0}")]
    PolicyMismatch(String),

    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}
