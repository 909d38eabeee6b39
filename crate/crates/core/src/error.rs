use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("mode (0,0) is excluded: fields are mean-free")]
    ZeroMode,
    #[error("mode ({k1},{k2}) lies outside resolution N={n}")]
    ModeOutOfRange { k1: i64, k2: i64, n: usize },
    #[error("inconsistent conjugate pair at ({k1},{k2}): conj(u_k) != -u_-k")]
    InconsistentConjugatePair { k1: i64, k2: i64 },
    #[error("mode ({k1},{k2}) listed twice")]
    DuplicateMode { k1: i64, k2: i64 },
    #[error("resolution mismatch: {0}")]
    ResolutionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("oracle refuses N={n} (cap {cap})")]
    OracleCapExceeded { n: usize, cap: usize },
    #[error("inadmissible parameters: condition {0} fails")]
    InadmissibleParams(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("non-finite coefficient at t={time}")]
    NonFiniteField { time: f64 },
    #[error("no positive existence time satisfies the smallness bound (data norm {data_norm})")]
    PiccViolation { data_norm: f64 },
    #[error(
        "Picard iteration did not converge after {iterations} iterations (last factor {factor})"
    )]
    NonConvergent { iterations: usize, factor: f64 },
    #[error("cutoff exhausted at K={cutoff} without meeting the splitting threshold")]
    CutoffExhausted { cutoff: i64 },
    #[error("smallness violated for {which}: {value} >= {threshold}")]
    SmallnessViolation {
        which: String,
        value: f64,
        threshold: f64,
    },
    #[error("forcing mode ({k1},{k2}) is not resolved at N={n}")]
    UnresolvedForcing { k1: i64, k2: i64, n: usize },
}
