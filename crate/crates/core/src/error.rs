use thiserror::Error;

pub type Result<T> = std::result::Result<T, FrameError>;

/// Which precondition of the perturbation-witness construction failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Needs `M < N(N+1)/2`.
    Redundancy,
    /// Needs the base frame to be scalable.
    Scalable,
    /// Needs the outer products of the base frame to be linearly independent.
    IndependentOuterProducts,
    /// Needs `N >= 2`.
    Dimension,
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Hypothesis::Redundancy => "frame has M >= N(N+1)/2 vectors",
            Hypothesis::Scalable => "frame is not scalable",
            Hypothesis::IndependentOuterProducts => "outer products are linearly dependent",
            Hypothesis::Dimension => "dimension N < 2",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a frame: rank {rank} < dimension {n}")]
    NotAFrame { rank: usize, n: usize },
    #[error("matrix is not orthogonal (|T^T T - I|_F = {deviation:e})")]
    NotOrthogonal { deviation: f64 },
    #[error("dimension {0} is too small, need N >= 2")]
    DimensionTooSmall(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("index {index} out of range for {len} vectors")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("subset contains no nonzero frame vector")]
    EmptySubset,
    #[error("frame vector {0} is zero")]
    ZeroColumn(usize),
    #[error("weights do not verify: {0}")]
    WeightsDoNotVerify(String),
    #[error("separator does not verify: margin {0:e}")]
    SeparatorDoesNotVerify(f64),
    #[error("LP solver failure: {0}")]
    LpNumericalFailure(String),
    #[error("weight system is infeasible")]
    Infeasible,
    #[error("not strictly scalable (max-min weight {s_star:e})")]
    NotStrictlyScalable { s_star: f64 },
    #[error("subset of size {size} exceeds the exact budget {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("frame is not scalable")]
    NotScalable,
    #[error("support reduction stalled at support {0}")]
    NumericalStall(usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(Hypothesis),
    #[error("witness verification failed: {0}")]
    WitnessVerificationFailed(String),
    #[error("exact and floating decisions disagree: {0}")]
    ExactInconsistency(String),
}
