use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

/// Every failure the library reports. Solver failures carry the stage that
/// gave up so a run report can name it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for N={n}")]
    OutOfRange { vertex: usize, n: usize },
    #[error("quadruple {0:?} repeats a vertex")]
    DegenerateEdge([usize; 4]),
    #[error("need at least 4 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("cycle needs at least 5 vertices, got {0}")]
    TooShort(usize),
    #[error("N={n} exceeds the cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error("min codegree {min_codegree} below required {required}")]
    ThresholdUnreachable { min_codegree: usize, required: usize },
    #[error("min codegree {min_codegree} below threshold {required}")]
    ThresholdNotMet { min_codegree: usize, required: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("{aabb} AABB edges exceed the near-extremal bound {bound}")]
    NotNearExtremal { aabb: u64, bound: u64 },
    /// Tallies count the first failure of each attempt: too few vertices on
    /// a side, then a missing H₀ quadruple meeting 0, 1, 2 or 3 of the end
    /// triple's vertices.
    #[error("budget of {attempts} attempts exhausted (failure tallies {tallies:?})")]
    BudgetExhausted { attempts: usize, tallies: [usize; 5] },
    #[error("{stage}: {detail}")]
    ConstructionFailed { stage: &'static str, detail: String },
    #[error("3-graph too sparse for the requested density")]
    DensityTooLow,
    #[error("{count} medium vertices exceed the budget {budget}")]
    TooManyMediums { count: usize, budget: usize },
    #[error("{count} anarchists exceed the budget {budget}")]
    BudgetExceeded { count: usize, budget: usize },
    #[error("vertices still atypical after transfer: {0:?}")]
    ReclassificationFailed(Vec<usize>),
    #[error("dense 3-graph search exhausted")]
    SearchExhausted,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("no perfect matching on the {side} side ({matched} of {needed})")]
    MatchingFailed { side: &'static str, matched: usize, needed: usize },
    #[error("side counts outside envelope: {0}")]
    EnvelopeViolated(String),
    #[error("(3*{n1} - {n2} + 6) / 8 is not an integer")]
    NotIntegral { n1: usize, n2: usize },
    #[error("switcher case analysis exhausted: {0}")]
    CaseExhausted(String),
}
