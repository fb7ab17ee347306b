use thiserror::Error;

use crate::scalar::Rational;

pub type Result<T> = std::result::Result<T, Error>;

/// Progress reached before a budget cut an enumeration short.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub done: u64,
    pub total: u64,
}

impl std::fmt::Display for Progress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{} minors", self.done, self.total)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("operands live in different quadratic fields (radicands {0} and {1})")]
    MixedRadicand(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("unsupported extension degree {0} (only 1 and 2)")]
    UnsupportedDegree(u32),
    #[error("{0} is not a prime power p or p^2")]
    NotPrimePower(u64),
    #[error("not a symmetric 2-design: {reason}")]
    NotADesign { reason: String, witness: Vec<usize> },
    #[error("q = {q} is not congruent to {expected} mod 4")]
    BadResidueClass { q: u64, expected: u64 },
    #[error("matrix is not normalized (first row and column must be all +1)")]
    NotNormalized,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("not a real Hadamard matrix: {0}")]
    NotHadamard(String),
    #[error("not a conference matrix: {0}")]
    NotConference(String),
    #[error("unsupported order {order}: {reason}")]
    BadOrder { order: usize, reason: String },
    #[error("entry ({0}, {1}) is not unimodular")]
    NotUnimodular(usize, usize),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("design parameters do not induce a complex Hadamard matrix: Re[a] = {0} < -1")]
    Infeasible(Rational),
    #[error("({v}, {k}, {lambda}) is not a symmetric 2-design parameter triple")]
    BadParameters { v: u64, k: u64, lambda: u64 },
    #[error("budget exceeded after {0}")]
    BudgetExceeded(Progress),
    #[error("minor duality violated: {0}")]
    DualityViolation(String),
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("invalid equivalence move: {0}")]
    InvalidMove(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
