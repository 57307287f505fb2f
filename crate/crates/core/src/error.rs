use thiserror::Error;

use crate::maxflow::CutCertificate;

pub type Result<T> = std::result::Result<T, FlowError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("cannot add -inf and +inf")]
    InfinityClash,
    #[error("integer overflow in finite arithmetic")]
    Overflow,
    #[error("length mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("no feasible flow (violating set deficiency {})", .0.deficiency)]
    Infeasible(CutCertificate),
    #[error("cost is unbounded below along a di-circuit of infinite capacity")]
    UnboundedCost,
    #[error("negative di-circuit present")]
    NegativeCycle(Vec<usize>),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("internal certificate failure: {0}")]
    InternalCertificateFailure(String),
    #[error("no decreasingly minimal flow exists")]
    NoDecMin(Vec<crate::existence::InfinityArc>),
    #[error("enumeration limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("enumeration needs finite bounds on every edge")]
    InfiniteBounds,
}
