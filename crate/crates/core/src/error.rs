use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} degrees of freedom, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("phase point has non-finite components")]
    NonFinitePoint,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("bracket nesting exceeds {0} differentiation levels")]
    NestingTooDeep(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("rank-deficient least-squares system (condition estimate {condition:e})")]
    RankDeficient { condition: f64 },
    #[error("fit residual {residual:e} exceeds tolerance {tolerance:e}")]
    FitResidual { residual: f64, tolerance: f64 },
    #[error("exponents ({m1}, {m2}) are not commensurate with frequencies ({nu1}, {nu2})")]
    Incommensurate { m1: u32, m2: u32, nu1: f64, nu2: f64 },
    #[error("invalid axis pair ({0}, {1})")]
    InvalidPair(usize, usize),
    #[error("momentum degree estimate is not integral (slope {0})")]
    NonIntegerDegree(f64),
    #[error("step size underflow at t = {0}")]
    StepSizeUnderflow(f64),
    #[error("non-finite state at t = {0}")]
    NonFiniteState(f64),
}
