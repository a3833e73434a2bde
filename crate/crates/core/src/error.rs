use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("expansion order {hint} is too small, at least {needed} terms are needed")]
    InsufficientOrder { hint: usize, needed: usize },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("requested order {0} exceeds the supported expansion order")]
    OrderTooLarge(usize),
    #[error("malformed chart: {0}")]
    MalformedChart(String),
    #[error("integrability failure: {0}")]
    Integrability(String),
    #[error("series division failed: {0}")]
    DivisionFailed(String),
    #[error("point is not semisimple: {0}")]
    NotSemisimple(String),
    #[error("frame breakdown: {0}")]
    FrameBreakdown(String),
    #[error("coincident canonical coordinates")]
    CoincidentCoordinates,
    #[error("root finding did not converge to {0:e}")]
    NoConvergence(f64),
    #[error("step size underflow at path parameter {0}")]
    StepUnderflow(f64),
    #[error("tolerance {0:e} not achievable")]
    Tolerance(f64),
    #[error("charge d = 1 is a pole of the central charge formula")]
    ChargePole,
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("branch tracking failed: {0}")]
    BranchTracking(String),
    #[error("precision insufficient: {0}")]
    Precision(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("schema violation: {0}")]
    Schema(String),
}

impl Error {
    /// Numeric failures (tolerances, caustics, convergence) as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NotSemisimple(_)
                | Error::FrameBreakdown(_)
                | Error::CoincidentCoordinates
                | Error::NoConvergence(_)
                | Error::StepUnderflow(_)
                | Error::Tolerance(_)
                | Error::Singular(_)
                | Error::BranchTracking(_)
                | Error::Precision(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
