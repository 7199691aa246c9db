use thiserror::Error;

/// Errors raised by the analysis library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A documented precondition of an operation does not hold.
    #[error("domain error: {0}")]
    Domain(String),

    /// The hypothesis that makes an analysis meaningful fails for this input.
    #[error("inapplicable: {0}")]
    Inapplicable(String),

    /// Two points that must differ are equal.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("unknown space `{0}`")]
    UnknownSpace(String),

    #[error("point {point} does not belong to space `{space}`")]
    PointOutsideSpace { point: String, space: String },

    #[error("distance between {left} and {right} is not finite")]
    DistanceOverflow { left: String, right: String },

    /// The extraction schedule could not certify the cutoff for level `level`.
    #[error("schedule failure at level {level}: {detail}")]
    ScheduleFailure { level: u32, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
