use thiserror::Error;

/// Errors from grid, field, multiplier and Littlewood–Paley operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field is attached to a {found} grid, expected {expected}")]
    GridMismatch { expected: String, found: String },
    #[error("expected {expected} components, found {found}")]
    ComponentMismatch { expected: usize, found: usize },
    #[error("component {component} has {found} samples, expected {expected}")]
    SampleCount { component: usize, expected: usize, found: usize },
    #[error("non-finite sample in component {component} at index {index}")]
    NonFinite { component: usize, index: usize },
    #[error("dyadic range J_max = {j_max} needs 2^(J_max+1) <= N/2 = {nyquist}")]
    DyadicRangeTooLarge { j_max: usize, nyquist: usize },
    #[error("dyadic index {j} outside [{min}, {j_max}]")]
    DyadicIndexOutOfRange { j: i32, min: i32, j_max: usize },
    #[error("annulus around 2^{j} reaches past the Nyquist frequency {nyquist}")]
    AnnulusExceedsNyquist { j: u32, nyquist: usize },
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
}

/// Errors from the LANS-alpha solver.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("negative time t = {0}")]
    NegativeTime(f64),
    #[error("time {t} lies outside the trajectory support [{start}, {end}]")]
    OutsideSupport { t: f64, start: f64, end: f64 },
    #[error("solution blew up at t = {t}: L2 norm {norm:e} exceeds {threshold:e}")]
    BlowUp { t: f64, norm: f64, threshold: f64 },
    #[error("parameter tuple is not admissible: {0}")]
    Inadmissible(String),
    #[error("Picard iteration did not converge after {} iterations", .0.iterations)]
    NotConverged(Box<crate::solver::picard::PicardReport>),
    #[error(transparent)]
    Field(#[from] FieldError),
}
