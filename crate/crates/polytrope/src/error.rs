use thiserror::Error;

/// Errors produced by the solvers and transforms in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The scale invariants are undefined at the center and at the surface.
    #[error("invariants are undefined for theta = {theta}, dtheta = {dtheta}; need theta > 0 and dtheta < 0")]
    DegenerateState { theta: f64, dtheta: f64 },

    /// The exponent 2/(n-1) is singular at n = 1.
    #[error("exponent 2/(n-1) is undefined at n = 1")]
    UndefinedExponent,

    #[error("no closed form is available for n = {n}; supported indices are 0, 1, 5")]
    UnsupportedIndex { n: f64 },

    #[error("xi = {xi} lies beyond the first zero at xi1 = {xi1}")]
    DomainExceeded { xi: f64, xi1: f64 },

    #[error("the radial equation is singular at xi = 0; launch from a series state")]
    SingularOrigin,

    #[error("launch radius xi0 = {xi0} exceeds the series validity bound {max}")]
    LaunchTooLarge { xi0: f64, max: f64 },

    #[error("invalid polytropic index n = {n}: {reason}")]
    InvalidIndex { n: f64, reason: &'static str },

    #[error("invalid option: {name} = {value}")]
    InvalidOption { name: &'static str, value: f64 },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("step budget of {0} exhausted before reaching a termination condition")]
    MaxSteps(usize),

    /// The reduced slope dv/du has a vanishing denominator on this locus.
    #[error("reduced slope is singular at (u, v) = ({u}, {v})")]
    SingularLocus { u: f64, v: f64 },

    #[error("start point (u, v) = ({u}, {v}) is a critical point of the flow")]
    CriticalPointStart { u: f64, v: f64 },

    #[error("trajectory launch failed: {0}")]
    LaunchFailure(String),

    /// The inward trajectory matched none of the classification conditions.
    #[error("classification inconclusive after span {t_span}; final (u, v) = ({u}, {v})")]
    Inconclusive { t_span: f64, u: f64, v: f64 },

    #[error("profile has no finite surface; supply a truncation radius")]
    MissingSurface,

    #[error("requested point {x} is outside the range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("point (u, v) = ({u}, {v}) does not lie on the trajectory")]
    NotOnTrajectory { u: f64, v: f64 },

    #[error("operation requires a regular (class E) trajectory")]
    NotRegular,
}

pub type Result<T> = std::result::Result<T, Error>;
