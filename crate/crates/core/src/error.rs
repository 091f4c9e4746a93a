//! Error type shared by every module of the library.
//!
//! All fallible operations return [`Result`]. Numerical failures are explicit
//! variants carrying enough context to act on (requested vs. achieved
//! tolerance, the offending point, …) rather than silent NaNs.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the numerics kernel, the curvature
/// oracle and the orbit solvers.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// A root-finding bracket whose endpoints do not straddle a sign change.
    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo:e} and f(hi) = {f_hi:e} do not straddle zero")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// A bracket whose endpoints are not ordered `lo < hi`.
    #[error("degenerate bracket: lo = {lo} is not strictly below hi = {hi}")]
    DegenerateBracket { lo: f64, hi: f64 },

    /// Adaptive step control drove the step size below the representable floor.
    #[error("step size underflow at t = {t} (h = {step:e}); tolerances too tight or the right-hand side is singular")]
    StepSizeUnderflow { t: f64, step: f64 },

    /// The integrator produced a non-finite state component.
    #[error("non-finite state at t = {t} during integration")]
    NonFiniteState { t: f64 },

    /// Adaptive quadrature ran out of budget before reaching the target.
    #[error("quadrature tolerance not reached: requested {requested:e}, achieved {achieved:e} after {intervals} intervals")]
    QuadratureBudget { requested: f64, achieved: f64, intervals: usize },

    /// An evaluation time outside the sampled range of a trajectory.
    #[error("time {t} outside trajectory range [{t0}, {t1}]")]
    OutsideTrajectory { t: f64, t0: f64, t1: f64 },

    /// Requested period lies at or below the small-oscillation limit, where no
    /// closed orbit of that period exists.
    #[error("period {requested} is at or below the threshold {threshold} (n = {dim}); no nonconstant periodic solution exists there")]
    BelowThreshold { dim: u32, requested: f64, threshold: f64 },

    /// An energy level outside the open window of closed orbits.
    #[error("energy {energy} outside the closed-orbit window ({lo:e}, {hi:e})")]
    EnergyOutsideWindow { energy: f64, lo: f64, hi: f64 },

    /// A conformal factor (or warp) that fails the positivity requirement.
    #[error("scalar factor must stay positive: value {value:e} at t = {t}")]
    NonPositiveFactor { t: f64, value: f64 },

    /// A periodic evaluator whose endpoint values do not match.
    #[error("periodicity violation: |f(0) - f(T)| = {mismatch:e} exceeds {tolerance:e}")]
    NotPeriodic { mismatch: f64, tolerance: f64 },

    /// Derivative evaluators inconsistent with the value evaluator.
    #[error("derivative evaluator of order {order} disagrees with finite differences by {deviation:e} at t = {t}")]
    InconsistentDerivative { order: usize, t: f64, deviation: f64 },

    /// Metric matrix failed the symmetric positive-definiteness check.
    #[error("metric not positive definite at {point:?}")]
    MetricNotPositiveDefinite { point: Vec<f64> },

    /// Metric matrix too ill-conditioned for finite differencing.
    #[error("metric nearly singular at {point:?} (condition estimate {condition:e})")]
    MetricNearSingular { point: Vec<f64>, condition: f64 },

    /// A chart point outside the declared domain (or too close to its edge for
    /// the finite-difference stencils to fit).
    #[error("point {point:?} outside the usable chart domain (needs clearance {clearance:e} on axis {axis})")]
    OutsideChart { point: Vec<f64>, axis: usize, clearance: f64 },

    /// Bad user-supplied parameter (dimension too small, nonpositive period, …).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A constructed orbit violating one of its guarantees (residual bound,
    /// energy flatness, positivity).
    #[error("orbit validation failed: {0}")]
    OrbitValidation(String),

    /// The pullback identity certificate of a change of variables failed.
    #[error("reparametrization certificate failed: {0}")]
    ReparametrizationCertificate(String),

    /// Malformed orbit artifact on disk.
    #[error("malformed orbit file: {0}")]
    MalformedOrbitFile(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Underlying JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Convenience constructor for parameter validation failures.
    pub fn invalid_parameter(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
