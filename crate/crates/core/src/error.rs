//! Crate-wide error type.
//!
//! Variants are grouped by how a front end should report them: input or
//! domain problems, numerical failures, and violations of the hypotheses
//! under which the trace formula holds.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Generator traces do not satisfy the Fricke relation x²+y²+z² = xyz.
    #[error("fricke-violation: x²+y²+z² − xyz = {residual:.3e} for traces ({x}, {y}, {z})")]
    FrickeViolation { x: f64, y: f64, z: f64, residual: f64 },

    /// A trace coordinate at or below 2 cannot come from a discrete free group
    /// of the kind constructed here.
    #[error("non-discreteness guard: trace coordinate {0} ≤ 2")]
    NonDiscrete(f64),

    /// Word enumeration met an elliptic class; the groups in scope are
    /// torsion-free, so this indicates invalid input data.
    #[error("elliptic class encountered (|tr| = {0} < 2); surface data is not torsion-free")]
    EllipticClass(f64),

    /// The adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: err_bound {err_bound:.3e} > tolerance {tol:.3e}")]
    QuadratureNonConvergence { err_bound: f64, tol: f64 },

    /// A least-squares fit failed or its residual exceeded the configured bound.
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    /// The enumerated spectrum is not certified far enough for the request.
    #[error("spectrum certified only up to {watermark:.6}, but {requested:.6} was requested")]
    WatermarkTooLow { watermark: f64, requested: f64 },

    /// The spin structure fails ε = −1 on some primitive parabolic or pinched
    /// class, so the formula being evaluated does not apply.
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    /// Evaluation point too close to a pole of the continued function.
    #[error("pole proximity: s = {s} is within {distance:.3e} of a pole")]
    PoleProximity { s: num_complex::Complex64, distance: f64 },

    /// Two independent evaluation routes disagreed beyond tolerance.
    #[error("internal cross-check failed: {0}")]
    CrossCheckFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
