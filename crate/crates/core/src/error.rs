//! Error types shared across the crate.

use crate::expr::ExprError;
use thiserror::Error;

/// Errors reported by field, flow, orbit and fitting operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("point ({x}, {nu}) outside the analysis box")]
    OutsideBox { x: f64, nu: f64 },

    #[error("model denominator 1 + rho(nu)*x vanishes on the analysis box near x = {x}")]
    ModelDenominatorVanishes { x: f64 },

    #[error("no root in box for nu = {nu}")]
    NoRootInBox { nu: f64 },

    #[error("no attracting fixed point below x0 = {x0} for nu = {nu}")]
    NoAttractingFixedPoint { x0: f64, nu: f64 },

    #[error("bracket failure: {context} (bracket [{lo}, {hi}], f(lo) = {flo}, f(hi) = {fhi})")]
    BracketFailure {
        context: &'static str,
        lo: f64,
        hi: f64,
        flo: f64,
        fhi: f64,
    },

    #[error("monotonicity violated on bracket [{lo}, {hi}]")]
    MonotonicityViolated { lo: f64, hi: f64 },

    #[error("y = {y} above range of the displacement on the bracket (max {max})")]
    AboveRange { y: f64, max: f64 },

    #[error("fixed point x = {x} inside integration interval [{a}, {b}]")]
    FixedPointInInterval { x: f64, a: f64, b: f64 },

    #[error("quadrature failed to reach tolerance {tol:e} (error estimate {err:e})")]
    QuadratureTolerance { tol: f64, err: f64 },

    #[error("ODE step size underflow at x = {x}, t = {t}")]
    StepSizeUnderflow { x: f64, t: f64 },

    #[error(
        "jet extrapolation non-convergence for coefficient {index}: last two estimates {prev:e}, {last:e}"
    )]
    JetNonConvergence { index: usize, prev: f64, last: f64 },

    #[error("jet linear coefficient {c1:e} disagrees with 1 - exp(Fx(x1)) = {expected:e}")]
    JetMultiplierMismatch { c1: f64, expected: f64 },

    #[error("orbit too short for epsilon = {epsilon}: smallest gap {min_gap:e} exceeds 2*epsilon")]
    OrbitTooShort { epsilon: f64, min_gap: f64 },

    #[error("insufficient samples: {got} provided, {needed} required ({detail})")]
    InsufficientSamples {
        got: usize,
        needed: usize,
        detail: String,
    },

    #[error("ill-conditioned design (condition {condition:e} > 1e12)")]
    IllConditioned { condition: f64 },

    #[error("insufficient decade span: {got:.3} decades, {needed:.1} required")]
    InsufficientDecadeSpan { got: f64, needed: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
