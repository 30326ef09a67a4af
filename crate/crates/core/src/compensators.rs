//! The four compensator functions and the bounded factor `a`.
//!
//! A compensator is an elementary expression in `(x, nu)` that cannot be
//! expanded uniformly across the bifurcation. All four are evaluated through
//! the stable primitives `exp_m1` / `ln_1p`, and the `nu = 0` case is an
//! exact analytic branch rather than a small-`nu` threshold, so the
//! parabolic values are bit-reproducible and the `nu -> 0` approach is
//! continuous to machine precision.

/// Ecalle-Roussarie compensator `(x^(-nu) - 1)/nu`, with `-log x` at `nu = 0`.
///
/// Requires `x > 0`.
pub fn omega(x: f64, nu: f64) -> f64 {
    debug_assert!(x > 0.0);
    if nu == 0.0 {
        return -x.ln();
    }
    (-nu * x.ln()).exp_m1() / nu
}

/// Inverse compensator `log(1 + nu/x)/nu`, with `1/x` at `nu = 0`.
///
/// Requires `x > 0` and `x + nu > 0`.
pub fn alpha(x: f64, nu: f64) -> f64 {
    debug_assert!(x > 0.0 && x + nu > 0.0);
    if nu == 0.0 {
        return 1.0 / x;
    }
    (nu / x).ln_1p() / nu
}

/// Square root-type compensator `sqrt(x + nu) - sqrt(nu)`, computed as
/// `x / (sqrt(x + nu) + sqrt(nu))` to avoid cancellation; equals `sqrt(x)`
/// at `nu = 0`.
///
/// Requires `x >= 0` and `nu >= 0`.
pub fn eta_tilde(x: f64, nu: f64) -> f64 {
    debug_assert!(x >= 0.0 && nu >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    x / ((x + nu).sqrt() + nu.sqrt())
}

/// Compensator `1/(x + nu)`. Requires `x + nu > 0`.
pub fn kappa(x: f64, nu: f64) -> f64 {
    debug_assert!(x + nu > 0.0);
    1.0 / (x + nu)
}

/// The bounded factor `(1 - exp(-nu))/nu`, with `a(0) = 1`.
pub fn a_of(nu: f64) -> f64 {
    if nu == 0.0 {
        return 1.0;
    }
    -(-nu).exp_m1() / nu
}
