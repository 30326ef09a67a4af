//! Bracketed root finding for monotone functions.
//!
//! The workhorse is bisection, optionally accelerated by Newton steps that
//! are only accepted while they stay strictly inside the current bracket, so
//! the bisection convergence guarantee is never lost.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Find `x` in `[lo, hi]` with `f(x) = 0`, assuming `f(lo)` and `f(hi)`
/// have opposite signs (zero endpoint values are accepted immediately).
///
/// Iterates until the bracket width drops below
/// `xtol + 4 eps |x|` or the residual underflows.
pub fn solve_bracketed<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    xtol: f64,
    context: &'static str,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    solve_impl(&mut f, None, lo, hi, xtol, context)
}

/// Same as [`solve_bracketed`] but uses `df` for Newton acceleration.
pub fn solve_bracketed_with_derivative<F, D>(
    mut f: F,
    mut df: D,
    lo: f64,
    hi: f64,
    xtol: f64,
    context: &'static str,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    solve_impl(&mut f, Some(&mut df), lo, hi, xtol, context)
}

fn solve_impl(
    f: &mut dyn FnMut(f64) -> f64,
    mut df: Option<&mut dyn FnMut(f64) -> f64>,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    context: &'static str,
) -> Result<f64> {
    // The negated form also rejects NaN endpoints.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(lo < hi) {
        return Err(Error::BracketFailure {
            context,
            lo,
            hi,
            flo: f64::NAN,
            fhi: f64::NAN,
        });
    }
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::BracketFailure {
            context,
            lo,
            hi,
            flo,
            fhi,
        });
    }

    // Track the evaluated point with the smallest |f| so the returned root
    // carries the smallest observed residual.
    let mut best_x = if flo.abs() < fhi.abs() { lo } else { hi };
    let mut best_f = flo.abs().min(fhi.abs());

    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if !fx.is_finite() {
            return Err(Error::BracketFailure {
                context,
                lo,
                hi,
                flo: fx,
                fhi,
            });
        }
        if fx.abs() < best_f {
            best_f = fx.abs();
            best_x = x;
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }

        let width = hi - lo;
        if width <= xtol + 4.0 * f64::EPSILON * x.abs() {
            return Ok(best_x);
        }

        // Newton candidate from the endpoint with the smaller residual;
        // fall back to the midpoint when it leaves the bracket.
        let mut next = 0.5 * (lo + hi);
        if let Some(df) = df.as_mut() {
            let (xn, fxn) = if flo.abs() < fhi.abs() {
                (lo, flo)
            } else {
                (hi, fhi)
            };
            let d = df(xn);
            if d != 0.0 && d.is_finite() {
                let cand = xn - fxn / d;
                if cand > lo && cand < hi {
                    next = cand;
                }
            }
        }
        x = next;
    }
    let _ = (flo, fhi);
    Ok(best_x)
}
