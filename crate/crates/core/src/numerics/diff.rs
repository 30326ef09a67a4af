//! Central-difference stencils with Richardson extrapolation.

use crate::error::{Error, Result};

/// First derivative of `f` at `x` by the 3-point central stencil.
pub fn central_derivative<F>(mut f: F, x: f64, h: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Which derivative a symmetric stencil targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilKind {
    First,
    Second,
    Third,
    Fourth,
}

impl StencilKind {
    pub fn order(self) -> usize {
        match self {
            StencilKind::First => 1,
            StencilKind::Second => 2,
            StencilKind::Third => 3,
            StencilKind::Fourth => 4,
        }
    }
}

fn stencil<F>(f: &mut F, x: f64, h: f64, kind: StencilKind) -> f64
where
    F: FnMut(f64) -> f64,
{
    match kind {
        StencilKind::First => (f(x + h) - f(x - h)) / (2.0 * h),
        StencilKind::Second => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        StencilKind::Third => {
            (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h)
        }
        StencilKind::Fourth => {
            (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                / (h * h * h * h)
        }
    }
}

/// Derivative of `f` at `x` via the symmetric stencil `kind`, Richardson
/// extrapolated over three step levels `h, h/2, h/4`.
///
/// All symmetric stencils here carry even error expansions, so each
/// extrapolation level gains two orders. Convergence is judged by the
/// distance between the final extrapolant and the previous level; failure
/// is reported with the last two estimates (`index` tags the caller's
/// coefficient number in the error).
pub fn richardson_stencil<F>(
    mut f: F,
    x: f64,
    h: f64,
    kind: StencilKind,
    atol: f64,
    rtol: f64,
    index: usize,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let d0 = stencil(&mut f, x, h, kind);
    let d1 = stencil(&mut f, x, h / 2.0, kind);
    let d2 = stencil(&mut f, x, h / 4.0, kind);

    let e0 = (4.0 * d1 - d0) / 3.0;
    let e1 = (4.0 * d2 - d1) / 3.0;
    let e2 = (16.0 * e1 - e0) / 15.0;

    let delta = (e2 - e1).abs();
    if !e2.is_finite() || delta > atol + rtol * e2.abs() {
        return Err(Error::JetNonConvergence {
            index,
            prev: e1,
            last: e2,
        });
    }
    Ok(e2)
}
