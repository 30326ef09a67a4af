//! Low-level numerical routines: bracketed root finding, adaptive
//! Gauss-Kronrod quadrature, an adaptive Runge-Kutta integrator and
//! Richardson-extrapolated finite differences.

mod bisect;
mod diff;
mod quad;
mod rk;

pub use bisect::{solve_bracketed, solve_bracketed_with_derivative};
pub use diff::{central_derivative, richardson_stencil, StencilKind};
pub use quad::integrate_adaptive;
pub use rk::integrate_ode;
