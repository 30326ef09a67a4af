//! Fatou coordinates, the flow they trivialize, the time-one map and the
//! displacement function with its local Taylor data.
//!
//! The Fatou coordinate is an antiderivative of `1/F(., nu)`, so it
//! satisfies the Abel equation `psi(f^t(x)) - psi(x) = t` along the flow.
//! For the model family it is closed-form; for generic fields it is
//! computed by adaptive quadrature with the singular part at the attracting
//! fixed point subtracted and integrated exactly. The flow is recovered by
//! bracketed inversion of the strictly monotone coordinate.
//!
//! Sign convention: the model closed form is derived as the exact
//! antiderivative of `1/F_mod`, so the logarithmic `rho` term enters with a
//! minus sign. That is the only convention under which the Abel equation
//! holds, which everything downstream depends on.

use crate::error::{Error, Result};
use crate::field::{Field, FixedPoint, ModelParams};
use crate::numerics::{
    integrate_adaptive, integrate_ode, richardson_stencil, solve_bracketed_with_derivative,
    StencilKind,
};

/// Absolute tolerance of the numeric-branch quadrature.
pub const QUAD_TOL: f64 = 1e-10;

/// |Fx(x1)| below this means the fixed point is treated as parabolic.
const PARABOLIC_FX_TOL: f64 = 1e-7;

/// ODE tolerance for the Runge-Kutta cross-check path.
const ODE_CROSS_CHECK_TOL: f64 = 1e-12;

/// ODE tolerance for generic-field jet evaluation (both sides of x1).
const JET_ODE_TOL: f64 = 1e-14;

/// Agreement required between the extracted linear jet coefficient and the
/// multiplier identity `c1 = 1 - exp(Fx(x1))`.
const JET_C1_TOL: f64 = 1e-6;

/// Which evaluation route a coordinate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FatouBranch {
    ClosedFormModel,
    NumericQuadrature,
}

#[derive(Debug, Clone, Copy)]
enum SingularPart {
    /// Simple pole `c_log / (x - x1)` of `1/F` (hyperbolic point).
    ///
    /// `a1..a3` are the local Taylor coefficients of `F` at `x1`; inside
    /// `u_switch` of the fixed point the subtracted integrand is evaluated
    /// through them in closed form, because the raw expression for `F`
    /// cancels catastrophically there (`F = O(u)` assembled from `O(nu)`
    /// terms) and `1/F^2` amplifies that noise beyond the tolerance.
    Hyperbolic {
        c_log: f64,
        a1: f64,
        a2: f64,
        a3: f64,
        u_switch: f64,
    },
    /// Double pole `c_inv / (x - x1)^2 + c_log / (x - x1)` (parabolic point).
    Parabolic { c_inv: f64, c_log: f64 },
}

/// Taylor coefficients `c0, c1, c2, ...` of the displacement at `x1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementJet {
    pub x1: f64,
    pub coeffs: Vec<f64>,
}

/// A Fatou coordinate for one `(field, nu)` pair, anchored to the basin of
/// the attracting fixed point left of `x0`. Immutable and pure.
#[derive(Debug, Clone)]
pub struct Fatou<'a> {
    pub field: &'a Field,
    pub nu: f64,
    pub branch: FatouBranch,
    /// Attracting fixed point; the coordinate lives on `x > x1`.
    pub x1: f64,
    /// Multiplicity of `x1` (2 at the bifurcation value).
    pub x1_multiplicity: u8,
    /// Base point of the numeric branch, `psi(x_ref) = 0`.
    pub x_ref: f64,
    /// Fixed point below `x1`, if any (domain bound for two-sided work).
    x_below: Option<f64>,
    sing: SingularPart,
}

impl<'a> Fatou<'a> {
    /// Build the coordinate for `field` at parameter `nu`, selecting the
    /// attracting fixed point below `x0` and anchoring the numeric branch
    /// at the right edge of the analysis box.
    pub fn new(field: &'a Field, nu: f64, x0: f64) -> Result<Self> {
        let b = field.analysis_box;
        if nu < 0.0 || nu > b.nu_max {
            return Err(Error::InvalidParameter {
                name: "nu",
                reason: format!("nu = {nu} outside [0, {}]", b.nu_max),
            });
        }
        if !b.contains(x0, nu) {
            return Err(Error::OutsideBox { x: x0, nu });
        }
        // Generic families must satisfy the genericity conditions before
        // any downstream analysis; the model satisfies them identically.
        if !field.is_model() {
            let report = field.genericity_check();
            if !report.passes {
                return Err(Error::InvalidParameter {
                    name: "field",
                    reason: format!(
                        "genericity check failed: F(0,0) = {:.3e}, Fx(0,0) = {:.3e}, \
                         Fnu(0,0) = {:.3e}, Fxx(0,0) = {:.3e}",
                        report.f00, report.fx00, report.fnu00, report.fxx00
                    ),
                });
            }
        }
        let roots = field.fixed_points(nu)?;
        let attracting: FixedPoint = roots
            .iter()
            .rev()
            .find(|r| r.x < x0)
            .copied()
            .ok_or(Error::NoAttractingFixedPoint { x0, nu })?;
        let x1 = attracting.x;
        // The coordinate must be smooth on (x1, x_ref]: no other root there.
        let x_ref = b.x_max;
        if let Some(r) = roots.iter().find(|r| r.x > x1 && r.x <= x_ref) {
            return Err(Error::FixedPointInInterval {
                x: r.x,
                a: x1,
                b: x_ref,
            });
        }
        let x_below = roots.iter().rev().find(|r| r.x < x1).map(|r| r.x);

        let fx1 = field.fx(x1, nu)?;
        let sing = if fx1.abs() > PARABOLIC_FX_TOL {
            let a2 = field.fxx(x1, nu)? / 2.0;
            let a3 = field.fxxx(x1, nu)? / 6.0;
            // Truncating F after the cubic term leaves a relative error
            // O((a4 / a1) u^3) in the remainder; this radius keeps its
            // integrated contribution (and the raw-evaluation noise just
            // outside it) a decade under the quadrature tolerance.
            let u_switch = (3.1e-4 * fx1.abs().powf(2.0 / 3.0)).min(1e-4);
            SingularPart::Hyperbolic {
                c_log: 1.0 / fx1,
                a1: fx1,
                a2,
                a3,
                u_switch,
            }
        } else {
            // 1/F = (1/a2) u^-2 - (a3/a2^2) u^-1 + analytic, u = x - x1,
            // with a2, a3 the second and third Taylor coefficients of F.
            let a2 = field.fxx(x1, nu)? / 2.0;
            let a3 = field.fxxx(x1, nu)? / 6.0;
            if a2 == 0.0 {
                return Err(Error::InvalidParameter {
                    name: "field",
                    reason: format!("degenerate fixed point of order > 2 at x = {x1}"),
                });
            }
            SingularPart::Parabolic {
                c_inv: 1.0 / a2,
                c_log: -a3 / (a2 * a2),
            }
        };

        let branch = if field.is_model() {
            FatouBranch::ClosedFormModel
        } else {
            FatouBranch::NumericQuadrature
        };

        Ok(Fatou {
            field,
            nu,
            branch,
            x1,
            x1_multiplicity: attracting.multiplicity,
            x_ref,
            x_below,
            sing,
        })
    }

    /// The Fatou coordinate at `x > x1`.
    ///
    /// Model fields use the closed form; generic fields integrate
    /// `1/F - (singular part)` from `x_ref` and add the singular
    /// antiderivative, normalized so `psi(x_ref) = 0`.
    pub fn psi(&self, x: f64) -> Result<f64> {
        if x <= self.x1 {
            return Err(Error::OutsideBox { x, nu: self.nu });
        }
        match self.branch {
            FatouBranch::ClosedFormModel => {
                let params = self.field.model_params().expect("model branch");
                model_psi_any(x, self.nu, params)
            }
            FatouBranch::NumericQuadrature => self.psi_numeric(x),
        }
    }

    fn singular_antiderivative(&self, x: f64) -> f64 {
        let u = x - self.x1;
        match self.sing {
            SingularPart::Hyperbolic { c_log, .. } => c_log * u.abs().ln(),
            SingularPart::Parabolic { c_inv, c_log } => -c_inv / u + c_log * u.abs().ln(),
        }
    }

    fn smooth_integrand(&self, t: f64) -> f64 {
        let u = t - self.x1;
        if let SingularPart::Hyperbolic {
            a1,
            a2,
            a3,
            u_switch,
            ..
        } = self.sing
        {
            if u.abs() <= u_switch {
                // 1/(u (a1 + a2 u + a3 u^2)) - 1/(a1 u), cancellation-free.
                let poly = a1 + u * (a2 + u * a3);
                return -(a2 + a3 * u) / (a1 * poly);
            }
        }
        let f = match self.field.f(t, self.nu) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        match self.sing {
            SingularPart::Hyperbolic { c_log, .. } => 1.0 / f - c_log / u,
            SingularPart::Parabolic { c_inv, c_log } => 1.0 / f - c_inv / (u * u) - c_log / u,
        }
    }

    fn psi_numeric(&self, x: f64) -> Result<f64> {
        let smooth = integrate_adaptive(|t| self.smooth_integrand(t), self.x_ref, x, QUAD_TOL)?;
        Ok(smooth + self.singular_antiderivative(x) - self.singular_antiderivative(self.x_ref))
    }

    /// Solve `psi(x) = target` for `x` in `(x1, hi]`. `psi` is strictly
    /// decreasing there, so the solution is unique when bracketed.
    pub fn invert_psi(&self, target: f64, hi: f64) -> Result<f64> {
        let psi_hi = self.psi(hi)?;
        if target <= psi_hi {
            if target == psi_hi {
                return Ok(hi);
            }
            return Err(Error::BracketFailure {
                context: "psi inversion target right of bracket",
                lo: self.x1,
                hi,
                flo: f64::NAN,
                fhi: psi_hi - target,
            });
        }
        // Walk geometrically toward x1 until psi exceeds the target.
        let mut lo = self.x1 + 0.5 * (hi - self.x1);
        let mut psi_lo = self.psi(lo)?;
        let mut guard = 0usize;
        while psi_lo < target {
            lo = self.x1 + 0.5 * (lo - self.x1);
            if lo <= self.x1 || guard > 1100 {
                return Err(Error::BracketFailure {
                    context: "psi inversion bracket collapsed at the fixed point",
                    lo,
                    hi,
                    flo: psi_lo - target,
                    fhi: psi_hi - target,
                });
            }
            psi_lo = self.psi(lo)?;
            guard += 1;
        }
        if psi_lo == target {
            return Ok(lo);
        }
        let h = |x: f64| match self.psi(x) {
            Ok(v) => v - target,
            Err(_) => f64::NAN,
        };
        let dh = |x: f64| match self.field.f(x, self.nu) {
            Ok(f) => 1.0 / f,
            Err(_) => f64::NAN,
        };
        solve_bracketed_with_derivative(h, dh, lo, hi, 0.0, "psi inversion")
    }

    /// The flow of `dx/dt = F(x, nu)` at time `t >= 0` from `x0 > x1`, via
    /// `psi^-1(psi(x0) + t)`.
    pub fn flow(&self, x0: f64, t: f64) -> Result<f64> {
        if x0 == self.x1 {
            return Ok(self.x1);
        }
        if x0 < self.x1 {
            return Err(Error::OutsideBox { x: x0, nu: self.nu });
        }
        if t == 0.0 {
            return Ok(x0);
        }
        let target = self.psi(x0)? + t;
        self.invert_psi(target, x0)
    }

    /// Time-one map `f(x) = flow(x, 1)`.
    pub fn time_one(&self, x: f64) -> Result<f64> {
        self.flow(x, 1.0)
    }

    /// Displacement `g(x) = x - f(x)`.
    pub fn displacement(&self, x: f64) -> Result<f64> {
        Ok(x - self.time_one(x)?)
    }

    /// The unique `x` in `(x1, hi]` with `g(x) = y`, `y > 0`, where `hi` is
    /// the right edge of the analysis box. The displacement is strictly
    /// increasing on the bracket; a midpoint ordering check guards this.
    pub fn displacement_inverse(&self, y: f64) -> Result<f64> {
        let hi = self.field.analysis_box.x_max;
        if y <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "y",
                reason: format!("displacement target {y} must be positive"),
            });
        }
        let g_hi = self.displacement(hi)?;
        if y > g_hi {
            return Err(Error::AboveRange { y, max: g_hi });
        }
        if y == g_hi {
            return Ok(hi);
        }
        // Expand toward x1 until displacement falls below the target.
        let mut lo = self.x1 + 0.5 * (hi - self.x1);
        let mut g_lo = self.displacement(lo)?;
        let mut guard = 0usize;
        while g_lo > y {
            lo = self.x1 + 0.5 * (lo - self.x1);
            if lo <= self.x1 || guard > 1100 {
                return Err(Error::BracketFailure {
                    context: "displacement inversion bracket collapsed",
                    lo,
                    hi,
                    flo: g_lo - y,
                    fhi: g_hi - y,
                });
            }
            g_lo = self.displacement(lo)?;
            guard += 1;
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = self.displacement(mid)?;
        if !(g_lo <= g_mid && g_mid <= g_hi) {
            return Err(Error::MonotonicityViolated { lo, hi });
        }
        let h = |x: f64| match self.displacement(x) {
            Ok(v) => v - y,
            Err(_) => f64::NAN,
        };
        // g'(x) = 1 - f'(x) with f'(x) = F(f(x)) / F(x) along the flow.
        let dh = |x: f64| {
            let fx_val = match self.time_one(x) {
                Ok(v) => v,
                Err(_) => return f64::NAN,
            };
            match (self.field.f(fx_val, self.nu), self.field.f(x, self.nu)) {
                (Ok(num), Ok(den)) if den != 0.0 => 1.0 - num / den,
                _ => f64::NAN,
            }
        };
        solve_bracketed_with_derivative(h, dh, lo, hi, 0.0, "displacement inversion")
    }

    /// Multiplier of the time-one map at the attracting fixed point,
    /// `f'(x1) = exp(Fx(x1, nu))`; equals 1 at the parabolic value.
    pub fn multiplier(&self) -> Result<f64> {
        Ok(self.field.fx(self.x1, self.nu)?.exp())
    }

    /// The flow computed by adaptive Runge-Kutta integration of the field,
    /// used as an independent cross-check of the Fatou route.
    pub fn flow_ode(&self, x0: f64, t: f64) -> Result<f64> {
        let nu = self.nu;
        integrate_ode(
            |x| self.field.f(x, nu).unwrap_or(f64::NAN),
            x0,
            t,
            ODE_CROSS_CHECK_TOL,
        )
    }

    /// Time-one map on either side of `x1`, for jet extraction.
    ///
    /// Model fields invert the closed-form coordinate on the branch
    /// containing `x`; generic fields integrate the ODE on both sides so a
    /// single evaluation path feeds the central differences.
    fn time_one_two_sided(&self, x: f64) -> Result<f64> {
        if x == self.x1 {
            return Ok(self.x1);
        }
        if x > self.x1 {
            if self.branch == FatouBranch::ClosedFormModel {
                return self.time_one(x);
            }
            let nu = self.nu;
            return integrate_ode(
                |z| self.field.f(z, nu).unwrap_or(f64::NAN),
                x,
                1.0,
                JET_ODE_TOL,
            );
        }
        match self.branch {
            FatouBranch::ClosedFormModel => self.time_one_left_model(x),
            FatouBranch::NumericQuadrature => {
                let nu = self.nu;
                integrate_ode(
                    |z| self.field.f(z, nu).unwrap_or(f64::NAN),
                    x,
                    1.0,
                    JET_ODE_TOL,
                )
            }
        }
    }

    /// Left-branch time-one map for the model, by inverting the closed-form
    /// coordinate on the monotone piece containing `x`.
    fn time_one_left_model(&self, x: f64) -> Result<f64> {
        let params = self.field.model_params().expect("model branch");
        let nu = self.nu;
        let psi = |z: f64| model_psi_any(z, nu, params);
        let target = psi(x)? + 1.0;
        let f_here = self.field.f(x, nu)?;

        if f_here > 0.0 {
            // Between the repeller and x1: the flow moves right toward x1
            // and psi increases to +infinity there.
            let mut hi = x + 0.5 * (self.x1 - x);
            let mut guard = 0usize;
            while psi(hi)? < target {
                hi = self.x1 - 0.5 * (self.x1 - hi);
                guard += 1;
                if guard > 200 || hi >= self.x1 {
                    return Err(Error::BracketFailure {
                        context: "left-branch bracket toward x1",
                        lo: x,
                        hi,
                        flo: 0.0,
                        fhi: 0.0,
                    });
                }
            }
            let h = |z: f64| psi(z).map(|v| v - target).unwrap_or(f64::NAN);
            let dh = |z: f64| self.field.f(z, nu).map(|f| 1.0 / f).unwrap_or(f64::NAN);
            solve_bracketed_with_derivative(h, dh, x, hi, 0.0, "left-branch inversion")
        } else {
            // Parabolic value, x below the fixed point: the flow moves left
            // and psi decreases in x, so expand the bracket downward.
            let floor = self.x_below.unwrap_or(self.field.analysis_box.x_min);
            let mut step = (x - floor).abs().max(x.abs()).max(1e-6) * 1e-6;
            let mut lo = x - step;
            let mut guard = 0usize;
            while psi(lo)? < target {
                step *= 4.0;
                lo = x - step;
                guard += 1;
                if guard > 200 || lo <= floor {
                    return Err(Error::BracketFailure {
                        context: "left-branch bracket downward",
                        lo,
                        hi: x,
                        flo: 0.0,
                        fhi: 0.0,
                    });
                }
            }
            let h = |z: f64| psi(z).map(|v| v - target).unwrap_or(f64::NAN);
            let dh = |z: f64| self.field.f(z, nu).map(|f| 1.0 / f).unwrap_or(f64::NAN);
            solve_bracketed_with_derivative(h, dh, lo, x, 0.0, "left-branch inversion")
        }
    }

    /// Taylor coefficients `c0..c_order` of the displacement at `x1`, by
    /// Richardson-extrapolated central differences. `order <= 4`.
    ///
    /// The linear coefficient must reproduce `1 - exp(Fx(x1))`; disagreement
    /// is an error, as is non-convergence of any extrapolation.
    pub fn displacement_jet(&self, order: usize) -> Result<DisplacementJet> {
        if order > 4 {
            return Err(Error::InvalidParameter {
                name: "order",
                reason: format!("jet order {order} exceeds 4"),
            });
        }
        // The model path evaluates near machine precision; the ODE path has
        // a noise floor around 1e-14, so it gets a larger step.
        let base = self.nu.sqrt().max(1e-2);
        let h = match self.branch {
            FatouBranch::ClosedFormModel => 1e-3 * base,
            FatouBranch::NumericQuadrature => 1e-2 * base,
        };
        let g = |x: f64| match self.time_one_two_sided(x) {
            Ok(fx) => x - fx,
            Err(_) => f64::NAN,
        };

        let c0 = g(self.x1);
        let mut coeffs = vec![c0];
        // (atol, rtol) per derivative order; higher orders lose digits to
        // the h^-k noise amplification.
        let tolerances = [(1e-7, 1e-6), (2e-3, 1e-3), (0.05, 0.02), (0.8, 0.2)];
        let kinds = [
            StencilKind::First,
            StencilKind::Second,
            StencilKind::Third,
            StencilKind::Fourth,
        ];
        let factorial = [1.0, 1.0, 2.0, 6.0, 24.0];
        for k in 1..=order {
            let (atol, rtol) = tolerances[k - 1];
            let d = richardson_stencil(g, self.x1, h, kinds[k - 1], atol, rtol, k)?;
            coeffs.push(d / factorial[k]);
        }

        if order >= 1 {
            let expected = 1.0 - self.multiplier()?;
            let c1 = coeffs[1];
            if (c1 - expected).abs() > JET_C1_TOL * (1.0 + c1.abs()) {
                return Err(Error::JetMultiplierMismatch { c1, expected });
            }
        }
        Ok(DisplacementJet {
            x1: self.x1,
            coeffs,
        })
    }
}

/// Closed-form model Fatou coordinate on the attracting side `x > sqrt(nu)`.
///
/// For `nu > 0` this is `ln((x + r)/(x - r))/(2r) - rho(nu)/2 * ln(x^2 - nu)`
/// with `r = sqrt(nu)`; for `nu = 0` it is `1/x - rho(0) ln x`.
pub fn fatou_model(x: f64, nu: f64, params: &ModelParams) -> Result<f64> {
    let r = nu.sqrt();
    if x <= r {
        return Err(Error::OutsideBox { x, nu });
    }
    model_psi_any(x, nu, params)
}

/// Model coordinate on any branch (used two-sided by jet extraction).
fn model_psi_any(x: f64, nu: f64, params: &ModelParams) -> Result<f64> {
    let rho = params.rho(nu);
    if nu == 0.0 {
        if x == 0.0 {
            return Err(Error::OutsideBox { x, nu });
        }
        return Ok(1.0 / x - rho * x.abs().ln());
    }
    let r = nu.sqrt();
    if x == r || x == -r {
        return Err(Error::OutsideBox { x, nu });
    }
    // (x - r)(x + r) preserves precision near the fixed points where the
    // direct x^2 - nu cancels.
    let log_quad = ((x - r).abs() * (x + r).abs()).ln();
    let lead = if x > r {
        (2.0 * r / (x - r)).ln_1p() / (2.0 * r)
    } else {
        ((x + r).abs() / (x - r).abs()).ln() / (2.0 * r)
    };
    Ok(lead - 0.5 * rho * log_quad)
}

/// Spec-surface numeric Fatou coordinate: integral of `1/F(., nu)` from
/// `x_ref` to `x` with singular-part subtraction near the attracting point,
/// normalized so the value at `x_ref` is zero.
///
/// The closed interval between `x` and `x_ref` must not contain a fixed
/// point.
pub fn fatou_numeric(field: &Field, nu: f64, x: f64, x_ref: f64) -> Result<f64> {
    let (a, b) = if x < x_ref { (x, x_ref) } else { (x_ref, x) };
    let roots = field.fixed_points(nu)?;
    if let Some(r) = roots.iter().find(|r| r.x >= a && r.x <= b) {
        return Err(Error::FixedPointInInterval { x: r.x, a, b });
    }
    // Anchor on the attracting point directly below the integration range.
    let fatou = Fatou::new(field, nu, b)?;
    let shifted = Fatou { x_ref, ..fatou };
    shifted.psi_numeric(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{AnalysisBox, Field, ModelParams};

    fn model_field(rho0: f64) -> Field {
        Field::model(ModelParams::constant(rho0), AnalysisBox::default()).unwrap()
    }

    fn cubic_field() -> Field {
        Field::generic(
            crate::expr::parse("-x^2+nu+0.1*x^3").unwrap(),
            AnalysisBox::default(),
        )
    }

    /// Exact model flow for rho = 0: x/(1 + x t) at nu = 0, the tanh form
    /// for nu > 0. Oracle only, never used by the implementation.
    fn exact_flow_rho0(x0: f64, nu: f64, t: f64) -> f64 {
        if nu == 0.0 {
            x0 / (1.0 + x0 * t)
        } else {
            let r = nu.sqrt();
            let th = (r * t).tanh();
            r * (x0 + r * th) / (r + x0 * th)
        }
    }

    #[test]
    fn model_psi_exact_values() {
        let p = ModelParams::constant(0.0);
        assert!((fatou_model(0.5, 0.0, &p).unwrap() - 2.0).abs() < 1e-15);
        // nu = 0.04, x = 0.4: (1/0.4) ln(0.6/0.2) / ... = 2.5 ln 3.
        let v = fatou_model(0.4, 0.04, &p).unwrap();
        assert!((v - 2.5 * 3.0f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn model_psi_is_antiderivative_of_reciprocal_field() {
        // Quadrature oracle: psi(x) - psi(y) must match the integral of 1/F.
        let field = model_field(0.3);
        let p = ModelParams::constant(0.3);
        let nu = 0.04;
        let (x, y) = (0.4, 0.9);
        let direct = fatou_model(x, nu, &p).unwrap() - fatou_model(y, nu, &p).unwrap();
        let quad = integrate_adaptive(|t| 1.0 / field.f(t, nu).unwrap(), y, x, 1e-12).unwrap();
        assert!(
            (direct - quad).abs() < 1e-8,
            "direct {direct} vs quad {quad}"
        );
    }

    #[test]
    fn numeric_psi_matches_closed_form_on_model() {
        let field = model_field(0.0);
        let v = fatou_numeric(&field, 0.0, 0.5, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "got {v}");

        let p = ModelParams::constant(0.0);
        let nu = 0.04;
        for x in [0.25, 0.4, 0.7] {
            let numeric = fatou_numeric(&field, nu, x, 1.0).unwrap();
            let closed = fatou_model(x, nu, &p).unwrap() - fatou_model(1.0, nu, &p).unwrap();
            assert!(
                (numeric - closed).abs() < 1e-9,
                "x = {x}: numeric {numeric} vs closed {closed}"
            );
        }
    }

    #[test]
    fn numeric_psi_near_parabolic_point() {
        // Double-pole subtraction: compare against the closed form with
        // rho = 0.3 at nu = 0 down to small x.
        let field = model_field(0.3);
        let p = ModelParams::constant(0.3);
        for x in [1e-3, 1e-2, 0.1] {
            let numeric = fatou_numeric(&field, 0.0, x, 1.0).unwrap();
            let closed = fatou_model(x, 0.0, &p).unwrap() - fatou_model(1.0, 0.0, &p).unwrap();
            assert!(
                (numeric - closed).abs() < 1e-8,
                "x = {x}: numeric {numeric} vs closed {closed}"
            );
        }
    }

    #[test]
    fn numeric_psi_monotone_on_generic_field() {
        let field = cubic_field();
        let fatou = Fatou::new(&field, 0.04, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..20 {
            let x = fatou.x1 + 0.01 + (1.0 - fatou.x1 - 0.01) * i as f64 / 20.0;
            let v = fatou.psi(x).unwrap();
            assert!(v < prev, "psi must decrease: psi({x}) = {v} >= {prev}");
            prev = v;
        }
    }

    #[test]
    fn numeric_psi_quadrature_self_consistency() {
        // Richardson-style check: a much tighter tolerance must not move
        // the value beyond the coarse tolerance budget.
        let field = cubic_field();
        let fatou = Fatou::new(&field, 0.04, 1.0).unwrap();
        let x = fatou.x1 + 0.05;
        let coarse = fatou.psi(x).unwrap();
        let fine = {
            let smooth =
                integrate_adaptive(|t| fatou.smooth_integrand(t), fatou.x_ref, x, 1e-13).unwrap();
            smooth + fatou.singular_antiderivative(x) - fatou.singular_antiderivative(fatou.x_ref)
        };
        assert!((coarse - fine).abs() < 1e-9);
    }

    #[test]
    fn fixed_point_inside_interval_rejected() {
        let field = model_field(0.0);
        let err = fatou_numeric(&field, 0.04, 0.1, 1.0);
        assert!(matches!(err, Err(Error::FixedPointInInterval { .. })));
    }

    #[test]
    fn flow_exact_cases() {
        let field = model_field(0.0);
        let f0 = Fatou::new(&field, 0.0, 1.0).unwrap();
        assert!((f0.flow(0.5, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(f0.flow(0.5, 0.0).unwrap(), 0.5);

        let f1 = Fatou::new(&field, 0.04, 1.0).unwrap();
        let oracle = exact_flow_rho0(0.4, 0.04, 1.0);
        assert!((oracle - 0.315090).abs() < 1e-5);
        assert!((f1.flow(0.4, 1.0).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn time_one_exact_cases() {
        let field = model_field(0.0);
        let f0 = Fatou::new(&field, 0.0, 1.0).unwrap();
        assert!((f0.time_one(1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((f0.time_one(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-12);

        let f1 = Fatou::new(&field, 0.04, 1.0).unwrap();
        assert!((f1.time_one(f1.x1).unwrap() - f1.x1).abs() < 1e-10);
    }

    #[test]
    fn displacement_values() {
        let field = model_field(0.0);
        let f0 = Fatou::new(&field, 0.0, 1.0).unwrap();
        assert!((f0.displacement(0.5).unwrap() - 1.0 / 6.0).abs() < 1e-12);

        let f1 = Fatou::new(&field, 0.04, 1.0).unwrap();
        assert!(f1.displacement(f1.x1 + 1e-14).unwrap().abs() < 1e-12);
        let oracle = 0.4 - exact_flow_rho0(0.4, 0.04, 1.0);
        assert!((oracle - 0.084910).abs() < 1e-5);
        assert!((f1.displacement(0.4).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn displacement_inverse_quadratic_oracle() {
        // g(x) = x^2/(1+x) = y solves to x = e + sqrt(e^2 + 2e), 2e = y.
        let field = model_field(0.0);
        let f0 = Fatou::new(&field, 0.0, 1.0).unwrap();
        let y = 0.05f64;
        let e = y / 2.0;
        let oracle = e + (e * e + 2.0 * e).sqrt();
        assert!((oracle - 0.25).abs() < 1e-15);
        assert!((f0.displacement_inverse(y).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn displacement_inverse_round_trip() {
        let field = model_field(0.3);
        for nu in [0.0, 0.01, 0.04] {
            let fatou = Fatou::new(&field, nu, 1.0).unwrap();
            for x in [fatou.x1 + 0.01, 0.5, 1.2] {
                let y = fatou.displacement(x).unwrap();
                let back = fatou.displacement_inverse(y).unwrap();
                assert!(
                    (back - x).abs() < 1e-10,
                    "nu = {nu}, x = {x}: round trip gave {back}"
                );
            }
        }
    }

    #[test]
    fn displacement_inverse_tends_to_x1() {
        let field = model_field(0.0);
        let fatou = Fatou::new(&field, 0.04, 1.0).unwrap();
        let x = fatou.displacement_inverse(1e-12).unwrap();
        assert!((x - fatou.x1).abs() < 1e-10);
    }

    #[test]
    fn displacement_inverse_above_range() {
        let field = model_field(0.0);
        let fatou = Fatou::new(&field, 0.0, 1.0).unwrap();
        assert!(matches!(
            fatou.displacement_inverse(10.0),
            Err(Error::AboveRange { .. })
        ));
    }

    #[test]
    fn multiplier_values() {
        let field = model_field(0.0);
        let f1 = Fatou::new(&field, 0.04, 1.0).unwrap();
        assert!((f1.multiplier().unwrap() - (-0.4f64).exp()).abs() < 1e-15);
        assert!(((-0.4f64).exp() - 0.670320).abs() < 1e-6);

        let f0 = Fatou::new(&field, 0.0, 1.0).unwrap();
        assert_eq!(f0.multiplier().unwrap(), 1.0);

        // Generic field: multiplier against a finite difference of the map.
        let cubic = cubic_field();
        let fc = Fatou::new(&cubic, 0.04, 1.0).unwrap();
        let m = fc.multiplier().unwrap();
        let h = 1e-5;
        let fd = (fc.time_one(fc.x1 + h).unwrap() - fc.time_one_two_sided(fc.x1 - h).unwrap())
            / (2.0 * h);
        assert!((m - fd).abs() < 1e-7, "multiplier {m} vs fd {fd}");
    }

    #[test]
    fn jet_parabolic_model() {
        // g(x) = x^2/(1+x) = x^2 - x^3 + ...
        let field = model_field(0.0);
        let f0 = Fatou::new(&field, 0.0, 1.0).unwrap();
        let jet = f0.displacement_jet(3).unwrap();
        assert!(jet.coeffs[0].abs() < 1e-11);
        assert!(jet.coeffs[1].abs() < 1e-8);
        assert!((jet.coeffs[2] - 1.0).abs() < 1e-5, "c2 = {}", jet.coeffs[2]);
        assert!((jet.coeffs[3] + 1.0).abs() < 1e-3, "c3 = {}", jet.coeffs[3]);
    }

    #[test]
    fn jet_hyperbolic_model_matches_analytic_coefficients() {
        let field = model_field(0.0);
        let f1 = Fatou::new(&field, 0.04, 1.0).unwrap();
        let jet = f1.displacement_jet(2).unwrap();
        let c1_expected = 1.0 - (-0.4f64).exp();
        assert!((c1_expected - 0.329680).abs() < 1e-6);
        assert!((jet.coeffs[1] - c1_expected).abs() < 1e-9);
        // c2 = exp(-2 sqrt(nu)) a(2 sqrt(nu)) for rho = 0.
        let c2_expected = (-0.4f64).exp() * crate::compensators::a_of(0.4);
        assert!((c2_expected - 0.552477).abs() < 1e-6);
        assert!(
            (jet.coeffs[2] - c2_expected).abs() < 2e-4,
            "c2 = {} vs {}",
            jet.coeffs[2],
            c2_expected
        );
    }

    #[test]
    fn jet_generic_cubic() {
        // At nu = 0 the cubic field's displacement is x^2 - 1.1 x^3 + ...
        let field = cubic_field();
        let f0 = Fatou::new(&field, 0.0, 1.0).unwrap();
        let jet = f0.displacement_jet(2).unwrap();
        assert!(jet.coeffs[0].abs() < 1e-11);
        assert!(jet.coeffs[1].abs() < 1e-6);
        assert!((jet.coeffs[2] - 1.0).abs() < 1e-2, "c2 = {}", jet.coeffs[2]);
    }

    #[test]
    fn jet_hyperbolic_model_with_rho() {
        // With A = 2 sqrt(nu)/(1 + rho sqrt(nu)), the antiderivative
        // convention gives c1 = 1 - exp(-A) and
        // c2 = exp(-A) a(A) (1 - rho sqrt(nu))/(1 + rho sqrt(nu))^2.
        // Frozen against a 30-digit ODE oracle at rho = 0.3, nu = 0.04:
        // c1 = 0.314329776475..., c2 = 0.477818334930... (the variant with
        // the opposite rho sign gives 0.3466 / 0.6852 and is excluded).
        let field = model_field(0.3);
        let fatou = Fatou::new(&field, 0.04, 1.0).unwrap();
        let jet = fatou.displacement_jet(2).unwrap();

        let r = 0.2f64;
        let a_exp = 2.0 * r / (1.0 + 0.3 * r);
        let c1 = 1.0 - (-a_exp).exp();
        let c2 = (-a_exp).exp() * crate::compensators::a_of(a_exp) * (1.0 - 0.3 * r)
            / ((1.0 + 0.3 * r) * (1.0 + 0.3 * r));
        assert!((c1 - 0.314329776475413).abs() < 1e-14);
        assert!((c2 - 0.477818334930543).abs() < 1e-14);
        assert!((jet.coeffs[1] - c1).abs() < 1e-9, "c1 = {}", jet.coeffs[1]);
        assert!((jet.coeffs[2] - c2).abs() < 2e-4, "c2 = {}", jet.coeffs[2]);
    }

    #[test]
    fn abel_equation_on_grid() {
        for rho0 in [0.0, 0.3, -0.3] {
            let field = model_field(rho0);
            for nu in [0.0, 1e-4, 1e-2, 0.04] {
                let fatou = Fatou::new(&field, nu, 1.0).unwrap();
                for i in 0..12 {
                    let x = fatou.x1 + 0.01 + (1.0 - fatou.x1 - 0.01) * i as f64 / 11.0;
                    let lhs = fatou.psi(fatou.time_one(x).unwrap()).unwrap();
                    let rhs = fatou.psi(x).unwrap() + 1.0;
                    assert!(
                        (lhs - rhs).abs() < 1e-8,
                        "rho {rho0} nu {nu} x {x}: abel residual {}",
                        lhs - rhs
                    );
                }
            }
        }
    }

    #[test]
    fn group_law() {
        let field = model_field(0.3);
        let fatou = Fatou::new(&field, 0.01, 1.0).unwrap();
        for s in [0.25, 0.5, 1.0] {
            for t in [0.25, 0.5, 1.0] {
                let once = fatou.flow(0.8, s + t).unwrap();
                let twice = fatou.flow(fatou.flow(0.8, s).unwrap(), t).unwrap();
                assert!((once - twice).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fatou_vs_ode_flow() {
        for rho0 in [0.0, 0.3] {
            let field = model_field(rho0);
            for nu in [0.0, 1e-2, 0.04] {
                let fatou = Fatou::new(&field, nu, 1.0).unwrap();
                for x in [0.4, 0.8, 1.2] {
                    let a = fatou.flow(x, 1.0).unwrap();
                    let b = fatou.flow_ode(x, 1.0).unwrap();
                    assert!(
                        (a - b).abs() < 1e-8,
                        "rho {rho0} nu {nu} x {x}: fatou {a} vs ode {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn non_generic_field_is_gated() {
        let field = Field::generic(
            crate::expr::parse("-x^3 + nu").unwrap(),
            AnalysisBox::default(),
        );
        assert!(matches!(
            Fatou::new(&field, 0.04, 1.0),
            Err(Error::InvalidParameter { name: "field", .. })
        ));
    }

    #[test]
    fn generic_flow_vs_ode() {
        let field = cubic_field();
        for nu in [0.0, 0.04] {
            let fatou = Fatou::new(&field, nu, 1.0).unwrap();
            for x in [0.4, 0.9] {
                let a = fatou.flow(x, 1.0).unwrap();
                let b = fatou.flow_ode(x, 1.0).unwrap();
                assert!((a - b).abs() < 1e-8, "nu {nu} x {x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn psi_asymptotics_at_fixed_point() {
        // nu > 0: psi(x)/log(x - x1) approaches a finite nonzero constant;
        // nu = 0: x psi(x) -> 1.
        let field = model_field(0.3);
        let hyper = Fatou::new(&field, 0.04, 1.0).unwrap();
        let mut prev: Option<f64> = None;
        for k in 3..7 {
            let u = 10f64.powi(-k);
            let ratio = hyper.psi(hyper.x1 + u).unwrap() / u.ln();
            if let Some(p) = prev {
                assert!(
                    (ratio - p).abs() < 0.05 * ratio.abs(),
                    "ratio drifting: {p} -> {ratio}"
                );
            }
            assert!(ratio.abs() > 0.1);
            prev = Some(ratio);
        }

        let para = Fatou::new(&field, 0.0, 1.0).unwrap();
        for k in 4..8 {
            let x = 10f64.powi(-k);
            let v = x * para.psi(x).unwrap();
            assert!((v - 1.0).abs() < 0.05, "x psi(x) = {v} at x = {x}");
        }
    }

    #[test]
    fn jet_rejects_order_above_four() {
        let field = model_field(0.0);
        let fatou = Fatou::new(&field, 0.0, 1.0).unwrap();
        assert!(fatou.displacement_jet(5).is_err());
    }
}
