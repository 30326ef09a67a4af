//! One-parameter field families `dx/dt = F(x, nu)` and their local data:
//! partial derivatives, genericity report and fixed points.
//!
//! Two variants are supported. The built-in model family is
//! `F(x, nu) = (-x^2 + nu) / (1 + rho(nu) x)` with `rho` a polynomial in
//! `nu`; its partials are closed-form. Generic families come from a parsed
//! expression and use symbolic derivatives. The parameter is restricted to
//! `nu >= 0` throughout.

use crate::error::{Error, Result};
use crate::expr::{FieldExpr, Var};
use crate::numerics::solve_bracketed;

/// Absolute tolerance for the genericity conditions.
pub const GENERICITY_TOL: f64 = 1e-9;

/// Uniform cells used by the fixed-point sign-change scan.
const ROOT_SCAN_CELLS: usize = 10_000;

/// Bисection target for root refinement.
const ROOT_XTOL: f64 = 1e-12;

/// A degenerate (double) root is flagged when |Fx| falls below this.
const DEGENERATE_FX_TOL: f64 = 1e-7;

/// Rectangle on which a field is analyzed: `x` interval times `[0, nu_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisBox {
    pub x_min: f64,
    pub x_max: f64,
    pub nu_max: f64,
}

impl Default for AnalysisBox {
    fn default() -> Self {
        AnalysisBox {
            x_min: -0.5,
            x_max: 1.5,
            nu_max: 0.1,
        }
    }
}

impl AnalysisBox {
    pub fn contains(&self, x: f64, nu: f64) -> bool {
        x >= self.x_min && x <= self.x_max && nu >= 0.0 && nu <= self.nu_max
    }
}

/// Polynomial coefficients of `rho(nu) = rho0 + rho1 nu + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub rho_coeffs: Vec<f64>,
}

impl ModelParams {
    pub fn new(rho_coeffs: Vec<f64>) -> Self {
        let rho_coeffs = if rho_coeffs.is_empty() {
            vec![0.0]
        } else {
            rho_coeffs
        };
        ModelParams { rho_coeffs }
    }

    /// Constant rho, the common case.
    pub fn constant(rho0: f64) -> Self {
        ModelParams {
            rho_coeffs: vec![rho0],
        }
    }

    pub fn rho(&self, nu: f64) -> f64 {
        // Horner evaluation.
        self.rho_coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * nu + c)
    }

    pub fn rho_prime(&self, nu: f64) -> f64 {
        self.rho_coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * nu + k as f64 * c)
    }
}

#[derive(Debug, Clone)]
enum FieldKind {
    Model(ModelParams),
    Generic {
        f: FieldExpr,
        fx: FieldExpr,
        fnu: FieldExpr,
        fxx: FieldExpr,
        fxxx: FieldExpr,
    },
}

/// A field family together with its analysis box. Immutable after
/// construction; all operations are pure.
#[derive(Debug, Clone)]
pub struct Field {
    kind: FieldKind,
    pub analysis_box: AnalysisBox,
}

/// The four values entering the genericity conditions at `(0, 0)`, and the
/// verdict: passes iff `F` and `Fx` vanish there while `Fnu` and `Fxx` do not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericityReport {
    pub f00: f64,
    pub fx00: f64,
    pub fnu00: f64,
    pub fxx00: f64,
    pub passes: bool,
}

/// A root of `F(., nu)` on the x-interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub x: f64,
    /// 1 for a simple hyperbolic root, 2 for a degenerate (parabolic) root.
    pub multiplicity: u8,
}

impl Field {
    /// Build a model field, checking that the denominator `1 + rho(nu) x`
    /// stays away from zero on the analysis box.
    pub fn model(params: ModelParams, analysis_box: AnalysisBox) -> Result<Field> {
        let steps = 64;
        for i in 0..=steps {
            let nu = analysis_box.nu_max * i as f64 / steps as f64;
            let rho = params.rho(nu);
            if !rho.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "rho",
                    reason: format!("rho({nu}) is not finite"),
                });
            }
            for &x in &[analysis_box.x_min, analysis_box.x_max] {
                let q = 1.0 + rho * x;
                if q.abs() < 1e-9 {
                    return Err(Error::ModelDenominatorVanishes { x });
                }
            }
            // A sign change of q across the interval means a zero inside it.
            let qa = 1.0 + rho * analysis_box.x_min;
            let qb = 1.0 + rho * analysis_box.x_max;
            if qa.signum() != qb.signum() {
                return Err(Error::ModelDenominatorVanishes { x: -1.0 / rho });
            }
        }
        Ok(Field {
            kind: FieldKind::Model(params),
            analysis_box,
        })
    }

    /// Build a generic field from a parsed expression, precomputing the
    /// symbolic partials used downstream.
    pub fn generic(expr: FieldExpr, analysis_box: AnalysisBox) -> Field {
        let fx = expr.differentiate(Var::X);
        let fnu = expr.differentiate(Var::Nu);
        let fxx = fx.differentiate(Var::X);
        let fxxx = fxx.differentiate(Var::X);
        Field {
            kind: FieldKind::Generic {
                f: expr,
                fx,
                fnu,
                fxx,
                fxxx,
            },
            analysis_box,
        }
    }

    pub fn is_model(&self) -> bool {
        matches!(self.kind, FieldKind::Model(_))
    }

    pub fn model_params(&self) -> Option<&ModelParams> {
        match &self.kind {
            FieldKind::Model(p) => Some(p),
            FieldKind::Generic { .. } => None,
        }
    }

    /// `F(x, nu)`.
    pub fn f(&self, x: f64, nu: f64) -> Result<f64> {
        match &self.kind {
            FieldKind::Model(p) => {
                let q = 1.0 + p.rho(nu) * x;
                Ok((nu - x * x) / q)
            }
            FieldKind::Generic { f, .. } => Ok(f.eval(x, nu)?),
        }
    }

    /// `dF/dx`.
    pub fn fx(&self, x: f64, nu: f64) -> Result<f64> {
        match &self.kind {
            FieldKind::Model(p) => {
                let rho = p.rho(nu);
                let q = 1.0 + rho * x;
                Ok((-2.0 * x * q - (nu - x * x) * rho) / (q * q))
            }
            FieldKind::Generic { fx, .. } => Ok(fx.eval(x, nu)?),
        }
    }

    /// `dF/dnu`.
    pub fn fnu(&self, x: f64, nu: f64) -> Result<f64> {
        match &self.kind {
            FieldKind::Model(p) => {
                let rho = p.rho(nu);
                let q = 1.0 + rho * x;
                // F = P/Q with P = nu - x^2, Q = 1 + rho(nu) x.
                Ok((q - (nu - x * x) * p.rho_prime(nu) * x) / (q * q))
            }
            FieldKind::Generic { fnu, .. } => Ok(fnu.eval(x, nu)?),
        }
    }

    /// `d2F/dx2`.
    pub fn fxx(&self, x: f64, nu: f64) -> Result<f64> {
        match &self.kind {
            FieldKind::Model(p) => {
                let rho = p.rho(nu);
                let q = 1.0 + rho * x;
                let n = -2.0 * x * q - (nu - x * x) * rho;
                Ok(-2.0 / q - 2.0 * rho * n / (q * q * q))
            }
            FieldKind::Generic { fxx, .. } => Ok(fxx.eval(x, nu)?),
        }
    }

    /// `d3F/dx3`, used by the singular subtraction in the numeric Fatou
    /// coordinate at the parabolic value.
    pub fn fxxx(&self, x: f64, nu: f64) -> Result<f64> {
        match &self.kind {
            FieldKind::Model(p) => {
                let rho = p.rho(nu);
                let q = 1.0 + rho * x;
                let pval = nu - x * x;
                let q2 = q * q;
                Ok(2.0 * rho / q2
                    + (4.0 * rho * q2 - 12.0 * rho * rho * x * q - 6.0 * rho * rho * rho * pval)
                        / (q2 * q2))
            }
            FieldKind::Generic { fxxx, .. } => Ok(fxxx.eval(x, nu)?),
        }
    }

    /// Evaluate the genericity conditions at `(0, 0)`. Failures are
    /// reported in the `passes` flag, never thrown.
    pub fn genericity_check(&self) -> GenericityReport {
        let eval_or_nan = |r: Result<f64>| r.unwrap_or(f64::NAN);
        let f00 = eval_or_nan(self.f(0.0, 0.0));
        let fx00 = eval_or_nan(self.fx(0.0, 0.0));
        let fnu00 = eval_or_nan(self.fnu(0.0, 0.0));
        let fxx00 = eval_or_nan(self.fxx(0.0, 0.0));
        let passes = f00.abs() <= GENERICITY_TOL
            && fx00.abs() <= GENERICITY_TOL
            && fnu00.abs() > GENERICITY_TOL
            && fxx00.abs() > GENERICITY_TOL
            && [f00, fx00, fnu00, fxx00].iter().all(|v| v.is_finite());
        GenericityReport {
            f00,
            fx00,
            fnu00,
            fxx00,
            passes,
        }
    }

    /// All roots of `F(., nu)` on the x-interval, sorted ascending.
    ///
    /// Simple roots come from a sign-change scan over `ROOT_SCAN_CELLS`
    /// uniform cells refined by bisection; degenerate (double) roots are
    /// located as sign changes of `Fx` where `|F|` also vanishes, which the
    /// plain scan cannot see.
    pub fn fixed_points(&self, nu: f64) -> Result<Vec<FixedPoint>> {
        if let FieldKind::Model(_) = &self.kind {
            // Exact roots +-sqrt(nu) for the model, restricted to the box.
            let b = self.analysis_box;
            let mut out = Vec::new();
            if nu == 0.0 {
                if b.x_min <= 0.0 && 0.0 <= b.x_max {
                    out.push(FixedPoint {
                        x: 0.0,
                        multiplicity: 2,
                    });
                }
            } else {
                let r = nu.sqrt();
                for x in [-r, r] {
                    if b.x_min <= x && x <= b.x_max {
                        out.push(FixedPoint { x, multiplicity: 1 });
                    }
                }
            }
            if out.is_empty() {
                return Err(Error::NoRootInBox { nu });
            }
            return Ok(out);
        }

        let b = self.analysis_box;
        let n = ROOT_SCAN_CELLS;
        let h = (b.x_max - b.x_min) / n as f64;
        let mut roots: Vec<FixedPoint> = Vec::new();

        let push_root = |x: f64, multiplicity: u8, roots: &mut Vec<FixedPoint>| {
            if !roots.iter().any(|r| (r.x - x).abs() <= 10.0 * h.max(1e-9)) {
                roots.push(FixedPoint { x, multiplicity });
            }
        };

        let mut prev_x = b.x_min;
        let mut prev_f = self.f(prev_x, nu)?;
        let mut prev_fx = self.fx(prev_x, nu)?;
        for i in 1..=n {
            let x = b.x_min + i as f64 * h;
            let fv = self.f(x, nu)?;
            let fxv = self.fx(x, nu)?;

            if prev_f == 0.0 {
                let m = if prev_fx.abs() <= DEGENERATE_FX_TOL {
                    2
                } else {
                    1
                };
                push_root(prev_x, m, &mut roots);
            } else if fv != 0.0 && prev_f.signum() != fv.signum() {
                let mut root = solve_bracketed(
                    |t| self.f(t, nu).unwrap_or(f64::NAN),
                    prev_x,
                    x,
                    ROOT_XTOL,
                    "fixed point scan",
                )?;
                // Newton polish to the limits of the evaluation.
                for _ in 0..3 {
                    let d = self.fx(root, nu)?;
                    if d.abs() > DEGENERATE_FX_TOL {
                        let step = self.f(root, nu)? / d;
                        if step.is_finite() {
                            root -= step;
                        }
                    }
                }
                let m = if self.fx(root, nu)?.abs() <= DEGENERATE_FX_TOL {
                    2
                } else {
                    1
                };
                push_root(root, m, &mut roots);
            } else if prev_fx.signum() != fxv.signum() && prev_f.abs() < h && fv.abs() < h {
                // Candidate tangency: F keeps its sign but Fx crosses zero
                // while |F| is small. Refine on Fx and accept only if F
                // really vanishes there.
                if let Ok(critical) = solve_bracketed(
                    |t| self.fx(t, nu).unwrap_or(f64::NAN),
                    prev_x,
                    x,
                    ROOT_XTOL,
                    "tangency scan",
                ) {
                    if self.f(critical, nu)?.abs() <= 1e-11 {
                        push_root(critical, 2, &mut roots);
                    }
                }
            }
            prev_x = x;
            prev_f = fv;
            prev_fx = fxv;
        }
        if prev_f == 0.0 {
            let m = if prev_fx.abs() <= DEGENERATE_FX_TOL {
                2
            } else {
                1
            };
            push_root(prev_x, m, &mut roots);
        }

        if roots.is_empty() {
            return Err(Error::NoRootInBox { nu });
        }
        roots.sort_by(|a, b| a.x.total_cmp(&b.x));
        Ok(roots)
    }

    /// The attracting fixed point for an orbit started at `x0`: the largest
    /// root strictly below `x0`, preferring `Fx < 0` (or the degenerate
    /// parabolic root at the bifurcation value).
    pub fn attracting_fixed_point(&self, nu: f64, x0: f64) -> Result<FixedPoint> {
        let roots = self.fixed_points(nu)?;
        roots
            .into_iter()
            .rev()
            .find(|r| r.x < x0)
            .ok_or(Error::NoAttractingFixedPoint { x0, nu })
    }
}
