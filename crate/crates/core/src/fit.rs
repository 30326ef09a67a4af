//! The compensator variable `eta`, the common factor `I`, least-squares
//! fitting of the continuous tail length in the scale `{I eta^k}`, the
//! multiplicity reading, and the comparison against the square-root
//! compensator.
//!
//! The factorization behind the scale: with `eta = g^{-1}(2 eps) - x1` and
//! `I = psi(eta + x1) - psi(x0)`, the continuous tail length is exactly
//! `I * g(eta + x1)`, so the coefficients of `{I eta^k}` recover the Taylor
//! coefficients of the displacement at the fixed point. Counting the
//! vanishing leading coefficients therefore reads the multiplicity of the
//! bifurcating zero straight off the length data.

use crate::compensators::eta_tilde;
use crate::error::{Error, Result};
use crate::fatou::{DisplacementJet, Fatou};
use nalgebra::{DMatrix, DVector};

/// One length sample at radius `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaSample {
    pub epsilon: f64,
    /// `g^{-1}(2 eps) - x1`.
    pub eta: f64,
    /// `psi(eta + x1) - psi(x0)`, the non-vanishing common factor.
    pub i_value: f64,
    /// Continuous tail length `tau * 2 eps`.
    pub ell_c: f64,
}

/// Least-squares result over the scale `{I eta^0, ..., I eta^K}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub degree: usize,
    pub coefficients: Vec<f64>,
    pub residual_rms: f64,
    pub condition_estimate: f64,
}

/// Multiplicity reading: vanishing-prefix lengths of the fitted scale
/// coefficients and of the displacement jet, and whether they agree.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityReport {
    pub vanish_count: usize,
    pub tol_rel: f64,
    pub jet_vanish_count: usize,
    pub agree: bool,
}

/// Default relative tolerance for coefficient vanishing.
pub const DEFAULT_TOL_REL: f64 = 1e-4;

/// Condition-number ceiling for an acceptable design matrix.
const CONDITION_LIMIT: f64 = 1e12;

/// `eta(2 eps, nu) = g^{-1}(2 eps) - x1`.
pub fn eta_of(fatou: &Fatou, epsilon: f64) -> Result<f64> {
    Ok(fatou.displacement_inverse(2.0 * epsilon)? - fatou.x1)
}

/// The common factor `I = psi(eta + x1) - psi(x0)`.
pub fn i_empirical(fatou: &Fatou, eta: f64, x0: f64) -> Result<f64> {
    Ok(fatou.psi(eta + fatou.x1)? - fatou.psi(x0)?)
}

/// Build the sample at one epsilon. `2 eps` must stay below `g(x0)`.
pub fn eta_sample(fatou: &Fatou, x0: f64, epsilon: f64) -> Result<EtaSample> {
    let eta = eta_of(fatou, epsilon)?;
    let i_value = i_empirical(fatou, eta, x0)?;
    Ok(EtaSample {
        epsilon,
        eta,
        i_value,
        ell_c: i_value * 2.0 * epsilon,
    })
}

/// Samples over an ascending epsilon grid.
pub fn collect_samples(fatou: &Fatou, x0: f64, eps_grid: &[f64]) -> Result<Vec<EtaSample>> {
    eps_grid.iter().map(|&e| eta_sample(fatou, x0, e)).collect()
}

/// Ordinary least squares of `b` against the given columns, solved by
/// singular value decomposition with unit-norm column scaling.
/// Returns (coefficients, residual rms, condition estimate of the scaled
/// design).
fn least_squares(columns: &[Vec<f64>], b: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
    let ncols = columns.len();
    let nrows = b.len();
    let mut a = DMatrix::zeros(nrows, ncols);
    let mut norms = vec![0.0f64; ncols];
    for (k, col) in columns.iter().enumerate() {
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::IllConditioned {
                condition: f64::INFINITY,
            });
        }
        norms[k] = norm;
        for i in 0..nrows {
            a[(i, k)] = col[i] / norm;
        }
    }
    let rhs = DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned { condition });
    }
    let scaled = svd
        .solve(&rhs, 0.0)
        .map_err(|_| Error::IllConditioned { condition })?;
    let residual = (&a * &scaled - &rhs).norm() / (nrows as f64).sqrt();
    let coeffs = (0..ncols).map(|k| scaled[k] / norms[k]).collect();
    Ok((coeffs, residual, condition))
}

/// Fit the continuous tail lengths against the scale `{I eta^k}`,
/// `k = 0..=degree`. Requires at least `3 (degree + 1)` samples spanning
/// at least three decades of `eta`.
pub fn fit_scale(samples: &[EtaSample], degree: usize) -> Result<FitResult> {
    let needed = 3 * (degree + 1);
    if samples.len() < needed {
        return Err(Error::InsufficientSamples {
            got: samples.len(),
            needed,
            detail: format!("degree {degree} fit"),
        });
    }
    let (mut eta_min, mut eta_max) = (f64::INFINITY, 0.0f64);
    for s in samples {
        eta_min = eta_min.min(s.eta);
        eta_max = eta_max.max(s.eta);
    }
    let span = (eta_max / eta_min).log10();
    // The negated form also catches a NaN span.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(span >= 3.0) {
        return Err(Error::InsufficientDecadeSpan {
            got: span,
            needed: 3.0,
        });
    }

    let columns: Vec<Vec<f64>> = (0..=degree)
        .map(|k| {
            samples
                .iter()
                .map(|s| s.i_value * s.eta.powi(k as i32))
                .collect()
        })
        .collect();
    let b: Vec<f64> = samples.iter().map(|s| s.ell_c).collect();
    let (coefficients, residual_rms, condition_estimate) = least_squares(&columns, &b)?;
    Ok(FitResult {
        degree,
        coefficients,
        residual_rms,
        condition_estimate,
    })
}

/// Length of the maximal prefix of `coeffs` that vanishes relative to the
/// largest coefficient.
pub fn vanish_prefix(coeffs: &[f64], tol_rel: f64) -> usize {
    let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max == 0.0 {
        return coeffs.len();
    }
    coeffs
        .iter()
        .take_while(|c| c.abs() <= tol_rel * max)
        .count()
}

/// Read the multiplicity from a fit and cross-check it against the
/// displacement jet.
pub fn read_multiplicity(
    fit: &FitResult,
    jet: &DisplacementJet,
    tol_rel: f64,
) -> MultiplicityReport {
    let vanish_count = vanish_prefix(&fit.coefficients, tol_rel);
    let jet_vanish_count = vanish_prefix(&jet.coeffs, tol_rel);
    MultiplicityReport {
        vanish_count,
        tol_rel,
        jet_vanish_count,
        agree: vanish_count == jet_vanish_count,
    }
}

/// One row of the `eta` versus `eta_tilde` comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaRatioRow {
    pub epsilon: f64,
    pub eta: f64,
    pub eta_tilde: f64,
    pub ratio: f64,
}

/// Compare `eta(2 eps, nu)` against the square-root compensator
/// `sqrt(2 eps / C0 + r^2) - r` with `r = c1(nu) / (2 C0)` and `C0` the
/// quadratic displacement coefficient at the bifurcation value. The ratio
/// tends to 1 as `(eps, nu) -> (0, 0)`. Model fields only: the parameter
/// change of the general case is the identity there.
pub fn eta_vs_eta_tilde(
    fatou: &Fatou,
    fatou_at_zero: &Fatou,
    eps_grid: &[f64],
) -> Result<Vec<EtaRatioRow>> {
    if !fatou.field.is_model() {
        return Err(Error::InvalidParameter {
            name: "field",
            reason: "eta/eta_tilde comparison is defined for the model field".into(),
        });
    }
    let c0 = fatou_at_zero.displacement_jet(2)?.coeffs[2];
    let c1 = fatou.displacement_jet(1)?.coeffs[1];
    let r = c1 / (2.0 * c0);
    eps_grid
        .iter()
        .map(|&epsilon| {
            let eta = eta_of(fatou, epsilon)?;
            // sqrt(x + r^2) - r realized through the stable compensator.
            let tilde = eta_tilde(2.0 * epsilon / c0, r * r);
            Ok(EtaRatioRow {
                epsilon,
                eta,
                eta_tilde: tilde,
                ratio: eta / tilde,
            })
        })
        .collect()
}

/// Which basis function dominates a regime fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SqrtEps,
    EpsLogEps,
    Eps,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::SqrtEps => "sqrt_eps",
            Regime::EpsLogEps => "eps_log_eps",
            Regime::Eps => "eps",
        }
    }
}

/// Leading-term report of the regime fit over `{sqrt(eps), eps log eps, eps}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeFit {
    pub coeff_sqrt: f64,
    pub coeff_eps_log: f64,
    pub coeff_eps: f64,
    pub residual_rms: f64,
    pub dominant: Regime,
    /// Set when the dominant coefficient drifts between the lower and upper
    /// halves of the window, indicating the window straddles regimes.
    pub regime_mixed: bool,
}

fn regime_fit_window(eps: &[f64], ell: &[f64]) -> Result<(Vec<f64>, f64, [f64; 3])> {
    let columns: Vec<Vec<f64>> = vec![
        eps.iter().map(|e| e.sqrt()).collect(),
        eps.iter().map(|e| e * e.ln()).collect(),
        eps.to_vec(),
    ];
    let (coeffs, residual, _) = least_squares(&columns, ell)?;
    // Contribution magnitude of each basis function over the window.
    let mags = [
        coeffs[0].abs() * columns[0].iter().map(|v| v.abs()).sum::<f64>(),
        coeffs[1].abs() * columns[1].iter().map(|v| v.abs()).sum::<f64>(),
        coeffs[2].abs() * columns[2].iter().map(|v| v.abs()).sum::<f64>(),
    ];
    Ok((coeffs, residual, mags))
}

/// Fit the continuous tail length against `{sqrt(eps), eps log eps, eps}`
/// over `eps_grid`, reporting the dominant term and a regime-mixing flag.
pub fn regime_fit(fatou: &Fatou, x0: f64, eps_grid: &[f64]) -> Result<RegimeFit> {
    if eps_grid.len() < 12 {
        return Err(Error::InsufficientSamples {
            got: eps_grid.len(),
            needed: 12,
            detail: "regime fit".into(),
        });
    }
    let ell: Vec<f64> = eps_grid
        .iter()
        .map(|&e| eta_sample(fatou, x0, e).map(|s| s.ell_c))
        .collect::<Result<_>>()?;
    let (coeffs, residual, mags) = regime_fit_window(eps_grid, &ell)?;

    let dominant = if mags[0] >= mags[1] && mags[0] >= mags[2] {
        Regime::SqrtEps
    } else if mags[1] >= mags[2] {
        Regime::EpsLogEps
    } else {
        Regime::Eps
    };

    // Half-window drift check on the dominant coefficient.
    let half = eps_grid.len() / 2;
    let (lo_coeffs, _, _) = regime_fit_window(&eps_grid[..half], &ell[..half])?;
    let (hi_coeffs, _, _) = regime_fit_window(&eps_grid[half..], &ell[half..])?;
    let idx = match dominant {
        Regime::SqrtEps => 0,
        Regime::EpsLogEps => 1,
        Regime::Eps => 2,
    };
    let scale = coeffs[idx].abs().max(1e-300);
    let drift = ((lo_coeffs[idx] - hi_coeffs[idx]) / scale).abs();
    let regime_mixed = drift > 0.05;

    Ok(RegimeFit {
        coeff_sqrt: coeffs[0],
        coeff_eps_log: coeffs[1],
        coeff_eps: coeffs[2],
        residual_rms: residual,
        dominant,
        regime_mixed,
    })
}
