//! Box-dimension and Minkowski-content estimation from epsilon-neighborhood
//! lengths, exhibiting the dimension jump and the content blow-up at the
//! bifurcation.

use crate::error::{Error, Result};
use crate::fatou::Fatou;
use crate::orbit::{generate_orbit, neighborhood_length, Orbit};

/// Dimension estimate from a log-log slope fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub nu: f64,
    /// Fitted d(log ell) / d(log eps).
    pub slope: f64,
    /// `1 - slope`.
    pub dim_estimate: f64,
    /// `(eps, ell / eps^(1 - dim))` pairs over the window.
    pub content_proxy: Vec<(f64, f64)>,
    /// Local slopes on sliding 5-point windows, paired with the window
    /// center epsilon, exposing the crossover structure.
    pub local_slopes: Vec<(f64, f64)>,
}

/// Least-squares slope of `log ell` against `log eps`.
fn log_log_slope(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(e, l) in pairs {
        let x = e.ln();
        let y = l.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Fit the scaling exponent of `(eps, ell)` data spanning at least two
/// decades with at least ten points; the dimension estimate is `1 - slope`.
pub fn scaling_exponent(nu: f64, lengths: &[(f64, f64)]) -> Result<ScalingReport> {
    if lengths.len() < 10 {
        return Err(Error::InsufficientSamples {
            got: lengths.len(),
            needed: 10,
            detail: "scaling exponent".into(),
        });
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &(e, _) in lengths {
        lo = lo.min(e);
        hi = hi.max(e);
    }
    let span = (hi / lo).log10();
    if span < 2.0 {
        return Err(Error::InsufficientDecadeSpan {
            got: span,
            needed: 2.0,
        });
    }

    let slope = log_log_slope(lengths);
    let dim_estimate = 1.0 - slope;
    let content_proxy = lengths
        .iter()
        .map(|&(e, l)| (e, l / e.powf(1.0 - dim_estimate)))
        .collect();
    // Sliding 5-point local slopes expose the crossover rather than hiding
    // it in one global fit.
    let mut local_slopes = Vec::new();
    if lengths.len() >= 5 {
        for w in lengths.windows(5) {
            local_slopes.push((w[2].0, log_log_slope(w)));
        }
    }
    Ok(ScalingReport {
        nu,
        slope,
        dim_estimate,
        content_proxy,
        local_slopes,
    })
}

/// Total neighborhood lengths of an orbit over an epsilon grid.
pub fn orbit_lengths(orbit: &Orbit, eps_grid: &[f64]) -> Vec<(f64, f64)> {
    eps_grid
        .iter()
        .map(|&e| (e, neighborhood_length(&orbit.points, e)))
        .collect()
}

/// Dimension report for one `(field, nu, x0)` from total neighborhood
/// lengths over the grid. The orbit is truncated at `eps_min / 10`.
pub fn dimension_report(fatou: &Fatou, x0: f64, eps_grid: &[f64]) -> Result<ScalingReport> {
    let eps_min = eps_grid
        .first()
        .copied()
        .ok_or(Error::InsufficientSamples {
            got: 0,
            needed: 10,
            detail: "empty epsilon grid".into(),
        })?;
    let orbit = generate_orbit(fatou, x0, eps_min / 10.0, 10_000_000)?;
    scaling_exponent(fatou.nu, &orbit_lengths(&orbit, eps_grid))
}

/// One row of the content blow-up table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContentRow {
    pub nu: f64,
    /// Median of `ell / sqrt(eps)` over the window.
    pub median_content: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median of `ell / sqrt(eps)` per parameter value over the window.
///
/// The orbit truncation floor is `eps_min / 100` here: the parabolic
/// content plateau needs the deeper tail to stay flat across the window.
pub fn content_blowup<'a>(
    fatous: impl IntoIterator<Item = &'a Fatou<'a>>,
    x0: f64,
    eps_grid: &[f64],
) -> Result<Vec<ContentRow>> {
    let eps_min = eps_grid
        .first()
        .copied()
        .ok_or(Error::InsufficientSamples {
            got: 0,
            needed: 1,
            detail: "empty epsilon grid".into(),
        })?;
    let mut rows = Vec::new();
    for fatou in fatous {
        let orbit = generate_orbit(fatou, x0, eps_min / 100.0, 10_000_000)?;
        let mut proxies: Vec<f64> = eps_grid
            .iter()
            .map(|&e| neighborhood_length(&orbit.points, e) / e.sqrt())
            .collect();
        rows.push(ContentRow {
            nu: fatou.nu,
            median_content: median(&mut proxies),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{AnalysisBox, Field, ModelParams};
    use crate::grid::log_grid;

    fn model_field() -> Field {
        Field::model(ModelParams::constant(0.0), AnalysisBox::default()).unwrap()
    }

    #[test]
    fn synthetic_slopes() {
        // ell = eps gives dimension 0 exactly; ell = sqrt(eps) gives 1/2.
        let grid = log_grid(1e-8, 1e-4, 10);
        let linear: Vec<(f64, f64)> = grid.iter().map(|&e| (e, e)).collect();
        let rep = scaling_exponent(0.0, &linear).unwrap();
        assert!((rep.dim_estimate - 0.0).abs() < 1e-12);

        let sqrt: Vec<(f64, f64)> = grid.iter().map(|&e| (e, e.sqrt())).collect();
        let rep = scaling_exponent(0.0, &sqrt).unwrap();
        assert!((rep.dim_estimate - 0.5).abs() < 1e-12);
        // Content proxy of sqrt data is constant 1.
        for &(_, c) in &rep.content_proxy {
            assert!((c - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn parabolic_dimension_is_one_half() {
        let field = model_field();
        let fatou = Fatou::new(&field, 0.0, 1.0).unwrap();
        let grid = log_grid(1e-8, 1e-4, 40);
        let rep = dimension_report(&fatou, 1.0, &grid).unwrap();
        assert!(
            (rep.dim_estimate - 0.5).abs() < 0.05,
            "dimension estimate {}",
            rep.dim_estimate
        );
        assert!(rep.slope >= 0.0 && rep.slope <= 1.0);
    }

    #[test]
    fn hyperbolic_dimension_is_near_zero() {
        let field = model_field();
        let fatou = Fatou::new(&field, 0.01, 1.0).unwrap();
        let grid = log_grid(1e-10, 1e-7, 40);
        let rep = dimension_report(&fatou, 1.0, &grid).unwrap();
        assert!(
            rep.dim_estimate <= 0.1,
            "dimension estimate {}",
            rep.dim_estimate
        );
    }

    #[test]
    fn content_blows_up_toward_bifurcation() {
        let field = model_field();
        let grid = log_grid(1e-9, 1e-7, 20);
        let f2 = Fatou::new(&field, 1e-2, 1.0).unwrap();
        let f3 = Fatou::new(&field, 1e-3, 1.0).unwrap();
        let f4 = Fatou::new(&field, 1e-4, 1.0).unwrap();
        let rows = content_blowup([&f2, &f3, &f4], 1.0, &grid).unwrap();
        assert!(
            rows[0].median_content < rows[1].median_content
                && rows[1].median_content < rows[2].median_content,
            "medians not increasing toward nu = 0: {rows:?}"
        );
    }

    #[test]
    fn parabolic_content_plateau_is_flat() {
        let field = model_field();
        let fatou = Fatou::new(&field, 0.0, 1.0).unwrap();
        let grid = log_grid(1e-9, 1e-7, 20);
        let orbit = generate_orbit(&fatou, 1.0, 1e-11, 10_000_000).unwrap();
        let proxies: Vec<f64> = grid
            .iter()
            .map(|&e| neighborhood_length(&orbit.points, e) / e.sqrt())
            .collect();
        let max = proxies.iter().fold(0.0f64, |m, &v| m.max(v));
        let min = proxies.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        assert!(
            (max - min) / max <= 0.10,
            "plateau spread {} (min {min}, max {max})",
            (max - min) / max
        );
    }

    #[test]
    fn crossover_local_slopes_transition() {
        // nu > 0: local slope near 1/2 for eps >> nu, drifting toward 1
        // for eps << nu^2; bucket means must rise monotonically as eps
        // falls across the window.
        let field = model_field();
        let fatou = Fatou::new(&field, 1e-4, 1.0).unwrap();
        let grid = log_grid(1e-10, 3e-3, 20);
        let rep = dimension_report(&fatou, 1.0, &grid).unwrap();
        let slopes = &rep.local_slopes;
        let third = slopes.len() / 3;
        let mean = |s: &[(f64, f64)]| s.iter().map(|p| p.1).sum::<f64>() / s.len() as f64;
        let small_eps = mean(&slopes[..third]);
        let mid_eps = mean(&slopes[third..2 * third]);
        let large_eps = mean(&slopes[2 * third..]);
        assert!(
            small_eps > mid_eps && mid_eps > large_eps,
            "no monotone transition: {small_eps} / {mid_eps} / {large_eps}"
        );
        assert!(large_eps < 0.65, "slope at large eps: {large_eps}");
        assert!(small_eps > 0.85, "slope at small eps: {small_eps}");
    }

    #[test]
    fn error_paths() {
        let few = [(1e-3, 1.0), (1e-4, 0.5)];
        assert!(matches!(
            scaling_exponent(0.0, &few),
            Err(Error::InsufficientSamples { .. })
        ));
        let narrow: Vec<(f64, f64)> = (0..12).map(|i| (1e-4 + i as f64 * 1e-6, 1.0)).collect();
        assert!(matches!(
            scaling_exponent(0.0, &narrow),
            Err(Error::InsufficientDecadeSpan { .. })
        ));
    }
}
