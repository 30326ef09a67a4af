//! Logarithmic epsilon-grids. All fitted behavior lives in `log eps`, so
//! grids are geometric by construction.

/// Geometric grid from `min` to `max` with `per_decade` points per decade,
/// ascending, endpoints included (the last point may fall slightly short
/// of `max` to keep exact geometric spacing).
pub fn log_grid(min: f64, max: f64, per_decade: usize) -> Vec<f64> {
    assert!(min > 0.0 && max > min && per_decade > 0);
    let decades = (max / min).log10();
    let n = (decades * per_decade as f64).floor() as usize + 1;
    log_grid_n(min, max, n.max(2))
}

/// Geometric grid with exactly `n` points from `min` to `max`, ascending.
pub fn log_grid_n(min: f64, max: f64, n: usize) -> Vec<f64> {
    assert!(min > 0.0 && max > min && n >= 2);
    let l0 = min.log10();
    let l1 = max.log10();
    (0..n)
        .map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (n - 1) as f64))
        .collect()
}
