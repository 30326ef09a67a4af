//! Orbits of the time-one map, discrete and continuous critical times,
//! tail lengths, the sawtooth correction and the epsilon-neighborhood
//! measure.
//!
//! The orbit of `x0` is the decreasing sequence `x_n = f^n(x0)` converging
//! to the attracting fixed point. For a radius `epsilon`, the tail is the
//! part of the neighborhood where consecutive `2 epsilon`-intervals are
//! still disjoint; the index where they start to overlap is the discrete
//! critical time, and its continuous counterpart comes from the Fatou
//! coordinate.

use crate::error::{Error, Result};
use crate::fatou::Fatou;

/// Why orbit generation stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GapBelowFloor,
    MaxIterations,
}

/// A finite forward orbit of the time-one map.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub nu: f64,
    pub x0: f64,
    /// Strictly decreasing points `x_0 > x_1 > ... > x1`.
    pub points: Vec<f64>,
    pub stop_reason: StopReason,
}

impl Orbit {
    /// Consecutive gaps `x_n - x_{n+1}`, decreasing along the orbit.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.windows(2).map(|w| w[0] - w[1])
    }
}

/// Tail and neighborhood data for one `(epsilon, nu)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodMeasure {
    pub epsilon: f64,
    pub n_discrete: usize,
    pub tau_continuous: f64,
    /// `n * 2 epsilon`.
    pub tail_discrete: f64,
    /// `tau * 2 epsilon`.
    pub tail_continuous: f64,
    /// Lebesgue measure of the epsilon-neighborhood of the stored points.
    pub total_length: f64,
}

/// Iterate the time-one map from `x0` until the gap to the next point
/// drops below `gap_floor` or `max_iter` points have been stored.
pub fn generate_orbit(fatou: &Fatou, x0: f64, gap_floor: f64, max_iter: usize) -> Result<Orbit> {
    if x0 <= fatou.x1 {
        return Err(Error::InvalidParameter {
            name: "x0",
            reason: format!("x0 = {x0} must exceed the attracting point {}", fatou.x1),
        });
    }
    let mut points = vec![x0];
    let mut current = x0;
    let stop_reason = loop {
        if points.len() >= max_iter {
            break StopReason::MaxIterations;
        }
        let next = fatou.time_one(current)?;
        if current - next < gap_floor {
            break StopReason::GapBelowFloor;
        }
        points.push(next);
        current = next;
    };
    Ok(Orbit {
        nu: fatou.nu,
        x0,
        points,
        stop_reason,
    })
}

/// First index `n` whose gap satisfies `x_n - x_{n+1} <= 2 epsilon`
/// (ties belong to the tail boundary). Gaps decrease along the orbit, so
/// a binary search gives the defining pair of inequalities.
pub fn discrete_critical_index(orbit: &Orbit, epsilon: f64) -> Result<usize> {
    let two_eps = 2.0 * epsilon;
    let gaps: Vec<f64> = orbit.gaps().collect();
    if gaps.is_empty() || gaps[gaps.len() - 1] > two_eps {
        return Err(Error::OrbitTooShort {
            epsilon,
            min_gap: gaps.last().copied().unwrap_or(f64::INFINITY),
        });
    }
    // partition_point over the decreasing gap sequence.
    let n = gaps.partition_point(|&g| g > two_eps);
    Ok(n)
}

/// Continuous critical time `tau = psi(g^{-1}(2 epsilon)) - psi(x0)`.
pub fn continuous_critical_time(fatou: &Fatou, x0: f64, epsilon: f64) -> Result<f64> {
    let y = fatou.displacement_inverse(2.0 * epsilon)?;
    Ok(fatou.psi(y)? - fatou.psi(x0)?)
}

/// The period-1 sawtooth: `G(s) = 1 - frac(s)` for non-integer `s`, else 0.
pub fn sawtooth_g(s: f64) -> f64 {
    let frac = s - s.floor();
    if frac == 0.0 {
        0.0
    } else {
        1.0 - frac
    }
}

/// Lebesgue measure of the union of `[p - eps, p + eps]` over sorted
/// (decreasing) points: a single sweep merging overlapping intervals.
pub fn neighborhood_length(points_decreasing: &[f64], epsilon: f64) -> f64 {
    let mut total = 0.0;
    let mut iter = points_decreasing.iter().rev();
    let Some(&first) = iter.next() else {
        return 0.0;
    };
    let mut lo = first - epsilon;
    let mut hi = first + epsilon;
    for &p in iter {
        let (a, b) = (p - epsilon, p + epsilon);
        if a <= hi {
            hi = b.max(hi);
        } else {
            total += hi - lo;
            lo = a;
            hi = b;
        }
    }
    total + (hi - lo)
}

/// All tail/neighborhood quantities for one epsilon, reusing a generated
/// orbit (the orbit must extend past the overlap region for this epsilon).
pub fn tail_lengths_with_orbit(
    fatou: &Fatou,
    orbit: &Orbit,
    epsilon: f64,
) -> Result<NeighborhoodMeasure> {
    let n = discrete_critical_index(orbit, epsilon)?;
    let tau = continuous_critical_time(fatou, orbit.x0, epsilon)?;
    let two_eps = 2.0 * epsilon;
    Ok(NeighborhoodMeasure {
        epsilon,
        n_discrete: n,
        tau_continuous: tau,
        tail_discrete: n as f64 * two_eps,
        tail_continuous: tau * two_eps,
        total_length: neighborhood_length(&orbit.points, epsilon),
    })
}

/// Convenience form generating a fresh orbit truncated at `epsilon / 10`.
pub fn tail_lengths(fatou: &Fatou, x0: f64, epsilon: f64) -> Result<NeighborhoodMeasure> {
    let orbit = generate_orbit(fatou, x0, epsilon / 10.0, 10_000_000)?;
    tail_lengths_with_orbit(fatou, &orbit, epsilon)
}
