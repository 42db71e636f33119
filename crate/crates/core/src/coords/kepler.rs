use std::f64::consts::{PI, TAU};

use crate::error::{domain, Error, Result};

/// Residual target for the Kepler equation.
pub const KEPLER_TOL: f64 = 2e-15;

/// Solve `zeta - e sin zeta = ell` for the eccentric anomaly.
///
/// The result lies in the same `2π` branch as `ell` (that is, `ell` is
/// reduced to `[-π, π)`, solved, and the multiple of `2π` added back).
/// Newton iteration from `ell + e sin ell`, falling back to bisection of the
/// bracket `[ell - e, ell + e]` whenever `|1 - e cos zeta| < 1e-3` or a step
/// leaves the bracket.
pub fn solve_kepler(e: f64, ell: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(domain(format!("eccentricity must be in [0, 1), got {e}")));
    }
    if !ell.is_finite() {
        return Err(domain("mean anomaly is not finite"));
    }
    if e == 0.0 {
        return Ok(ell);
    }
    let k = ((ell + PI) / TAU).floor();
    let m = ell - k * TAU;
    let f = |z: f64| z - e * z.sin() - m;
    let (mut lo, mut hi) = (m - e, m + e);
    let mut z = m + e * m.sin();
    for _ in 0..100 {
        let r = f(z);
        if r.abs() <= KEPLER_TOL * m.abs().max(1.0) {
            return Ok(z + k * TAU);
        }
        if r > 0.0 {
            hi = hi.min(z);
        } else {
            lo = lo.max(z);
        }
        let d = 1.0 - e * z.cos();
        let newton = z - r / d;
        if d.abs() >= 1e-3 && (r / d).abs() <= f64::EPSILON * z.abs().max(1.0) {
            return Ok(newton + k * TAU);
        }
        z = if d.abs() < 1e-3 || !(newton > lo && newton < hi) {
            0.5 * (lo + hi)
        } else {
            newton
        };
        if hi - lo <= f64::EPSILON * m.abs().max(1.0) {
            return Ok(z + k * TAU);
        }
    }
    Err(Error::NotConverged(format!("Kepler equation e = {e}, ell = {ell}")))
}

pub fn mean_from_eccentric(e: f64, zeta: f64) -> f64 {
    zeta - e * zeta.sin()
}

pub fn eccentric_from_true(e: f64, theta: f64) -> f64 {
    let half = ((1.0 - e) / (1.0 + e)).sqrt() * (0.5 * theta).tan();
    // keep the branch of theta
    let base = 2.0 * half.atan();
    base + TAU * ((theta + PI) / TAU).floor()
}

pub fn true_from_eccentric(e: f64, zeta: f64) -> f64 {
    let s = (1.0 - e * e).sqrt() * zeta.sin();
    let c = zeta.cos() - e;
    let base = s.atan2(c);
    base + TAU * ((zeta + PI) / TAU).floor()
}
