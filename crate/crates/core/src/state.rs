//! Phase-space state and mass parameters shared by every module.
//!
//! The ground-truth representation is Cartesian: impulse/position of the
//! attracted body `(y, x)` and of the second centre `(y', x')`. In the
//! two-centre problem `x'` is fixed and `y'` only carries the enlarged
//! phase-space bookkeeping (it is what makes `C_t = x' x y' + x x y` a
//! conserved vector).

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub type Vec3 = Vector3<f64>;

/// Reference axis `k` of the fixed orthonormal frame.
pub fn k_axis() -> Vec3 {
    Vec3::z()
}

/// Mass parameters.
///
/// `m` is the reduced mass of the attracted body, `eps` the ratio of the
/// centre masses. The SEA system additionally uses `mu` (asteroid mass) and
/// `rho = mu / eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassParams {
    pub m: f64,
    pub eps: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub rho: f64,
}

impl MassParams {
    pub fn two_centre(m: f64, eps: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(domain(format!("mass m must be positive, got {m}")));
        }
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(domain(format!("mass ratio eps must be >= 0, got {eps}")));
        }
        Ok(Self {
            m,
            eps,
            mu: 0.0,
            rho: 0.0,
        })
    }

    /// Sun–Earth–Asteroid masses `1, eps, mu` after heliocentric reduction:
    /// `m = 1/(1+mu)`, `rho = mu/eps`.
    pub fn sea(eps: f64, mu: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(domain("SEA requires eps > 0 (rho = mu/eps undefined)"));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(domain(format!("asteroid mass mu must be >= 0, got {mu}")));
        }
        Ok(Self {
            m: 1.0 / (1.0 + mu),
            eps,
            mu,
            rho: mu / eps,
        })
    }

    /// Reduced mass of the second centre in the SEA system, `m' = 1/(1+eps)`.
    pub fn m_prime(&self) -> f64 {
        1.0 / (1.0 + self.eps)
    }
}

/// Cartesian phase-space point `(y', y, x', x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianState {
    /// Impulse of the attracted body.
    pub y: Vec3,
    /// Position of the attracted body.
    pub x: Vec3,
    /// Impulse conjugate to `xprime`; zero unless the caller tracks it.
    #[serde(default = "Vec3::zeros")]
    pub yprime: Vec3,
    /// Position of the second centre.
    pub xprime: Vec3,
}

/// Number of scalar coordinates in a [`CartesianState`].
pub const STATE_DIM: usize = 12;

impl CartesianState {
    pub fn new(y: Vec3, x: Vec3, xprime: Vec3) -> Self {
        Self {
            y,
            x,
            yprime: Vec3::zeros(),
            xprime,
        }
    }

    pub fn with_yprime(mut self, yprime: Vec3) -> Self {
        self.yprime = yprime;
        self
    }

    pub fn is_finite(&self) -> bool {
        [self.y, self.x, self.yprime, self.xprime]
            .iter()
            .all(|v| v.iter().all(|c| c.is_finite()))
    }

    /// Flat layout `[y', y, x', x]` used by the integrator.
    pub fn to_array(&self) -> [f64; STATE_DIM] {
        let mut out = [0.0; STATE_DIM];
        for (block, v) in [self.yprime, self.y, self.xprime, self.x].iter().enumerate() {
            out[3 * block..3 * block + 3].copy_from_slice(v.as_slice());
        }
        out
    }

    pub fn from_array(a: &[f64; STATE_DIM]) -> Self {
        let v = |i: usize| Vec3::new(a[i], a[i + 1], a[i + 2]);
        Self {
            yprime: v(0),
            y: v(3),
            xprime: v(6),
            x: v(9),
        }
    }

    /// Momentum flip used for time reversal of Hamiltonians even in impulses.
    pub fn reversed(&self) -> Self {
        Self {
            y: -self.y,
            yprime: -self.yprime,
            ..*self
        }
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn angular_momentum(&self) -> Vec3 {
        self.x.cross(&self.y)
    }

    pub fn total_angular_momentum(&self) -> Vec3 {
        self.xprime.cross(&self.yprime) + self.x.cross(&self.y)
    }
}

/// Positively oriented angle from `u` to `v` seen from `w` (right-hand rule),
/// in `[0, 2π)`. `u` and `v` are assumed orthogonal to `w`.
pub fn oriented_angle(w: &Vec3, u: &Vec3, v: &Vec3) -> f64 {
    let wn = w.normalize();
    let ang = wn.dot(&u.cross(v)).atan2(u.dot(v));
    wrap_2pi(ang)
}

pub fn wrap_2pi(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = a.rem_euclid(tau);
    // rem_euclid can round up to exactly tau
    if r >= tau {
        0.0
    } else {
        r
    }
}

/// Wrap to `(-π, π]`.
pub fn wrap_pi(a: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let r = wrap_2pi(a);
    if r > pi {
        r - std::f64::consts::TAU
    } else {
        r
    }
}

/// Rotate `v` by `angle` about the unit axis `axis` (Rodrigues).
pub fn rotate_about(axis: &Vec3, v: &Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(v) * s + axis * axis.dot(v) * (1.0 - c)
}
