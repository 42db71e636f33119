#![allow(dead_code)]

use euler2c::{CartesianState, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(r: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Keplerian-bound state (for mass `m`) away from both centres.
pub fn bound_state(r: &mut ChaCha8Rng, m: f64) -> CartesianState {
    loop {
        let x = unit(r) * r.random_range(0.5..1.5);
        let xprime = unit(r) * r.random_range(1.5..3.0);
        if (x - xprime).norm() < 0.3 {
            continue;
        }
        let vmax = (2.0 * m / x.norm()).sqrt();
        let y = unit(r) * r.random_range(0.2..0.85) * vmax;
        let s = CartesianState::new(y, x, xprime).with_yprime(unit(r) * r.random_range(0.0..0.5));
        let e = s.angular_momentum().norm();
        if e > 0.05 {
            return s;
        }
    }
}

/// Bound state with every vector in the `(1,2)` plane.
pub fn planar_state(r: &mut ChaCha8Rng, m: f64) -> CartesianState {
    let mut s = bound_state(r, m);
    for v in [&mut s.y, &mut s.x, &mut s.xprime, &mut s.yprime] {
        v[2] = 0.0;
    }
    if s.angular_momentum().norm() < 0.05 || (s.x - s.xprime).norm() < 0.3 || s.x.norm() < 0.3 {
        return planar_state(r, m);
    }
    s
}

/// Rescaled SEA Hamiltonian assembled directly from the heliocentric
/// three-body expression `H = eps^-1 Hbar(mu y', mu y, x', x)`.
pub fn sea_direct(s: &CartesianState, eps: f64, mu: f64) -> f64 {
    let (yb_p, yb) = (mu * s.yprime, mu * s.y);
    let m = 1.0 / (1.0 + mu);
    let mp = 1.0 / (1.0 + eps);
    let hbar = yb_p.norm_squared() / (2.0 * eps * mp) - eps / s.xprime.norm() + yb.norm_squared() / (2.0 * mu * m)
        - mu / s.x.norm()
        - mu * eps / (s.xprime - s.x).norm()
        + yb_p.dot(&yb);
    hbar / eps
}
