//! First integrals: angular momenta, eccentricity vector, the Euler integral
//! in its asymmetric and symmetric forms, and trajectory drift reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{SymmetricParams, Trajectory};
use crate::error::{domain, Degeneracy, Error, Result};
use crate::state::{k_axis, CartesianState, MassParams, Vec3};

/// Below this eccentricity the pericentre direction is treated as undefined.
pub const CIRCULAR_E: f64 = 1e-12;

/// Relative threshold under which a node vector counts as vanishing.
pub const NODE_TOL: f64 = 1e-12;

pub fn angular_momentum(s: &CartesianState) -> Vec3 {
    s.x.cross(&s.y)
}

/// `L = y x C - m x/|x|`, equal to `m e P`.
pub fn eccentricity_vector(s: &CartesianState, m: f64) -> Result<Vec3> {
    let r = s.x.norm();
    if r == 0.0 {
        return Err(domain("eccentricity vector undefined at x = 0"));
    }
    let c = angular_momentum(s);
    Ok(s.y.cross(&c) - s.x * (m / r))
}

/// `G0 = |C|^2 - x'.L`.
pub fn euler_g0(s: &CartesianState, m: f64) -> Result<f64> {
    let c = angular_momentum(s);
    let l = eccentricity_vector(s, m)?;
    if l.norm() / m < CIRCULAR_E {
        return Ok(c.norm_squared());
    }
    Ok(c.norm_squared() - s.xprime.dot(&l))
}

/// `G1 = m (x' - x).x' / |x' - x|`.
pub fn euler_g1(s: &CartesianState, m: f64) -> Result<f64> {
    let d = s.xprime - s.x;
    let n = d.norm();
    if n == 0.0 {
        return Err(Error::Collision { what: "second centre", distance: 0.0, guard: 0.0 });
    }
    Ok(m * d.dot(&s.xprime) / n)
}

/// Euler integral `G = G0 + eps G1` of the two-centre Hamiltonian.
pub fn euler_g(s: &CartesianState, p: &MassParams) -> Result<f64> {
    let g0 = euler_g0(s, p.m)?;
    if p.eps == 0.0 {
        return Ok(g0);
    }
    Ok(g0 + p.eps * euler_g1(s, p.m)?)
}

/// Euler integral of the symmetric Hamiltonian:
/// `|x x y|^2 + (x0.y)^2 + 2 x.x0 (m+/|x+x0| - m-/|x-x0|)`.
pub fn euler_g_sym(y: &Vec3, x: &Vec3, sp: &SymmetricParams) -> Result<f64> {
    let rp = (x + sp.x0).norm();
    let rm = (x - sp.x0).norm();
    if rp == 0.0 || rm == 0.0 {
        return Err(Error::Collision { what: "symmetric centre", distance: 0.0, guard: 0.0 });
    }
    Ok(x.cross(y).norm_squared()
        + sp.x0.dot(y).powi(2)
        + 2.0 * x.dot(&sp.x0) * (sp.m_plus / rp - sp.m_minus / rm))
}

/// The commuting integrals together with the Euler-integral pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralSet {
    /// `C_t . k`
    pub z: f64,
    /// `|C_t|`
    pub gtot: f64,
    /// `C . x' / |x'|`
    pub theta: f64,
    pub rprime: f64,
    /// `|C|`
    pub g_norm: f64,
    pub g0: f64,
    pub g1: f64,
    pub g: f64,
    pub energy: f64,
    /// Vanishing vectors among `C_t`, `C`, `n0`, `n1`, `n`.
    pub degeneracies: Vec<Degeneracy>,
}

pub(crate) fn vanishes(v: &Vec3, scale: f64) -> bool {
    !(v.norm() > NODE_TOL * scale)
}

/// Node vectors `n0 = k x C_t`, `n1 = C_t x x'`, `n = x' x C` and the list
/// of the ones (or of `C_t`, `C`) that vanish.
pub fn node_degeneracies(s: &CartesianState) -> Vec<Degeneracy> {
    let c = angular_momentum(s);
    let ct = s.total_angular_momentum();
    let rp = s.xprime.norm();
    let mut out = Vec::new();
    let scale_c = s.x.norm() * s.y.norm();
    let scale_ct = scale_c + rp * s.yprime.norm();
    if vanishes(&ct, scale_ct) {
        out.push(Degeneracy::TotalMomentumZero);
    }
    if vanishes(&c, scale_c) {
        out.push(Degeneracy::MomentumZero);
    }
    if vanishes(&k_axis().cross(&ct), ct.norm()) {
        out.push(Degeneracy::NodeN0);
    }
    if vanishes(&ct.cross(&s.xprime), ct.norm() * rp) {
        out.push(Degeneracy::NodeN1);
    }
    if vanishes(&s.xprime.cross(&c), rp * c.norm()) {
        out.push(Degeneracy::NodeN);
    }
    out
}

pub fn commuting_set(s: &CartesianState, p: &MassParams) -> Result<IntegralSet> {
    let rprime = s.xprime.norm();
    if rprime == 0.0 {
        return Err(Error::Degenerate(vec![Degeneracy::CentreAtOrigin]));
    }
    let c = angular_momentum(s);
    let ct = s.total_angular_momentum();
    let g0 = euler_g0(s, p.m)?;
    let g1 = euler_g1(s, p.m)?;
    Ok(IntegralSet {
        z: ct.dot(&k_axis()),
        gtot: ct.norm(),
        theta: c.dot(&s.xprime) / rprime,
        rprime,
        g_norm: c.norm(),
        g0,
        g1,
        g: g0 + p.eps * g1,
        energy: crate::dynamics::eval_h(s, p)?,
        degeneracies: node_degeneracies(s),
    })
}

/// Max drift `|f(t) - f(0)| / max(1, |f(0)|)` per monitored quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub samples: usize,
    pub t_final: f64,
    pub drift: BTreeMap<String, f64>,
}

impl ConservationReport {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.drift.get(key).copied()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn max_drift(values: impl Iterator<Item = f64>) -> f64 {
    let mut it = values;
    let Some(f0) = it.next() else { return 0.0 };
    let scale = f0.abs().max(1.0);
    it.map(|f| (f - f0).abs() / scale).fold(0.0, f64::max)
}

pub fn conservation_report(traj: &Trajectory) -> ConservationReport {
    let mut drift = BTreeMap::new();
    drift.insert("energy".into(), max_drift(traj.diagnostics.iter().map(|d| d.energy)));
    drift.insert("G".into(), max_drift(traj.diagnostics.iter().map(|d| d.euler_g)));
    let c: Vec<Vec3> = traj.samples.iter().map(|s| angular_momentum(&s.state)).collect();
    let ct: Vec<Vec3> = traj.samples.iter().map(|s| s.state.total_angular_momentum()).collect();
    for (i, name) in ["C_x", "C_y", "C_z"].iter().enumerate() {
        drift.insert((*name).into(), max_drift(c.iter().map(|v| v[i])));
    }
    drift.insert("Z".into(), max_drift(ct.iter().map(|v| v.dot(&k_axis()))));
    drift.insert("Gtot".into(), max_drift(ct.iter().map(|v| v.norm())));
    ConservationReport {
        samples: traj.samples.len(),
        t_final: traj.samples.last().map_or(0.0, |s| s.t),
        drift,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(y: [f64; 3], x: [f64; 3], xp: [f64; 3]) -> CartesianState {
        CartesianState::new(Vec3::from(y), Vec3::from(x), Vec3::from(xp))
    }

    #[test]
    fn eccentricity_vector_examples() {
        let circ = st([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]);
        assert!(eccentricity_vector(&circ, 1.0).unwrap().norm() < 1e-15);
        let ecc = st([0.0, 1.2, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]);
        let l = eccentricity_vector(&ecc, 1.0).unwrap();
        assert!((l - Vec3::new(0.44, 0.0, 0.0)).norm() < 1e-15);
        assert!(eccentricity_vector(&st([0.0; 3], [0.0; 3], [1.0, 0.0, 0.0]), 1.0).is_err());
    }

    #[test]
    fn g0_examples() {
        let circ = st([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]);
        assert_eq!(euler_g0(&circ, 1.0).unwrap(), 1.0);
        let ecc = st([0.0, 1.2, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]);
        assert!((euler_g0(&ecc, 1.0).unwrap() - 0.56).abs() < 1e-14);
        let merged = st([0.0, 1.2, 0.0], [1.0, 0.0, 0.0], [0.0; 3]);
        assert!((euler_g0(&merged, 1.0).unwrap() - 1.44).abs() < 1e-14);
    }

    #[test]
    fn g_reduces_to_g0_without_second_mass() {
        let s = st([0.1, 0.9, 0.2], [1.0, 0.3, -0.1], [2.0, 0.5, 0.0]);
        let p = MassParams::two_centre(1.0, 0.0).unwrap();
        assert_eq!(euler_g(&s, &p).unwrap(), euler_g0(&s, 1.0).unwrap());
    }

    #[test]
    fn symmetric_g_with_merged_centres() {
        let y = Vec3::new(0.3, 0.8, -0.2);
        let x = Vec3::new(1.0, -0.4, 0.5);
        let sp = SymmetricParams { x0: Vec3::zeros(), m_plus: 0.5, m_minus: 0.5 };
        assert!((euler_g_sym(&y, &x, &sp).unwrap() - x.cross(&y).norm_squared()).abs() < 1e-15);
    }

    #[test]
    fn planar_state_has_zero_theta() {
        let s = st([0.0, 1.1, 0.0], [1.0, 0.2, 0.0], [0.0, 2.0, 0.0]);
        let set = commuting_set(&s, &MassParams::two_centre(1.0, 0.1).unwrap()).unwrap();
        assert_eq!(set.theta, 0.0);
        assert!(set.gtot >= set.z.abs());
        // C_t along k: the node n0 is undefined
        assert!(set.degeneracies.contains(&Degeneracy::NodeN0));
    }

    #[test]
    fn centre_at_origin_is_rejected() {
        let s = st([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0; 3]);
        assert!(matches!(
            commuting_set(&s, &MassParams::two_centre(1.0, 0.1).unwrap()),
            Err(Error::Degenerate(_))
        ));
    }
}
