use serde::{Deserialize, Serialize};

use super::kepler::solve_kepler;
use crate::error::{domain, Degeneracy, Error, Result};
use crate::integrals::{self, node_degeneracies, CIRCULAR_E};
use crate::state::{k_axis, oriented_angle, rotate_about, wrap_2pi, CartesianState, MassParams, Vec3};

/// Delaunay-type chart: the Keplerian quadruplet `(Lambda, G, ell, g)` of the
/// attracted body together with the coordinates of the second centre and of
/// the total angular momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaunayElements {
    /// `sqrt(m a)`
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    /// `|C|`
    #[serde(rename = "G")]
    pub g_norm: f64,
    pub ell: f64,
    pub g: f64,
    #[serde(rename = "Theta")]
    pub theta: f64,
    pub vartheta: f64,
    pub rprime: f64,
    #[serde(rename = "Rprime", default)]
    pub rprime_momentum: f64,
    /// `C_t . k`
    #[serde(rename = "Z", default)]
    pub z_action: f64,
    /// `|C_t|`
    #[serde(rename = "Gtot", default)]
    pub gtot: f64,
    /// Node longitude of `C_t`.
    #[serde(rename = "z", default)]
    pub z_angle: f64,
    #[serde(default)]
    pub gamma: f64,
}

impl DelaunayElements {
    /// Planar elements (`Theta = 0`) with the second centre on the positive
    /// first axis, `C` along `+k` and `y' = 0`.
    pub fn planar(lambda: f64, g_norm: f64, ell: f64, g: f64, rprime: f64) -> Self {
        Self {
            lambda,
            g_norm,
            ell,
            g,
            theta: 0.0,
            // C parallel to C_t
            vartheta: std::f64::consts::PI,
            rprime,
            rprime_momentum: 0.0,
            z_action: g_norm,
            gtot: g_norm,
            z_angle: 0.0,
            gamma: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn semi_major_axis(&self, m: f64) -> f64 {
        self.lambda * self.lambda / m
    }

    pub fn eccentricity(&self) -> f64 {
        (1.0 - (self.g_norm / self.lambda).powi(2)).max(0.0).sqrt()
    }
}

/// Elements plus the list of chart degeneracies. Angles whose defining
/// vectors vanish are set by fixed conventions (see
/// [`cartesian_to_delaunay`]) and reported here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelaunayChart {
    pub elements: DelaunayElements,
    pub degeneracies: Vec<Degeneracy>,
}

impl DelaunayChart {
    pub fn is_regular(&self) -> bool {
        self.degeneracies.is_empty()
    }

    /// Elements, or an error listing the degeneracies.
    pub fn require_regular(self) -> Result<DelaunayElements> {
        if self.degeneracies.is_empty() {
            Ok(self.elements)
        } else {
            Err(Error::Degenerate(self.degeneracies))
        }
    }

    /// Elements if the Keplerian quadruplet itself is well defined
    /// (`G > 0`, `e > 0`, node `n` non-zero); node degeneracies of `C_t`
    /// are tolerated.
    pub fn orbit_regular(self) -> Result<DelaunayElements> {
        let bad: Vec<_> = self
            .degeneracies
            .iter()
            .copied()
            .filter(|d| matches!(d, Degeneracy::MomentumZero | Degeneracy::CircularOrbit | Degeneracy::NodeN))
            .collect();
        if bad.is_empty() {
            Ok(self.elements)
        } else {
            Err(Error::Degenerate(bad))
        }
    }
}

/// Keplerian energy `|y|^2/(2m) - 1/|x|`.
pub fn kepler_energy(s: &CartesianState, m: f64) -> Result<f64> {
    let r = s.x.norm();
    if r == 0.0 {
        return Err(domain("Keplerian energy undefined at x = 0"));
    }
    Ok(s.y.norm_squared() / (2.0 * m) - 1.0 / r)
}

/// Cartesian state to the Delaunay-type chart.
///
/// Conventions at degeneracies (always flagged): with `C_t` along `±k`
/// the node `n0` is replaced by the first axis `i`, so `z = 0`; with a
/// circular orbit the pericentre is placed on the node line, so `g = 0`
/// and `ell` is measured from there. Other undefined angles are set to 0.
pub fn cartesian_to_delaunay(s: &CartesianState, p: &MassParams) -> Result<DelaunayChart> {
    let m = p.m;
    let k = kepler_energy(s, m)?;
    if !(k < 0.0) {
        return Err(Error::Unbound(k));
    }
    let rprime = s.xprime.norm();
    if rprime == 0.0 {
        return Err(Error::Degenerate(vec![Degeneracy::CentreAtOrigin]));
    }
    let a = -1.0 / (2.0 * k);
    let lambda = (m * a).sqrt();
    let c = s.angular_momentum();
    let g_norm = c.norm();
    let l = integrals::eccentricity_vector(s, m)?;
    let e = l.norm() / m;
    let ct = s.total_angular_momentum();
    let xph = s.xprime / rprime;

    let mut degeneracies = node_degeneracies(s);
    let circular = e < CIRCULAR_E;
    if circular {
        degeneracies.push(Degeneracy::CircularOrbit);
    }
    let has = |d: Degeneracy, list: &[Degeneracy]| list.contains(&d);

    let n0 = if has(Degeneracy::NodeN0, &degeneracies) { Vec3::x() } else { k_axis().cross(&ct) };
    let n1 = ct.cross(&s.xprime);
    let n = s.xprime.cross(&c);

    let z_angle = if has(Degeneracy::NodeN0, &degeneracies) { 0.0 } else { oriented_angle(&k_axis(), &Vec3::x(), &n0) };
    let gamma = if has(Degeneracy::TotalMomentumZero, &degeneracies) || has(Degeneracy::NodeN1, &degeneracies) {
        0.0
    } else {
        oriented_angle(&ct, &n0, &n1)
    };
    let vartheta = if has(Degeneracy::NodeN1, &degeneracies) || has(Degeneracy::NodeN, &degeneracies) {
        0.0
    } else {
        oriented_angle(&s.xprime, &n1, &n)
    };
    let orbit_ok = !has(Degeneracy::MomentumZero, &degeneracies) && !has(Degeneracy::NodeN, &degeneracies);

    let (g, ell) = if !orbit_ok {
        (0.0, 0.0)
    } else if circular {
        // pericentre on the node line: P = n x C / |n x C|
        let p_dir = n.cross(&c);
        (0.0, oriented_angle(&c, &p_dir, &s.x))
    } else {
        let g = oriented_angle(&c, &n, &c.cross(&l));
        let r = s.x.norm();
        let zeta = (s.x.dot(&s.y) / lambda).atan2(1.0 - r / a);
        (g, wrap_2pi(zeta - e * zeta.sin()))
    };

    Ok(DelaunayChart {
        elements: DelaunayElements {
            lambda,
            g_norm,
            ell,
            g,
            theta: c.dot(&xph),
            vartheta,
            rprime,
            rprime_momentum: s.yprime.dot(&xph),
            z_action: ct.dot(&k_axis()),
            gtot: ct.norm(),
            z_angle,
            gamma,
        },
        degeneracies,
    })
}

fn safe_sqrt(v: f64) -> f64 {
    v.max(0.0).sqrt()
}

/// Inverse of [`cartesian_to_delaunay`] (including its conventions at
/// the node degeneracies of `C_t` and at circular orbits).
pub fn delaunay_to_cartesian(d: &DelaunayElements, p: &MassParams) -> Result<CartesianState> {
    let m = p.m;
    if !(d.lambda > 0.0 && d.g_norm > 0.0 && d.g_norm <= d.lambda * (1.0 + 1e-14)) {
        return Err(domain(format!("need 0 < G <= Lambda, got G = {}, Lambda = {}", d.g_norm, d.lambda)));
    }
    if !(d.theta.abs() <= d.g_norm) {
        return Err(domain(format!("need |Theta| <= G, got Theta = {}, G = {}", d.theta, d.g_norm)));
    }
    if !(d.rprime > 0.0) {
        return Err(domain("r' must be positive"));
    }
    if !(d.gtot > 0.0 && d.z_action.abs() <= d.gtot * (1.0 + 1e-14) && d.theta.abs() <= d.gtot * (1.0 + 1e-14)) {
        return Err(domain(format!(
            "need |Z|, |Theta| <= Gtot > 0, got Z = {}, Theta = {}, Gtot = {}",
            d.z_action, d.theta, d.gtot
        )));
    }
    let k = k_axis();
    let n0h = Vec3::new(d.z_angle.cos(), d.z_angle.sin(), 0.0);
    let ct = k * d.z_action + n0h.cross(&k) * safe_sqrt(d.gtot * d.gtot - d.z_action * d.z_action);
    let cth = ct / ct.norm();
    let n1h = rotate_about(&cth, &n0h, d.gamma);
    let ct_cos = d.theta / d.gtot;
    let xph = cth * ct_cos + n1h.cross(&cth) * safe_sqrt(1.0 - ct_cos * ct_cos);
    let xprime = xph * d.rprime;

    let nh = rotate_about(&xph, &n1h, d.vartheta);
    let c = xph * d.theta + nh.cross(&xph) * safe_sqrt(d.g_norm * d.g_norm - d.theta * d.theta);
    let cprime = ct - c;
    let yprime = xph * d.rprime_momentum + cprime.cross(&xprime) / (d.rprime * d.rprime);

    let ch = c / c.norm();
    let q = rotate_about(&ch, &nh, d.g);
    let pv = q.cross(&ch);
    let a = d.lambda * d.lambda / m;
    let e = d.eccentricity();
    let zeta = solve_kepler(e, d.ell)?;
    let (sz, cz) = zeta.sin_cos();
    let be = safe_sqrt(1.0 - e * e);
    let x = pv * (a * (cz - e)) + q * (a * be * sz);
    let nmean = 1.0 / (m.sqrt() * a.powf(1.5));
    let vfac = nmean * a / (1.0 - e * cz);
    let y = (pv * (-sz) + q * (be * cz)) * (m * vfac);
    Ok(CartesianState { y, x, yprime, xprime })
}

/// Euler integral `G0` in chart variables:
/// `G^2 + m r' sqrt(1 - Theta^2/G^2) sqrt(1 - G^2/Lambda^2) cos g`.
pub fn g0_in_chart(d: &DelaunayElements, m: f64) -> Result<f64> {
    g0_from_parts(d.rprime, d.lambda, d.theta, d.g_norm, d.g, m)
}

pub fn g0_from_parts(rprime: f64, lambda: f64, theta: f64, g_norm: f64, g: f64, m: f64) -> Result<f64> {
    if !(g_norm > 0.0) {
        return Err(domain("G0 chart expression is singular at G = 0"));
    }
    let s1 = safe_sqrt(1.0 - (theta / g_norm).powi(2));
    let s2 = safe_sqrt(1.0 - (g_norm / lambda).powi(2));
    Ok(g_norm * g_norm + m * rprime * s1 * s2 * g.cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> MassParams {
        MassParams::two_centre(1.0, 0.0).unwrap()
    }

    #[test]
    fn circular_state_is_flagged() {
        let s = CartesianState::new(Vec3::new(0.0, 1.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0));
        let ch = cartesian_to_delaunay(&s, &params()).unwrap();
        assert!((ch.elements.lambda - 1.0).abs() < 1e-15);
        assert!((ch.elements.g_norm - 1.0).abs() < 1e-15);
        assert!(ch.degeneracies.contains(&Degeneracy::CircularOrbit));
        assert!(ch.clone().orbit_regular().is_err());
        let back = delaunay_to_cartesian(&ch.elements, &params()).unwrap();
        assert!(back.max_abs_diff(&s) < 1e-14);
    }

    #[test]
    fn eccentric_planar_state() {
        let s = CartesianState::new(Vec3::new(0.0, 1.2, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0));
        let d = cartesian_to_delaunay(&s, &params()).unwrap().orbit_regular().unwrap();
        assert!((d.lambda - 1.0 / 0.56f64.sqrt()).abs() < 1e-14);
        assert!((d.g_norm - 1.2).abs() < 1e-15);
        assert!((d.eccentricity() - 0.44).abs() < 1e-14);
        // pericentre on +x, C along +k, x' on +x: P at angle g - pi
        assert!((d.g - std::f64::consts::PI).abs() < 1e-14);
        assert!(d.ell.abs() < 1e-14);
        let back = delaunay_to_cartesian(&d, &params()).unwrap();
        assert!(back.max_abs_diff(&s) < 1e-13);
    }

    #[test]
    fn hyperbolic_is_rejected() {
        let s = CartesianState::new(Vec3::new(0.0, 1.5, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0));
        assert!(matches!(cartesian_to_delaunay(&s, &params()), Err(Error::Unbound(_))));
    }

    #[test]
    fn chart_g0_trivial_cases() {
        let d = DelaunayElements::planar(1.0, 1.0, 0.3, 0.7, 0.5);
        assert_eq!(g0_in_chart(&d, 1.0).unwrap(), 1.0);
        let d = DelaunayElements::planar(1.0, 0.6, 0.3, std::f64::consts::FRAC_PI_2, 0.5);
        assert!((g0_in_chart(&d, 1.0).unwrap() - 0.36).abs() < 1e-15);
        let d = DelaunayElements::planar(1.0, 0.0, 0.3, 0.0, 0.5);
        assert!(g0_in_chart(&d, 1.0).is_err());
    }

    #[test]
    fn planar_constructor_roundtrip() {
        let d = DelaunayElements::planar(1.1, 0.7, 2.0, 1.3, 0.4);
        let s = delaunay_to_cartesian(&d, &params()).unwrap();
        assert!((s.xprime - Vec3::new(0.4, 0.0, 0.0)).norm() < 1e-15);
        assert!((s.angular_momentum() - Vec3::new(0.0, 0.0, 0.7)).norm() < 1e-14);
        let back = cartesian_to_delaunay(&s, &params()).unwrap().orbit_regular().unwrap();
        for (u, v) in [(back.ell, d.ell), (back.g, d.g), (back.lambda, d.lambda), (back.g_norm, d.g_norm)] {
            assert!((u - v).abs() < 1e-13);
        }
    }
}
