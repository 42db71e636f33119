use serde::{Deserialize, Serialize};

use crate::dynamics::SymmetricParams;
use crate::error::{domain, Degeneracy, Error, Result};
use crate::state::{oriented_angle, Vec3};

/// Distance from the chart boundary (`lambda = 1`, `|mu| = 1`) treated as
/// degenerate.
pub const BOUNDARY_TOL: f64 = 1e-14;

/// Planar quadruplet `(R, Phi, r, phi)` of the symmetric problem together
/// with the carried `Theta` and `r0 = |x0|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PChartState {
    /// `y.x/|x|`
    #[serde(rename = "R")]
    pub radial: f64,
    /// `|C|`
    #[serde(rename = "Phi")]
    pub phi_norm: f64,
    pub r: f64,
    pub phi: f64,
    #[serde(rename = "Theta")]
    pub theta: f64,
    pub r0: f64,
}

/// `(p_lambda, p_mu, lambda, mu)` with carried `Theta`, `r0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticState {
    pub p_lambda: f64,
    pub p_mu: f64,
    pub lambda: f64,
    pub mu: f64,
    #[serde(rename = "Theta")]
    pub theta: f64,
    pub r0: f64,
}

/// P-chart of `(y, x)` relative to the centre axis `x0`:
/// `phi` is the angle from the node `n = x0 x C` to `C x x` seen from `C`,
/// so that `x0.x = -r0 r sqrt(1 - Theta^2/Phi^2) cos phi`.
pub fn p_chart(y: &Vec3, x: &Vec3, x0: &Vec3) -> Result<PChartState> {
    let r = x.norm();
    let r0 = x0.norm();
    let c = x.cross(y);
    let phi_norm = c.norm();
    if r == 0.0 || r0 == 0.0 {
        return Err(Error::Degenerate(vec![Degeneracy::CentreAtOrigin]));
    }
    if phi_norm == 0.0 {
        return Err(Error::Degenerate(vec![Degeneracy::MomentumZero]));
    }
    let n = x0.cross(&c);
    if n.norm() <= 1e-14 * r0 * phi_norm {
        return Err(Error::Degenerate(vec![Degeneracy::NodeN]));
    }
    Ok(PChartState {
        radial: y.dot(x) / r,
        phi_norm,
        r,
        phi: oriented_angle(&c, &n, &c.cross(x)),
        theta: c.dot(x0) / r0,
        r0,
    })
}

fn sin_incl(pc: &PChartState) -> f64 {
    (1.0 - (pc.theta / pc.phi_norm).powi(2)).max(0.0).sqrt()
}

/// Distances `(r_plus, r_minus)` to the centres at `-x0` and `+x0`.
pub fn centre_distances(pc: &PChartState) -> (f64, f64) {
    let s = sin_incl(pc);
    let base = pc.r0 * pc.r0 + pc.r * pc.r;
    let cross = 2.0 * pc.r0 * pc.r * s * pc.phi.cos();
    ((base - cross).max(0.0).sqrt(), (base + cross).max(0.0).sqrt())
}

/// Symmetric Hamiltonian in the P-chart:
/// `R^2/2 + Phi^2/(2 r^2) - m+/r+ - m-/r-`.
pub fn eval_h_p_chart(pc: &PChartState, m_plus: f64, m_minus: f64) -> Result<f64> {
    let (rp, rm) = centre_distances(pc);
    if rp == 0.0 || rm == 0.0 || pc.r == 0.0 {
        return Err(domain("P-chart point at a centre"));
    }
    Ok(0.5 * pc.radial * pc.radial + pc.phi_norm * pc.phi_norm / (2.0 * pc.r * pc.r) - m_plus / rp - m_minus / rm)
}

fn check_interior(lambda: f64, mu: f64) -> Result<()> {
    if !(lambda - 1.0 > BOUNDARY_TOL && 1.0 - mu.abs() > BOUNDARY_TOL) {
        return Err(Error::Degenerate(vec![Degeneracy::EllipticBoundary]));
    }
    Ok(())
}

/// Elliptic coordinates `lambda = (r+ + r-)/(2 r0)`, `mu = (r+ - r-)/(2 r0)`
/// and their conjugate momenta. The branch of the square root follows the
/// sign of `sin phi`.
pub fn to_elliptic(pc: &PChartState) -> Result<EllipticState> {
    let (rp, rm) = centre_distances(pc);
    let lambda = (rp + rm) / (2.0 * pc.r0);
    let mu = (rp - rm) / (2.0 * pc.r0);
    check_interior(lambda, mu)?;
    let l2 = lambda * lambda - 1.0;
    let m2 = 1.0 - mu * mu;
    let q2 = lambda * lambda + mu * mu - 1.0;
    let q = q2.sqrt();
    let d = (m2 * l2 * pc.phi_norm * pc.phi_norm - q2 * pc.theta * pc.theta).max(0.0).sqrt();
    let sigma = if pc.phi.sin() < 0.0 { -1.0 } else { 1.0 };
    Ok(EllipticState {
        p_lambda: pc.r0 * lambda * pc.radial / q - sigma * mu * d / (q2 * l2),
        p_mu: pc.r0 * mu * pc.radial / q + sigma * lambda * d / (q2 * m2),
        lambda,
        mu,
        theta: pc.theta,
        r0: pc.r0,
    })
}

pub fn from_elliptic(es: &EllipticState) -> Result<PChartState> {
    let (lambda, mu) = (es.lambda, es.mu);
    check_interior(lambda, mu)?;
    let l2 = lambda * lambda - 1.0;
    let m2 = 1.0 - mu * mu;
    let lm = lambda * lambda - mu * mu;
    let q2 = lambda * lambda + mu * mu - 1.0;
    let q = q2.sqrt();
    let radial = (lambda * l2 * es.p_lambda + mu * m2 * es.p_mu) / (es.r0 * lm * q);
    let w = lambda * es.p_mu - mu * es.p_lambda;
    let phi2 = w * w * l2 * m2 / (lm * lm) + q2 * es.theta * es.theta / (m2 * l2);
    let phi_norm = phi2.sqrt();
    let s = (1.0 - es.theta * es.theta / phi2).max(0.0).sqrt();
    let cos_phi = (-lambda * mu / (q * s)).clamp(-1.0, 1.0);
    let base = cos_phi.acos();
    let phi = if w < 0.0 { std::f64::consts::TAU - base } else { base };
    Ok(PChartState { radial, phi_norm, r: es.r0 * q, phi, theta: es.theta, r0: es.r0 })
}

/// Symmetric Hamiltonian in elliptic coordinates.
pub fn eval_h_elliptic(es: &EllipticState, m_plus: f64, m_minus: f64) -> Result<f64> {
    let (lambda, mu) = (es.lambda, es.mu);
    check_interior(lambda, mu).map_err(|_| domain("elliptic chart boundary"))?;
    let l2 = lambda * lambda - 1.0;
    let m2 = 1.0 - mu * mu;
    let lm = lambda * lambda - mu * mu;
    let r02 = es.r0 * es.r0;
    let kin = (es.p_lambda * es.p_lambda * l2 + es.p_mu * es.p_mu * m2) / (2.0 * r02 * lm);
    let ang = es.theta * es.theta / (2.0 * r02 * lm) * (1.0 / m2 + 1.0 / l2);
    let pot = ((m_plus + m_minus) * lambda - (m_plus - m_minus) * mu) / (es.r0 * lm);
    Ok(kin + ang - pot)
}

/// Separated Hamilton–Jacobi functions `(F_mu, F_lambda)` at energy `e`.
/// Along a motion of energy `e` both equal the Euler integral of the
/// symmetric problem.
pub fn hj_split(es: &EllipticState, e: f64, m_plus: f64, m_minus: f64) -> Result<(f64, f64)> {
    let (lambda, mu) = (es.lambda, es.mu);
    check_interior(lambda, mu).map_err(|_| domain("elliptic chart boundary"))?;
    let th2 = es.theta * es.theta;
    let r0 = es.r0;
    let f_mu = es.p_mu * es.p_mu * (1.0 - mu * mu) + th2 / (1.0 - mu * mu)
        + 2.0 * r0 * (m_plus - m_minus) * mu
        + 2.0 * r0 * r0 * mu * mu * e;
    let f_lambda = -es.p_lambda * es.p_lambda * (lambda * lambda - 1.0) - th2 / (lambda * lambda - 1.0)
        + 2.0 * r0 * (m_plus + m_minus) * lambda
        + 2.0 * r0 * r0 * lambda * lambda * e;
    Ok((f_mu, f_lambda))
}

/// Elliptic state of a Cartesian point of the symmetric problem.
pub fn elliptic_from_cartesian(y: &Vec3, x: &Vec3, sp: &SymmetricParams) -> Result<EllipticState> {
    to_elliptic(&p_chart(y, x, &sp.x0)?)
}
