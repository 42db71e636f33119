//! Collision set of the planar problem: the Keplerian ellipse passes through
//! the second centre exactly on the level `G0 = m r'`.

use serde::{Deserialize, Serialize};

use crate::coords::{eccentric_from_true, g0_in_chart, mean_from_eccentric, DelaunayElements};
use crate::error::{domain, Error, Result};

/// Slack on the zero-margin comparison.
pub const LEVEL_SLACK: f64 = 1e-12;
/// `Theta` below this counts as planar.
pub const PLANAR_TOL: f64 = 1e-12;
/// Eccentricities below this are treated as circles.
pub const CIRCLE_E: f64 = 1e-12;

/// `G0` value of the collision set.
pub fn separatrix_level(m: f64, rprime: f64) -> Result<f64> {
    if !(m > 0.0 && rprime > 0.0) {
        return Err(domain("need m > 0 and r' > 0"));
    }
    Ok(m * rprime)
}

/// Point of the conic at distance `r'` from the focus. The mirror point is
/// at `-theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// True anomaly in `[0, pi]`.
    pub theta: f64,
    pub zeta: f64,
    pub ell: f64,
}

fn require_planar(d: &DelaunayElements) -> Result<()> {
    if d.theta.abs() > PLANAR_TOL * d.g_norm.max(1.0) {
        return Err(Error::Unsupported(format!("spatial configuration (Theta = {:e})", d.theta)));
    }
    Ok(())
}

/// Solves `r' = a(1 - e^2)/(1 + e cos theta)` for the true anomaly.
pub fn conic_crossing(d: &DelaunayElements, m: f64) -> Result<Option<Crossing>> {
    require_planar(d)?;
    if !(d.lambda > 0.0 && d.g_norm > 0.0 && d.g_norm <= d.lambda && d.rprime > 0.0 && m > 0.0) {
        return Err(domain("need bound elements with 0 < G <= Lambda and r' > 0"));
    }
    let a = d.semi_major_axis(m);
    let e = d.eccentricity();
    if e < CIRCLE_E {
        // every point of the circle is at distance a
        return Ok(((d.rprime - a).abs() <= LEVEL_SLACK * a).then_some(Crossing { theta: 0.0, zeta: 0.0, ell: 0.0 }));
    }
    let p = d.g_norm * d.g_norm / m;
    let c = (p / d.rprime - 1.0) / e;
    if c.abs() > 1.0 {
        return Ok(None);
    }
    let theta = c.acos();
    let zeta = eccentric_from_true(e, theta);
    Ok(Some(Crossing { theta, zeta, ell: mean_from_eccentric(e, zeta) }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskClass {
    Safe,
    AtRisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub g0: f64,
    pub level: f64,
    pub distance_normalized: f64,
    pub classification: RiskClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossing_anomaly: Option<f64>,
}

impl RiskReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Classifies planar elements by the normalized distance
/// `|G0 - m r'|/Lambda^2` of their `G0` level from the collision level.
pub fn risk_classify(d: &DelaunayElements, m: f64, margin: f64) -> Result<RiskReport> {
    if !(margin >= 0.0) {
        return Err(domain("margin must be non-negative"));
    }
    require_planar(d)?;
    let g0 = g0_in_chart(d, m)?;
    let level = separatrix_level(m, d.rprime)?;
    let distance_normalized = (g0 - level).abs() / (d.lambda * d.lambda);
    let classification = if distance_normalized <= margin + LEVEL_SLACK { RiskClass::AtRisk } else { RiskClass::Safe };
    let crossing_anomaly = conic_crossing(d, m)?.map(|c| c.theta);
    Ok(RiskReport { g0, level, distance_normalized, classification, crossing_anomaly })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elements(a: f64, e: f64, g: f64, rprime: f64) -> DelaunayElements {
        let lambda = a.sqrt();
        DelaunayElements::planar(lambda, lambda * (1.0 - e * e).sqrt(), 0.0, g, rprime)
    }

    #[test]
    fn level_value() {
        assert_eq!(separatrix_level(1.0, 0.5).unwrap(), 0.5);
        assert!(separatrix_level(0.0, 0.5).is_err());
    }

    #[test]
    fn crossing_examples() {
        assert!(conic_crossing(&elements(1.0, 0.0, 0.0, 0.5), 1.0).unwrap().is_none());
        assert!(conic_crossing(&elements(1.0, 0.0, 0.0, 1.0), 1.0).unwrap().is_some());
        let c = conic_crossing(&elements(1.0, 0.44, 0.0, 1.0), 1.0).unwrap().unwrap();
        assert!((c.theta.cos() - (1.0 - 0.44f64.powi(2) - 1.0) / 0.44).abs() < 1e-14);
        assert!(conic_crossing(&elements(1.0, 0.44, 0.0, 2.0), 1.0).unwrap().is_none());
    }

    #[test]
    fn spatial_is_unsupported() {
        let mut d = elements(1.0, 0.3, 0.0, 0.5);
        d.theta = 0.1;
        assert!(matches!(risk_classify(&d, 1.0, 0.05), Err(Error::Unsupported(_))));
    }

    #[test]
    fn circular_orbit_is_safe() {
        let r = risk_classify(&elements(1.0, 0.0, 0.3, 0.5), 1.0, 0.4).unwrap();
        assert_eq!(r.classification, RiskClass::Safe);
        assert!((r.distance_normalized - 0.5).abs() < 1e-15);
    }
}
