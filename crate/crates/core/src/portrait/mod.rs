//! Planar (`Theta = 0`) phase portrait of the normalised Euler integral
//! `Ĝ0 = X^2 + delta sqrt(1 - X^2) cos g`, with `X = G/Lambda`,
//! `delta = r'/a`.

mod svg;

use std::f64::consts::{PI, TAU};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::adaptive_gk;
use crate::state::wrap_pi;

pub use svg::render_svg;

/// Absolute tolerance for separatrix / boundary level detection.
pub const LEVEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitSpec {
    pub delta: f64,
    /// Value of `Ĝ0`.
    pub level: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
}

impl PortraitSpec {
    pub fn new(delta: f64, level: f64, lambda: f64) -> Self {
        Self { delta, level, lambda }
    }
}

/// `Ĝ0(X, g)`.
pub fn g0_hat(delta: f64, x: f64, g: f64) -> f64 {
    x * x + delta * (1.0 - x * x).max(0.0).sqrt() * g.cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub g: f64,
    #[serde(rename = "G_over_Lambda")]
    pub g_over_lambda: f64,
    pub kind: Stability,
    pub level: f64,
}

pub fn equilibria(delta: f64) -> Result<Vec<Equilibrium>> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain(format!("delta must be positive, got {delta}")));
    }
    if delta == 2.0 {
        return Err(Error::Transition);
    }
    let mut out = vec![
        Equilibrium {
            g: 0.0,
            g_over_lambda: 0.0,
            kind: if delta < 2.0 { Stability::Unstable } else { Stability::Stable },
            level: delta,
        },
        Equilibrium { g: PI, g_over_lambda: 0.0, kind: Stability::Stable, level: -delta },
    ];
    if delta < 2.0 {
        out.push(Equilibrium {
            g: 0.0,
            g_over_lambda: (1.0 - delta * delta / 4.0).sqrt(),
            kind: Stability::Stable,
            level: 1.0 + delta * delta / 4.0,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionClass {
    Libration,
    Rotation,
    Separatrix,
    ForbiddenBelow,
    BoundaryLevel,
    /// `Ĝ0 > 1`: outside the studied window (closed curves around the
    /// maximum).
    AboveBoundary,
}

fn check_window(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("portrait analysis needs 0 < delta < 1, got {delta}")));
    }
    Ok(())
}

pub fn classify_motion(spec: &PortraitSpec) -> Result<MotionClass> {
    check_window(spec.delta)?;
    let (d, l) = (spec.delta, spec.level);
    Ok(if (l - d).abs() <= LEVEL_TOL {
        MotionClass::Separatrix
    } else if (l - 1.0).abs() <= LEVEL_TOL {
        MotionClass::BoundaryLevel
    } else if l < -d - LEVEL_TOL {
        MotionClass::ForbiddenBelow
    } else if l < d {
        MotionClass::Libration
    } else if l < 1.0 {
        MotionClass::Rotation
    } else {
        MotionClass::AboveBoundary
    })
}

/// Roots `w±` of `w^2 - delta w cos g - 1 + Ĝ0 = 0`.
pub fn w_roots(delta: f64, level: f64, g: f64) -> (f64, f64) {
    let b = delta * g.cos();
    let disc = (b * b + 4.0 - 4.0 * level).max(0.0).sqrt();
    (0.5 * (b + disc), 0.5 * (b - disc))
}

/// `cos g < Ĝ0 / delta`.
pub fn admissible(delta: f64, level: f64, g: f64) -> bool {
    g.cos() < level / delta
}

/// `G/Lambda = sqrt(1 - w+^2)` on the level, clamped at the arc ends.
pub fn g_over_lambda(delta: f64, level: f64, g: f64) -> f64 {
    let (wp, _) = w_roots(delta, level, g);
    (1.0 - wp * wp).max(0.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub label: String,
    /// `(g, G/Lambda)` pairs.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCurve {
    pub spec: PortraitSpec,
    pub class: MotionClass,
    pub branches: Vec<Branch>,
    /// Why the curve is empty, if it is.
    pub reason: Option<String>,
}

impl LevelCurve {
    pub fn is_empty(&self) -> bool {
        self.branches.iter().all(|b| b.points.is_empty())
    }

    pub fn write_csv<W: Write>(branch: &Branch, mut w: W) -> Result<()> {
        writeln!(w, "g,G_over_Lambda")?;
        for (g, x) in &branch.points {
            writeln!(w, "{g:.16e},{x:.16e}")?;
        }
        Ok(())
    }
}

/// Libration-arc parametrisation `g = π - beta cos t`, `t ∈ [0, π]`, with
/// `beta = π - arccos(Ĝ0/delta)`. Points cluster at the arc ends.
fn arc_points(delta: f64, level: f64, n: usize) -> Vec<(f64, f64)> {
    let beta = PI - (level / delta).clamp(-1.0, 1.0).acos();
    (0..n)
        .map(|i| {
            let t = PI * i as f64 / (n - 1) as f64;
            let g = PI - beta * t.cos();
            (g, g_over_lambda(delta, level, g))
        })
        .collect()
}

/// Points of the level `Ĝ0 = spec.level` in the `(g, G/Lambda)` half-plane.
pub fn level_curve(spec: &PortraitSpec, n_points: usize) -> Result<LevelCurve> {
    let class = classify_motion(spec)?;
    let n = n_points.max(2);
    let (d, l) = (spec.delta, spec.level);
    let mut reason = None;
    let branches = match class {
        MotionClass::ForbiddenBelow => {
            reason = Some(format!("level {l} is below the minimum -delta = {}", -d));
            Vec::new()
        }
        MotionClass::AboveBoundary => {
            return Err(Error::Unsupported(format!("level {l} > 1 lies outside the studied window")));
        }
        MotionClass::BoundaryLevel => {
            let upper = (0..n).map(|i| (TAU * i as f64 / (n - 1) as f64, 1.0)).collect();
            let lower = (0..n)
                .map(|i| {
                    let g = -PI / 2.0 + PI * i as f64 / (n - 1) as f64;
                    (g.rem_euclid(TAU), (1.0 - (d * g.cos()).powi(2)).max(0.0).sqrt())
                })
                .collect();
            vec![
                Branch { label: "G=Lambda".into(), points: upper },
                Branch { label: "G=Lambda*sqrt(1-delta^2cos^2g)".into(), points: lower },
            ]
        }
        MotionClass::Rotation => {
            let pts = (0..n)
                .map(|i| {
                    let g = TAU * i as f64 / (n - 1) as f64;
                    (g, g_over_lambda(d, l, g))
                })
                .collect();
            vec![Branch { label: "rotation".into(), points: pts }]
        }
        MotionClass::Libration if l <= -d => {
            vec![Branch { label: "minimum".into(), points: vec![(PI, 0.0)] }]
        }
        MotionClass::Libration => vec![Branch { label: "libration".into(), points: arc_points(d, l, n) }],
        MotionClass::Separatrix => vec![Branch { label: "separatrix".into(), points: arc_points(d, d, n) }],
    };
    Ok(LevelCurve { spec: *spec, class, branches, reason })
}

/// Level curves for several levels at fixed `delta`, computed in parallel.
pub fn level_fan(delta: f64, levels: &[f64], lambda: f64, n_points: usize) -> Vec<Result<LevelCurve>> {
    crate::par::map(levels, |&l| level_curve(&PortraitSpec::new(delta, l, lambda), n_points))
}

/// Classification over a `(delta, level)` grid, parallel over rows.
pub fn classify_grid(deltas: &[f64], levels: &[f64]) -> Vec<Vec<Result<MotionClass>>> {
    crate::par::map(deltas, |&d| levels.iter().map(|&l| classify_motion(&PortraitSpec::new(d, l, 1.0))).collect())
}

pub fn classify_grid_seq(deltas: &[f64], levels: &[f64]) -> Vec<Vec<Result<MotionClass>>> {
    crate::par::map_seq(deltas, |&d| levels.iter().map(|&l| classify_motion(&PortraitSpec::new(d, l, 1.0))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomoclinicBranch {
    /// `g` in `(0, π]` before `t0` and in `(-π, 0]` after, as the `G0` flow
    /// moves.
    Flow,
    Plus,
    Minus,
}

/// Homoclinic solution on the separatrix `Ĝ0 = delta`:
/// `G = sigma Lambda / cosh(sigma Lambda (t - t0))`, `sigma^2 = delta(2 - delta)`,
/// `cos g = (1 - beta^2 c^2)/sqrt(1 - sigma^2 c^2)`, `beta^2 = 2 - delta`,
/// `c = sech(sigma Lambda (t - t0))`. The angle is returned in `(-π, π]`.
pub fn homoclinic(delta: f64, lambda: f64, t: f64, t0: f64, branch: HomoclinicBranch) -> Result<(f64, f64)> {
    check_window(delta)?;
    let sigma = (delta * (2.0 - delta)).sqrt();
    let tau = sigma * lambda * (t - t0);
    let c = 1.0 / tau.cosh();
    let big_g = sigma * lambda * c;
    // sin g and cos g share the positive factor 1/sqrt(1 - sigma^2 c^2)
    let sin_part = c * (2.0 - delta) * tau.abs().tanh();
    let cos_part = 1.0 - (2.0 - delta) * c * c;
    let g = sin_part.atan2(cos_part);
    let sign = match branch {
        HomoclinicBranch::Plus => 1.0,
        HomoclinicBranch::Minus => -1.0,
        HomoclinicBranch::Flow => {
            if t < t0 {
                1.0
            } else {
                -1.0
            }
        }
    };
    Ok((big_g, wrap_pi(sign * g)))
}

/// Action `A0 = (1/2π) ∮ G dg` of a libration or rotation level.
pub fn action_a0(spec: &PortraitSpec) -> Result<f64> {
    let class = classify_motion(spec)?;
    let (d, l, lam) = (spec.delta, spec.level, spec.lambda);
    let tol = 1e-12;
    match class {
        MotionClass::Rotation => {
            // integrand is even about g = π
            let r = adaptive_gk(|g| Ok(g_over_lambda(d, l, g)), 0.0, PI, tol, tol, 2000)?;
            Ok(lam * r.value / PI)
        }
        MotionClass::Libration => {
            let beta = PI - (l / d).clamp(-1.0, 1.0).acos();
            let r = adaptive_gk(
                |t| {
                    let g = PI - beta * t.cos();
                    Ok(g_over_lambda(d, l, g) * beta * t.sin())
                },
                0.0,
                PI / 2.0,
                tol,
                tol,
                2000,
            )?;
            // twice the arc (both signs of G), half-arc by symmetry
            Ok(lam * 2.0 * r.value / PI)
        }
        other => Err(domain(format!("action A0 is defined on libration or rotation levels, not {other:?}"))),
    }
}
