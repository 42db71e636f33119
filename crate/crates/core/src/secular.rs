//! Secular (mean-anomaly averaged) dynamics: the averaged perturbing
//! potential `Û(r', Lambda, Theta, G0)`, its small-`r'/a` series, the
//! fixed points of the secular flow and the first-order solution.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coords::{cartesian_to_delaunay, delaunay_to_cartesian, g0_from_parts, solve_kepler, DelaunayElements};
use crate::dynamics::{integrate_with, Model, RunConfig};
use crate::error::{domain, Error, Result};
use crate::ode;
use crate::quadrature::{periodic_mean, periodic_mean_fixed};
use crate::roots::brent;
use crate::state::MassParams;

/// Relative change between node doublings accepted by [`u_avg`].
pub const U_AVG_TOL: f64 = 1e-11;
/// Smallest distance to the second centre tolerated on a quadrature node.
pub const U_AVG_GUARD: f64 = 1e-9;
/// Relative step (in units of `Lambda^2`) for derivatives in `G0`.
pub const G0_STEP: f64 = 1e-5;
/// Initial data closer than this to the separatrix level are rejected.
pub const SEPARATRIX_GUARD: f64 = 1e-6;

const N0: usize = 32;
const MAX_NODES: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularPoint {
    pub rprime: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    #[serde(rename = "Theta")]
    pub theta: f64,
    #[serde(rename = "G0")]
    pub g0: f64,
}

impl SecularPoint {
    pub fn new(rprime: f64, lambda: f64, theta: f64, g0: f64) -> Self {
        Self { rprime, lambda, theta, g0 }
    }

    /// `E^2 = (Lambda^2 - G0)/Lambda^2`.
    pub fn e_sq(&self) -> f64 {
        (self.lambda * self.lambda - self.g0) / (self.lambda * self.lambda)
    }

    /// `I^2 = (G0 - Theta^2)/Lambda^2`; negative below `G0 = Theta^2`.
    pub fn i_sq(&self) -> f64 {
        (self.g0 - self.theta * self.theta) / (self.lambda * self.lambda)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.rprime >= 0.0) {
            return Err(domain("need Lambda > 0 and r' >= 0"));
        }
        if !(self.g0 > 0.0 && self.g0 <= self.lambda * self.lambda) {
            return Err(domain(format!("need 0 < G0 <= Lambda^2, got G0 = {}", self.g0)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UAvg {
    pub value: f64,
    pub nodes: usize,
}

/// Integrand of `Û` at eccentric anomaly `zeta`, returned as the real part
/// of the principal branch (the integral is even in `I`, so `G0 < Theta^2`
/// is handled by analytic continuation).
fn integrand(pt: &SecularPoint, a: f64, zeta: f64) -> Result<f64> {
    let e = pt.e_sq().max(0.0).sqrt();
    let i = Complex64::new(pt.i_sq(), 0.0).sqrt();
    let (s, c) = zeta.sin_cos();
    let w = 1.0 - e * c;
    let d2 = pt.rprime * pt.rprime - 2.0 * a * pt.rprime * i * s + Complex64::new(a * a * w * w, 0.0);
    let d = d2.sqrt();
    if d.norm() < U_AVG_GUARD {
        return Err(Error::Collision { what: "second centre", distance: d.norm(), guard: U_AVG_GUARD });
    }
    Ok(-(w / d).re)
}

/// `Û = <-1/|x' - x|>_ell` by the periodic trapezoid rule in the eccentric
/// anomaly, doubling the nodes until the relative change is below
/// [`U_AVG_TOL`].
pub fn u_avg(pt: &SecularPoint, a: f64) -> Result<UAvg> {
    pt.validate()?;
    if !(a > 0.0) {
        return Err(domain("semi-major axis must be positive"));
    }
    let r = periodic_mean(|z| integrand(pt, a, z), N0, U_AVG_TOL, MAX_NODES)?;
    Ok(UAvg { value: r.value, nodes: r.nodes })
}

/// `Û` on a fixed number of nodes (used for consistent finite differences).
pub fn u_avg_fixed(pt: &SecularPoint, a: f64, nodes: usize) -> Result<f64> {
    pt.validate()?;
    periodic_mean_fixed(|z| integrand(pt, a, z), nodes)
}

/// Second-order series in `r'/a`:
/// `Û ≈ -(1/a)(1 - (r'^2/4a^2) Lambda^3 (3 Theta^2 - G0)/G0^{5/2})`.
pub fn u_avg_series(pt: &SecularPoint, a: f64) -> Result<f64> {
    if !(pt.g0 > 1e-300) {
        return Err(domain("series is singular at G0 = 0"));
    }
    let corr = pt.rprime * pt.rprime / (4.0 * a * a) * pt.lambda.powi(3) * (3.0 * pt.theta * pt.theta - pt.g0)
        / pt.g0.powf(2.5);
    Ok(-(1.0 - corr) / a)
}

/// `∂Û/∂G0` by central differences with step `G0_STEP * Lambda^2`, both
/// sides evaluated on the node count converged at the centre.
pub fn du_dg0(pt: &SecularPoint, a: f64) -> Result<f64> {
    let h = G0_STEP * pt.lambda * pt.lambda;
    let nodes = 2 * u_avg(pt, a)?.nodes;
    let at = |g0: f64| u_avg_fixed(&SecularPoint { g0, ..*pt }, a, nodes);
    let hi = pt.g0 + h;
    let lo = pt.g0 - h;
    if hi > pt.lambda * pt.lambda {
        // one-sided near the circular limit
        return Ok((at(pt.g0)? - at(pt.g0 - h)?) / h);
    }
    Ok((at(hi)? - at(lo)?) / (2.0 * h))
}

/// Roots of `∂Û/∂G0` for `G0 ∈ (Theta^2, Lambda^2)`, found by scanning and
/// Brent refinement; candidates with residual above `1e-8` (poles) are
/// dropped.
pub fn u_fixed_points(rprime: f64, lambda: f64, theta: f64, a: f64) -> Result<Vec<f64>> {
    if theta == 0.0 {
        return Err(domain("fixed points need Theta != 0"));
    }
    let l2 = lambda * lambda;
    let h = G0_STEP * l2;
    let lo = theta * theta + 2.0 * h;
    let hi = l2 - 2.0 * h;
    let n = 200;
    let f = |g0: f64| du_dg0(&SecularPoint::new(rprime, lambda, theta, g0), a);
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let fs: Vec<Option<f64>> = crate::par::map(&xs, |&x| f(x).ok());
    let mut roots = Vec::new();
    for i in 0..n {
        let (Some(fa), Some(fb)) = (fs[i], fs[i + 1]) else { continue };
        if fa * fb > 0.0 {
            continue;
        }
        if let Ok(r) = brent(f, xs[i], xs[i + 1], 1e-13, 200) {
            if r.fx.abs() < 1e-8 {
                roots.push(r.x);
            }
        }
    }
    Ok(roots)
}

/// Direct `ell`-average of `-1/|x' - x_K(ell)|` on the Keplerian ellipse of
/// `(Lambda, G, g)` with the second centre at `(r', Theta)`, by the
/// periodic trapezoid rule in the mean anomaly.
pub fn u_bar_direct(rprime: f64, lambda: f64, theta: f64, g_norm: f64, g: f64, m: f64) -> Result<f64> {
    if !(g_norm > 0.0 && g_norm <= lambda && theta.abs() <= g_norm) {
        return Err(domain("need |Theta| <= G <= Lambda, G > 0"));
    }
    let a = lambda * lambda / m;
    let e = (1.0 - (g_norm / lambda).powi(2)).max(0.0).sqrt();
    let s1 = (1.0 - (theta / g_norm).powi(2)).max(0.0).sqrt();
    // (P, Q, C) components of x'
    let xp = [-rprime * s1 * g.cos(), rprime * s1 * g.sin(), rprime * theta / g_norm];
    let be = (1.0 - e * e).sqrt();
    let r = periodic_mean(
        |ell| {
            let z = solve_kepler(e, ell)?;
            let dx = xp[0] - a * (z.cos() - e);
            let dy = xp[1] - a * be * z.sin();
            let d = (dx * dx + dy * dy + xp[2] * xp[2]).sqrt();
            if d < U_AVG_GUARD {
                return Err(Error::Collision { what: "second centre", distance: d, guard: U_AVG_GUARD });
            }
            Ok(-1.0 / d)
        },
        N0,
        U_AVG_TOL,
        MAX_NODES,
    )?;
    Ok(r.value)
}

/// Slow/fast variables of the first-order solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularState {
    pub rprime: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    #[serde(rename = "Theta")]
    pub theta: f64,
    #[serde(rename = "Rprime")]
    pub rprime_momentum: f64,
    #[serde(rename = "G")]
    pub g_norm: f64,
    pub g: f64,
    pub ell: f64,
    pub vartheta: f64,
}

impl SecularState {
    pub fn from_elements(d: &DelaunayElements) -> Self {
        Self {
            rprime: d.rprime,
            lambda: d.lambda,
            theta: d.theta,
            rprime_momentum: d.rprime_momentum,
            g_norm: d.g_norm,
            g: d.g,
            ell: d.ell,
            vartheta: d.vartheta,
        }
    }

    pub fn g0(&self, m: f64) -> Result<f64> {
        g0_from_parts(self.rprime, self.lambda, self.theta, self.g_norm, self.g, m)
    }
}

/// Which Hamiltonian the first-order flow approximates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Setting {
    /// `h = h_K + eps U`: `rho = 1`, no `h0`.
    TwoCentre,
    /// `H = h0(r') + rho (h_K + eps U)` with `h0 = -1/r'`.
    Sea { rho: f64 },
}

impl Setting {
    fn rho(&self) -> f64 {
        match self {
            Setting::TwoCentre => 1.0,
            Setting::Sea { rho } => *rho,
        }
    }

    fn h0_prime(&self, rprime: f64) -> f64 {
        match self {
            Setting::TwoCentre => 0.0,
            Setting::Sea { .. } => 1.0 / (rprime * rprime),
        }
    }
}

/// Frequencies of the first-order solution, evaluated at the initial point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularRates {
    /// Time-rescaling factor `rho eps Û_{G0}` of the `G0` flow.
    pub kappa: f64,
    pub rprime_momentum_dot: f64,
    pub ell_dot: f64,
    pub vartheta_dot: f64,
    #[serde(rename = "G0")]
    pub g0: f64,
}

fn u_of(rprime: f64, lambda: f64, theta: f64, g0: f64, m: f64, nodes: usize) -> Result<f64> {
    u_avg_fixed(&SecularPoint::new(rprime, lambda, theta, g0), lambda * lambda / m, nodes)
}

pub fn secular_rates(s0: &SecularState, p: &MassParams, setting: Setting) -> Result<SecularRates> {
    let m = p.m;
    let g0 = s0.g0(m)?;
    let a = s0.lambda * s0.lambda / m;
    let delta = s0.rprime / a;
    if ((g0 / (s0.lambda * s0.lambda)) - delta).abs() < SEPARATRIX_GUARD {
        return Err(domain("initial data on the separatrix / collision level"));
    }
    let rho = setting.rho();
    let pe = rho * p.eps;
    let s1 = (1.0 - (s0.theta / s0.g_norm).powi(2)).max(0.0).sqrt();
    let s2 = (1.0 - (s0.g_norm / s0.lambda).powi(2)).max(0.0).sqrt();
    let cg = s0.g.cos();
    let g0_rp = m * s1 * s2 * cg;
    let g0_lam = if s2 > 0.0 { m * s0.rprime * s1 * cg * s0.g_norm.powi(2) / (s0.lambda.powi(3) * s2) } else { 0.0 };
    let g0_th = if s1 > 0.0 { -m * s0.rprime * s2 * cg * s0.theta / (s0.g_norm.powi(2) * s1) } else { 0.0 };
    let kepler = rho * m / s0.lambda.powi(3);
    if pe == 0.0 {
        return Ok(SecularRates {
            kappa: 0.0,
            rprime_momentum_dot: -setting.h0_prime(s0.rprime),
            ell_dot: kepler,
            vartheta_dot: 0.0,
            g0,
        });
    }
    let nodes = 2 * u_avg(&SecularPoint::new(s0.rprime, s0.lambda, s0.theta, g0), a)?.nodes;
    let u = |rp: f64, lam: f64, th: f64, g: f64| u_of(rp, lam, th, g, m, nodes);
    let cd = |f: &dyn Fn(f64) -> Result<f64>, x: f64, h: f64| -> Result<f64> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    let hg = G0_STEP * s0.lambda * s0.lambda;
    let u_g0 = if g0 + hg > s0.lambda * s0.lambda {
        (u(s0.rprime, s0.lambda, s0.theta, g0)? - u(s0.rprime, s0.lambda, s0.theta, g0 - hg)?) / hg
    } else {
        cd(&|x| u(s0.rprime, s0.lambda, s0.theta, x), g0, hg)?
    };
    let u_rp = cd(&|x| u(x, s0.lambda, s0.theta, g0), s0.rprime, 1e-6 * s0.rprime.max(1.0))?;
    let u_lam = cd(&|x| u(s0.rprime, x, s0.theta, g0), s0.lambda, 1e-6 * s0.lambda.max(1.0))?;
    let u_th = cd(&|x| u(s0.rprime, s0.lambda, x, g0), s0.theta, 1e-6 * s0.lambda.max(1.0))?;
    Ok(SecularRates {
        kappa: pe * u_g0,
        rprime_momentum_dot: -(setting.h0_prime(s0.rprime) + pe * u_rp + pe * u_g0 * g0_rp),
        ell_dot: kepler + pe * (u_lam + u_g0 * g0_lam),
        vartheta_dot: pe * (u_th + u_g0 * g0_th),
        g0,
    })
}

/// `(dG/ds, dg/ds)` of the `G0` flow at fixed `(r', Lambda, Theta)`.
fn g0_flow(s0: &SecularState, m: f64, big_g: f64, g: f64) -> [f64; 2] {
    let (rp, lam, th) = (s0.rprime, s0.lambda, s0.theta);
    let s1 = (1.0 - (th / big_g).powi(2)).max(1e-300).sqrt();
    let s2 = (1.0 - (big_g / lam).powi(2)).max(1e-300).sqrt();
    let d_g = m * rp * s1 * s2 * g.sin();
    let ds1 = th * th / (big_g.powi(3) * s1);
    let ds2 = -big_g / (lam * lam * s2);
    let dg = 2.0 * big_g + m * rp * g.cos() * (ds1 * s2 + s1 * ds2);
    [d_g, dg]
}

/// First-order secular trajectory sampled at `times` (ascending, from 0).
pub fn first_order_trajectory(s0: &SecularState, p: &MassParams, setting: Setting, times: &[f64]) -> Result<Vec<SecularState>> {
    let rates = secular_rates(s0, p, setting)?;
    let mut slow: Vec<[f64; 2]> = vec![[s0.g_norm, s0.g]; times.len()];
    let t_end = times.iter().copied().fold(0.0, f64::max);
    if rates.kappa != 0.0 && t_end > 0.0 {
        let kappa = rates.kappa;
        let m = p.m;
        let mut opts = ode::Options::new(1e-12);
        opts.max_steps = 1_000_000;
        let sol = ode::integrate_plain(
            |_t, y: &[f64; 2]| {
                let [a, b] = g0_flow(s0, m, y[0], y[1]);
                Ok([kappa * a, kappa * b])
            },
            0.0,
            [s0.g_norm, s0.g],
            t_end,
            &opts,
        )?;
        // dense sampling: re-run segment by segment for each requested time
        for (k, &t) in times.iter().enumerate() {
            slow[k] = if t <= 0.0 {
                [s0.g_norm, s0.g]
            } else {
                let i = sol.t.partition_point(|&x| x < t).min(sol.t.len() - 1);
                if sol.t[i] == t {
                    sol.y[i]
                } else {
                    let i0 = i.saturating_sub(1);
                    ode::integrate_plain(
                        |_t, y: &[f64; 2]| {
                            let [a, b] = g0_flow(s0, m, y[0], y[1]);
                            Ok([kappa * a, kappa * b])
                        },
                        sol.t[i0],
                        sol.y[i0],
                        t,
                        &opts,
                    )?
                    .y
                    .last()
                    .copied()
                    .expect("non-empty")
                }
            };
        }
    }
    Ok(times
        .iter()
        .zip(slow)
        .map(|(&t, [gn, g])| SecularState {
            g_norm: gn,
            g,
            rprime_momentum: s0.rprime_momentum + rates.rprime_momentum_dot * t,
            ell: s0.ell + rates.ell_dot * t,
            vartheta: s0.vartheta + rates.vartheta_dot * t,
            ..*s0
        })
        .collect())
}

/// First-order solution at time `t`.
pub fn first_order_flow(s0: &SecularState, p: &MassParams, setting: Setting, t: f64) -> Result<SecularState> {
    Ok(first_order_trajectory(s0, p, setting, &[t])?[0])
}

/// Values of `Û` over a list of points, in parallel.
pub fn u_avg_sweep(points: &[SecularPoint], a: f64) -> Vec<Result<UAvg>> {
    crate::par::map(points, |pt| u_avg(pt, a))
}

pub fn u_avg_sweep_seq(points: &[SecularPoint], a: f64) -> Vec<Result<UAvg>> {
    crate::par::map_seq(points, |pt| u_avg(pt, a))
}

/// Planar two-centre comparison set-up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSetup {
    pub m: f64,
    pub eps: f64,
    pub a: f64,
    pub rprime: f64,
    #[serde(rename = "G")]
    pub g_norm: f64,
    pub g: f64,
    #[serde(default)]
    pub ell: f64,
    pub t_end: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Samples per Keplerian period in the direct run.
    #[serde(default = "default_per_orbit")]
    pub samples_per_orbit: usize,
}

fn default_tol() -> f64 {
    1e-11
}

fn default_per_orbit() -> usize {
    64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub t: f64,
    pub g_secular: f64,
    pub g_direct: f64,
    #[serde(rename = "G_secular")]
    pub big_g_secular: f64,
    #[serde(rename = "G_direct")]
    pub big_g_direct: f64,
    pub abs_err_g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// One row per Keplerian period: direct values are window averages,
    /// secular values are taken at the window centre.
    pub rows: Vec<ComparisonRow>,
    /// Change of `g` between the first and last windows.
    pub delta_g_secular: f64,
    pub delta_g_direct: f64,
    pub rel_err_delta_g: f64,
    /// Relative error of `g` itself in the last window.
    pub rel_err_g_final: f64,
    /// Node count of the converged `Û` quadrature at the initial point.
    pub u_avg_nodes: usize,
}

impl Comparison {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,g_secular,g_direct,G_secular,G_direct,abs_err_g")?;
        for r in &self.rows {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.t, r.g_secular, r.g_direct, r.big_g_secular, r.big_g_direct, r.abs_err_g
            )?;
        }
        Ok(())
    }
}

fn unwrap_angle(prev: f64, next: f64) -> f64 {
    let mut d = (next - prev) % TAU;
    if d > PI {
        d -= TAU;
    } else if d < -PI {
        d += TAU;
    }
    prev + d
}

/// First-order secular prediction against direct integration of the planar
/// two-centre problem, with elements extracted along the direct run and
/// averaged over each Keplerian period.
pub fn compare_with_direct(cfg: &ComparisonSetup) -> Result<Comparison> {
    let p = MassParams::two_centre(cfg.m, cfg.eps)?;
    let lambda = (cfg.m * cfg.a).sqrt();
    let d0 = DelaunayElements::planar(lambda, cfg.g_norm, cfg.ell, cfg.g, cfg.rprime);
    let sec0 = SecularState::from_elements(&d0);
    let rates = secular_rates(&sec0, &p, Setting::TwoCentre)?;
    let u_avg_nodes = u_avg(&SecularPoint::new(cfg.rprime, lambda, 0.0, rates.g0), cfg.a)?.nodes;
    let s0 = delaunay_to_cartesian(&d0, &p)?;
    let period = TAU * cfg.a.powf(1.5) * cfg.m.sqrt();
    let per = cfg.samples_per_orbit.max(8);
    let run = RunConfig { t_span: (0.0, cfg.t_end), tol: cfg.tol, guard: crate::dynamics::DEFAULT_GUARD, sample_dt: Some(period / per as f64) };
    let traj = integrate_with(&s0, &Model::TwoCentre(p), &run)?;
    if traj.is_collision() {
        return Err(domain("direct run hit the collision guard"));
    }
    let mut ts = Vec::new();
    let mut gs = Vec::new();
    let mut bgs = Vec::new();
    let mut prev = cfg.g;
    for s in &traj.samples {
        let ch = cartesian_to_delaunay(&s.state, &p)?;
        let e = ch.orbit_regular()?;
        prev = unwrap_angle(prev, e.g);
        ts.push(s.t);
        gs.push(prev);
        bgs.push(e.g_norm);
    }
    let n_windows = ((cfg.t_end / period).floor() as usize).max(1);
    let mut centres = Vec::new();
    let mut direct = Vec::new();
    for k in 0..n_windows {
        let (lo, hi) = (k as f64 * period, (k + 1) as f64 * period);
        let idx: Vec<usize> = (0..ts.len()).filter(|&i| ts[i] >= lo - 1e-12 && ts[i] < hi - 1e-9).collect();
        if idx.is_empty() {
            continue;
        }
        let mean = |v: &[f64]| idx.iter().map(|&i| v[i]).sum::<f64>() / idx.len() as f64;
        centres.push(mean(&ts));
        direct.push((mean(&gs), mean(&bgs)));
    }
    let sec = first_order_trajectory(&sec0, &p, Setting::TwoCentre, &centres)?;
    let rows: Vec<ComparisonRow> = centres
        .iter()
        .zip(&direct)
        .zip(&sec)
        .map(|((&t, &(gd, bgd)), s)| ComparisonRow {
            t,
            g_secular: s.g,
            g_direct: gd,
            big_g_secular: s.g_norm,
            big_g_direct: bgd,
            abs_err_g: (s.g - gd).abs(),
        })
        .collect();
    let first = rows.first().ok_or_else(|| domain("run shorter than one period"))?;
    let last = rows.last().expect("non-empty");
    let dg_sec = last.g_secular - first.g_secular;
    let dg_dir = last.g_direct - first.g_direct;
    Ok(Comparison {
        delta_g_secular: dg_sec,
        delta_g_direct: dg_dir,
        rel_err_delta_g: (dg_sec - dg_dir).abs() / dg_dir.abs().max(1e-300),
        rel_err_g_final: (last.g_secular - last.g_direct).abs() / last.g_direct.abs().max(1e-300),
        rows,
        u_avg_nodes,
    })
}
