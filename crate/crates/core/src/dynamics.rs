//! Hamiltonians of the two-centre problem (asymmetric and symmetric forms)
//! and of the rescaled Sun–Earth–Asteroid system, Hamilton's equations with
//! analytic gradients, and adaptive integration with a collision guard.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::integrals;
use crate::ode;
use crate::state::{CartesianState, MassParams, Vec3, STATE_DIM};

/// Default non-collision guard radius.
pub const DEFAULT_GUARD: f64 = 1e-6;

/// Distances below this make a Hamiltonian evaluation fail.
pub const EVAL_GUARD: f64 = 1e-12;

/// Admissible integrator tolerances.
pub const TOL_RANGE: (f64, f64) = (1e-13, 1e-3);

/// Heliocentric Earth/Asteroid state `(y', y, x', x)`.
pub type SeaState = CartesianState;

fn checked_norm(v: &Vec3, what: &'static str) -> Result<f64> {
    let r = v.norm();
    if !(r >= EVAL_GUARD) {
        return Err(Error::Collision { what, distance: r, guard: EVAL_GUARD });
    }
    Ok(r)
}

/// `|y|^2/(2m) - 1/|x| - eps/|x' - x|`.
pub fn eval_h(s: &CartesianState, p: &MassParams) -> Result<f64> {
    let r = checked_norm(&s.x, "primary centre")?;
    let kin = s.y.norm_squared() / (2.0 * p.m);
    if p.eps == 0.0 {
        return Ok(kin - 1.0 / r);
    }
    let d = checked_norm(&(s.xprime - s.x), "second centre")?;
    Ok(kin - 1.0 / r - p.eps / d)
}

/// Symmetric two-centre problem: centres at `-x0` (mass `m_plus`) and
/// `+x0` (mass `m_minus`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricParams {
    pub x0: Vec3,
    pub m_plus: f64,
    pub m_minus: f64,
}

/// `|y|^2/2 - m+/|x + x0| - m-/|x - x0|`.
pub fn eval_h_sim(y: &Vec3, x: &Vec3, sp: &SymmetricParams) -> Result<f64> {
    let rp = checked_norm(&(x + sp.x0), "centre -x0")?;
    let rm = checked_norm(&(x - sp.x0), "centre +x0")?;
    Ok(0.5 * y.norm_squared() - sp.m_plus / rp - sp.m_minus / rm)
}

/// Map the asymmetric problem onto the symmetric one: returns `(y, x, sp)`
/// with `h(s) = m · h_sim(y, x)` and the same time parameter.
pub fn to_symmetric(s: &CartesianState, p: &MassParams) -> (Vec3, Vec3, SymmetricParams) {
    let x0 = 0.5 * s.xprime;
    (
        s.y / p.m,
        s.x - x0,
        SymmetricParams {
            x0,
            m_plus: 1.0 / p.m,
            m_minus: p.eps / p.m,
        },
    )
}

/// Additive split `H = h0 + rho h1 + rho^2 f` of the rescaled SEA Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeaSplit {
    pub h0: f64,
    pub rho_h1: f64,
    pub rho2_f: f64,
    pub total: f64,
}

/// Rescaled SEA Hamiltonian with `h0 = -1/|x'|`, `h1` the two-centre
/// Hamiltonian of the asteroid (`m = 1/(1+mu)`) and
/// `f = |y'|^2/(2m') + eps y'.y`.
pub fn eval_sea(s: &SeaState, p: &MassParams) -> Result<SeaSplit> {
    if !(p.eps > 0.0) {
        return Err(domain("SEA requires eps > 0"));
    }
    let rp = checked_norm(&s.xprime, "sun-earth")?;
    let h0 = -1.0 / rp;
    let h1 = eval_h(s, p)?;
    let f = s.yprime.norm_squared() / (2.0 * p.m_prime()) + p.eps * s.yprime.dot(&s.y);
    let rho_h1 = p.rho * h1;
    let rho2_f = p.rho * p.rho * f;
    Ok(SeaSplit { h0, rho_h1, rho2_f, total: h0 + rho_h1 + rho2_f })
}

/// Which Hamiltonian drives the flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Model {
    /// Fixed centres at `0` (unit mass) and `x'` (mass `eps`); `y'` carries
    /// the enlarged phase-space bookkeeping.
    TwoCentre(MassParams),
    /// Symmetric form in `(y, x)`; `(y', x')` are inert.
    Symmetric(SymmetricParams),
    /// Rescaled Sun–Earth–Asteroid system; all twelve coordinates move.
    Sea(MassParams),
}

impl Model {
    pub fn hamiltonian(&self, s: &CartesianState) -> Result<f64> {
        match self {
            Model::TwoCentre(p) => eval_h(s, p),
            Model::Symmetric(sp) => eval_h_sim(&s.y, &s.x, sp),
            Model::Sea(p) => Ok(eval_sea(s, p)?.total),
        }
    }

    /// Euler integral appropriate to the model (for SEA: that of the
    /// two-centre part `h1`, which is not conserved).
    pub fn euler_integral(&self, s: &CartesianState) -> Result<f64> {
        match self {
            Model::TwoCentre(p) | Model::Sea(p) => integrals::euler_g(s, p),
            Model::Symmetric(sp) => integrals::euler_g_sym(&s.y, &s.x, sp),
        }
    }

    /// Distances to the two attracting centres.
    pub fn distances(&self, s: &CartesianState) -> (f64, f64) {
        match self {
            Model::TwoCentre(_) | Model::Sea(_) => (s.x.norm(), (s.x - s.xprime).norm()),
            Model::Symmetric(sp) => ((s.x + sp.x0).norm(), (s.x - sp.x0).norm()),
        }
    }

    /// Smallest distance relevant to the collision guard.
    pub fn min_distance(&self, s: &CartesianState) -> (f64, &'static str) {
        let (d1, d2) = self.distances(s);
        let mut best = if d1 <= d2 { (d1, "primary centre") } else { (d2, "second centre") };
        if let Model::Sea(_) = self {
            let d3 = s.xprime.norm();
            if d3 < best.0 {
                best = (d3, "sun-earth");
            }
        }
        best
    }

    fn validate(&self) -> Result<()> {
        match self {
            Model::TwoCentre(p) => MassParams::two_centre(p.m, p.eps).map(|_| ()),
            Model::Sea(p) => {
                let q = MassParams::sea(p.eps, p.mu)?;
                if (q.m - p.m).abs() > 1e-15 * q.m || (q.rho - p.rho).abs() > 1e-15 * q.rho.max(1.0) {
                    return Err(domain("SEA masses must satisfy m = 1/(1+mu), rho = mu/eps"));
                }
                Ok(())
            }
            Model::Symmetric(sp) => {
                if sp.m_plus < 0.0 || sp.m_minus < 0.0 {
                    return Err(domain("symmetric masses must be non-negative"));
                }
                Ok(())
            }
        }
    }
}

fn kepler_grad(x: &Vec3, what: &'static str) -> Result<Vec3> {
    let r = checked_norm(x, what)?;
    Ok(x / (r * r * r))
}

/// Hamilton's equations `(dy/dt, dx/dt) = (-dH/dx, dH/dy)` for both
/// conjugate pairs, returned in state layout.
pub fn eom(s: &CartesianState, model: &Model) -> Result<CartesianState> {
    let zero = Vec3::zeros();
    match model {
        Model::TwoCentre(p) => {
            let gx = kepler_grad(&s.x, "primary centre")?;
            let gd = if p.eps == 0.0 { zero } else { kepler_grad(&(s.xprime - s.x), "second centre")? };
            // dh/dx = x/|x|^3 - eps d/|d|^3, dh/dx' = eps d/|d|^3 with d = x' - x
            Ok(CartesianState {
                y: -(gx - p.eps * gd),
                x: s.y / p.m,
                yprime: -p.eps * gd,
                xprime: zero,
            })
        }
        Model::Symmetric(sp) => {
            let gp = kepler_grad(&(s.x + sp.x0), "centre -x0")?;
            let gm = kepler_grad(&(s.x - sp.x0), "centre +x0")?;
            Ok(CartesianState {
                y: -(sp.m_plus * gp + sp.m_minus * gm),
                x: s.y,
                yprime: zero,
                xprime: zero,
            })
        }
        Model::Sea(p) => {
            let rho = p.rho;
            let gx = kepler_grad(&s.x, "primary centre")?;
            let gp = kepler_grad(&s.xprime, "sun-earth")?;
            let gd = kepler_grad(&(s.xprime - s.x), "second centre")?;
            Ok(CartesianState {
                y: -rho * (gx - p.eps * gd),
                x: rho * s.y / p.m + rho * rho * p.eps * s.yprime,
                yprime: -(gp + rho * p.eps * gd),
                xprime: rho * rho * (s.yprime / p.m_prime() + p.eps * s.y),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: CartesianState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub energy: f64,
    pub euler_g: f64,
    pub dist_c1: f64,
    pub dist_c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorMeta {
    pub tol: f64,
    pub guard: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Accumulated local error estimate (max-norm, summed over steps).
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Termination {
    Completed,
    Collision { t: f64, what: &'static str, distance: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub model: Model,
    pub samples: Vec<Sample>,
    pub diagnostics: Vec<Diagnostics>,
    pub meta: IntegratorMeta,
    pub termination: Termination,
}

impl Trajectory {
    pub fn is_collision(&self) -> bool {
        matches!(self.termination, Termination::Collision { .. })
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least the initial sample")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,y1,y2,y3,x1,x2,x3,energy,G,dist_c1,dist_c2")?;
        for (s, d) in self.samples.iter().zip(&self.diagnostics) {
            let st = &s.state;
            let vals = [
                s.t, st.y[0], st.y[1], st.y[2], st.x[0], st.x[1], st.x[2], d.energy, d.euler_g, d.dist_c1, d.dist_c2,
            ];
            let row: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Integration run parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub t_span: (f64, f64),
    pub tol: f64,
    #[serde(default = "default_guard")]
    pub guard: f64,
    /// Record on a uniform time grid instead of at each accepted step.
    #[serde(default)]
    pub sample_dt: Option<f64>,
}

fn default_guard() -> f64 {
    DEFAULT_GUARD
}

impl RunConfig {
    pub fn new(t_span: (f64, f64), tol: f64) -> Self {
        Self { t_span, tol, guard: DEFAULT_GUARD, sample_dt: None }
    }
}

/// Integrate with default options (diagnostics at every accepted step).
pub fn integrate(s0: &CartesianState, model: &Model, t_span: (f64, f64), tol: f64, guard: f64) -> Result<Trajectory> {
    integrate_with(s0, model, &RunConfig { t_span, tol, guard, sample_dt: None })
}

pub fn integrate_with(s0: &CartesianState, model: &Model, cfg: &RunConfig) -> Result<Trajectory> {
    model.validate()?;
    let (lo, hi) = TOL_RANGE;
    if !(cfg.tol >= lo && cfg.tol <= hi) {
        return Err(domain(format!("tolerance {} outside [{lo:e}, {hi:e}]", cfg.tol)));
    }
    if !(cfg.guard >= 0.0) {
        return Err(domain("guard radius must be non-negative"));
    }
    if !s0.is_finite() {
        return Err(domain("initial state is not finite"));
    }
    let (d0, what) = model.min_distance(s0);
    if d0 < cfg.guard.max(EVAL_GUARD) {
        return Err(Error::Collision { what, distance: d0, guard: cfg.guard });
    }
    let mut opts = ode::Options::new(cfg.tol);
    opts.sample_dt = cfg.sample_dt;
    let guard = cfg.guard;
    let rhs = |_t: f64, y: &[f64; STATE_DIM]| -> Result<[f64; STATE_DIM]> {
        Ok(eom(&CartesianState::from_array(y), model)?.to_array())
    };
    let event = |_t: f64, y: &[f64; STATE_DIM]| model.min_distance(&CartesianState::from_array(y)).0 - guard;
    let sol = ode::integrate(rhs, cfg.t_span.0, s0.to_array(), cfg.t_span.1, &opts, Some(event))?;

    let mut samples = Vec::with_capacity(sol.t.len());
    let mut diagnostics = Vec::with_capacity(sol.t.len());
    for (t, y) in sol.t.iter().zip(&sol.y) {
        let state = CartesianState::from_array(y);
        let (d1, d2) = model.distances(&state);
        diagnostics.push(Diagnostics {
            energy: model.hamiltonian(&state)?,
            euler_g: model.euler_integral(&state)?,
            dist_c1: d1,
            dist_c2: d2,
        });
        samples.push(Sample { t: *t, state });
    }
    let termination = match sol.event {
        Some(t) => {
            let (distance, what) = model.min_distance(&samples.last().expect("non-empty").state);
            Termination::Collision { t, what, distance }
        }
        None => Termination::Completed,
    };
    Ok(Trajectory {
        model: *model,
        samples,
        diagnostics,
        meta: IntegratorMeta {
            tol: cfg.tol,
            guard: cfg.guard,
            accepted: sol.stats.accepted,
            rejected: sol.stats.rejected,
            rhs_evals: sol.stats.rhs_evals,
            error_estimate: sol.stats.error_estimate,
        },
        termination,
    })
}

/// Integrate many initial states; parallel when the feature is enabled.
pub fn integrate_batch(states: &[CartesianState], model: &Model, cfg: &RunConfig) -> Vec<Result<Trajectory>> {
    crate::par::map(states, |s| integrate_with(s, model, cfg))
}

pub fn integrate_batch_seq(states: &[CartesianState], model: &Model, cfg: &RunConfig) -> Vec<Result<Trajectory>> {
    crate::par::map_seq(states, |s| integrate_with(s, model, cfg))
}
