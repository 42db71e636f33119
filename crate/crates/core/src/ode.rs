//! Dormand–Prince 5(4) with dense output, PI step-size control and a
//! terminal event located on the continuous extension.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
// difference between the 5th and embedded 4th order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const ALPHA: f64 = 0.7 / 5.0;
const BETA: f64 = 0.4 / 5.0;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    /// Relative and absolute tolerance (mixed error norm).
    pub tol: f64,
    pub h0: Option<f64>,
    pub max_steps: usize,
    /// Emit samples on this uniform grid (via dense output) instead of at
    /// every accepted step.
    pub sample_dt: Option<f64>,
}

impl Options {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            h0: None,
            max_steps: 5_000_000,
            sample_dt: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Sum over accepted steps of the max-norm local error estimate.
    pub error_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub stats: Stats,
    /// Set when the event function became negative; the last sample is the
    /// located event point, still on the non-negative side.
    pub event: Option<f64>,
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    r: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut out = [0.0; N];
        for i in 0..N {
            let r = &self.r;
            out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        out
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, coef: &[f64], k: &[[f64; N]]) -> [f64; N] {
    let mut out = *y;
    for (c, kj) in coef.iter().zip(k) {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * kj[i];
            }
        }
    }
    out
}

fn rms_norm<const N: usize>(v: &[f64; N], scale: &[f64; N]) -> f64 {
    (v.iter().zip(scale).map(|(e, s)| (e / s).powi(2)).sum::<f64>() / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(f: &mut F, t0: f64, y0: &[f64; N], k0: &[f64; N], tol: f64, span: f64) -> Result<f64>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let scale: [f64; N] = std::array::from_fn(|i| tol + tol * y0[i].abs());
    let d0 = rms_norm(y0, &scale);
    let d1 = rms_norm(k0, &scale);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: [f64; N] = std::array::from_fn(|i| y0[i] + h0 * k0[i]);
    let k1 = f(t0 + h0, &y1)?;
    let diff: [f64; N] = std::array::from_fn(|i| k1[i] - k0[i]);
    let d2 = rms_norm(&diff, &scale) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(span))
}

/// Integrate `dy/dt = f(t, y)` from `t0` to `t1 > t0`.
///
/// If `event` is given, integration stops at the first time its value turns
/// negative. The last sample is then the latest point found (to near machine
/// precision on the dense output) where the event value is still `>= 0`.
pub fn integrate<const N: usize, F, G>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &Options,
    mut event: Option<G>,
) -> Result<Solution<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    G: FnMut(f64, &[f64; N]) -> f64,
{
    if !(t1 > t0) {
        return Err(Error::Domain(format!("integration span must satisfy t1 > t0, got [{t0}, {t1}]")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let mut stats = Stats::default();
    let mut ts = vec![t0];
    let mut ys = vec![y0];
    if let Some(g) = event.as_mut() {
        if g(t0, &y0) < 0.0 {
            return Ok(Solution { t: ts, y: ys, stats, event: Some(t0) });
        }
    }
    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y)?;
    stats.rhs_evals += 1;
    let mut h = match opts.h0 {
        Some(h) => h.min(span),
        None => {
            stats.rhs_evals += 1;
            initial_step(&mut f, t0, &y0, &k[0], opts.tol, span)?
        }
    };
    let mut err_prev: f64 = 1e-4;
    let mut last_rejected = false;
    let mut next_sample = opts.sample_dt.map(|dt| t0 + dt);

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integrator { t, reason: format!("exceeded {} steps", opts.max_steps) });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integrator { t, reason: format!("step size underflow (h = {h:e})") });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let stage = |f: &mut F, j: usize, coef: &[f64], k: &[[f64; N]; 7]| {
            let yi = axpy(&y, h, coef, &k[..coef.len()]);
            f(t + C[j] * h, &yi)
        };
        let step = (|| -> Result<[f64; N]> {
            k[1] = stage(&mut f, 1, &A2, &k)?;
            k[2] = stage(&mut f, 2, &A3, &k)?;
            k[3] = stage(&mut f, 3, &A4, &k)?;
            k[4] = stage(&mut f, 4, &A5, &k)?;
            k[5] = stage(&mut f, 5, &A6, &k)?;
            let y_new = axpy(&y, h, &B, &k[..6]);
            k[6] = f(t + h, &y_new)?;
            Ok(y_new)
        })();
        stats.rhs_evals += 6;
        let y_new = match step {
            Ok(v) if v.iter().all(|c| c.is_finite()) && k[6].iter().all(|c| c.is_finite()) => v,
            // a stage landed on a singularity: retry with a smaller step
            _ => {
                stats.rejected += 1;
                h *= 0.25;
                last_rejected = true;
                continue;
            }
        };
        let err_vec: [f64; N] = std::array::from_fn(|i| h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>());
        let scale: [f64; N] = std::array::from_fn(|i| opts.tol + opts.tol * y[i].abs().max(y_new[i].abs()));
        let err = rms_norm(&err_vec, &scale);

        if err <= 1.0 {
            stats.accepted += 1;
            stats.error_estimate += err_vec.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            let dense = {
                let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
                let bspl: [f64; N] = std::array::from_fn(|i| h * k[0][i] - ydiff[i]);
                let r3: [f64; N] = std::array::from_fn(|i| ydiff[i] - h * k[6][i] - bspl[i]);
                let r4: [f64; N] = std::array::from_fn(|i| h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>());
                DenseStep { t0: t, h, r: [y, ydiff, bspl, r3, r4] }
            };
            let t_new = if last { t1 } else { t + h };

            let mut hit = None;
            if let Some(g) = event.as_mut() {
                // probe interior points too, so a brief dip is not stepped over
                let probes = [0.25, 0.5, 0.75, 1.0];
                let mut lo = t;
                for th in probes {
                    let tp = if th == 1.0 { t_new } else { t + th * h };
                    let yp = if th == 1.0 { y_new } else { dense.eval(tp) };
                    if g(tp, &yp) < 0.0 {
                        // bisect keeping `lo` on the admissible side, so the
                        // reported point never violates the event boundary
                        let mut hi = tp;
                        while hi - lo > 4.0 * f64::EPSILON * hi.abs().max(1.0) {
                            let mid = 0.5 * (lo + hi);
                            if g(mid, &dense.eval(mid)) < 0.0 {
                                hi = mid;
                            } else {
                                lo = mid;
                            }
                        }
                        hit = Some(lo);
                        break;
                    }
                    lo = tp;
                }
            }

            if let Some(dt) = opts.sample_dt {
                let stop = hit.unwrap_or(t_new);
                while let Some(ts_next) = next_sample {
                    if ts_next > stop || ts_next >= t1 {
                        break;
                    }
                    ts.push(ts_next);
                    ys.push(dense.eval(ts_next));
                    next_sample = Some(ts_next + dt);
                }
            }
            if let Some(te) = hit {
                ts.push(te);
                ys.push(dense.eval(te));
                return Ok(Solution { t: ts, y: ys, stats, event: Some(te) });
            }
            if opts.sample_dt.is_none() || last {
                ts.push(t_new);
                ys.push(y_new);
            }
            if last {
                return Ok(Solution { t: ts, y: ys, stats, event: None });
            }

            let mut fac = SAFETY * err.max(1e-10).powf(-ALPHA) * err_prev.powf(BETA);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if last_rejected {
                fac = fac.min(1.0);
            }
            err_prev = err.max(1e-4);
            t = t_new;
            y = y_new;
            k[0] = k[6];
            h *= fac;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = (SAFETY * err.powf(-0.2)).max(FAC_MIN);
            h *= fac;
            last_rejected = true;
        }
    }
}

/// Convenience wrapper without an event function.
pub fn integrate_plain<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64, opts: &Options) -> Result<Solution<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    integrate(f, t0, y0, t1, opts, None::<fn(f64, &[f64; N]) -> f64>)
}
