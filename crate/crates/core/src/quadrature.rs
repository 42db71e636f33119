//! Quadrature rules: periodic trapezoid with node doubling (spectrally
//! accurate on smooth periodic integrands) and adaptive Gauss–Kronrod 7/15.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicMean {
    pub value: f64,
    /// Node count of the accepted rule.
    pub nodes: usize,
    /// Change between the last two rules.
    pub last_change: f64,
}

/// Mean of a `2π`-periodic function, `(1/2π)∫₀^{2π} f`, by the trapezoid rule
/// on `n0, 2·n0, 4·n0, …` equispaced nodes until successive values differ by
/// at most `rel_tol·max(|value|, 1e-300)`.
pub fn periodic_mean<F>(mut f: F, n0: usize, rel_tol: f64, max_nodes: usize) -> Result<PeriodicMean>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut n = n0.max(4);
    let mut sum = 0.0;
    for j in 0..n {
        sum += f(TAU * j as f64 / n as f64)?;
    }
    let mut mean = sum / n as f64;
    loop {
        if 2 * n > max_nodes {
            return Err(Error::NotConverged(format!(
                "periodic trapezoid exceeded {max_nodes} nodes"
            )));
        }
        let mut mid = 0.0;
        for j in 0..n {
            mid += f(TAU * (j as f64 + 0.5) / n as f64)?;
        }
        sum += mid;
        n *= 2;
        let next = sum / n as f64;
        let change = (next - mean).abs();
        mean = next;
        if change <= rel_tol * mean.abs().max(1e-300) {
            return Ok(PeriodicMean {
                value: mean,
                nodes: n,
                last_change: change,
            });
        }
    }
}

/// Fixed-node periodic trapezoid mean with `n` nodes.
pub fn periodic_mean_fixed<F>(mut f: F, n: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut sum = 0.0;
    for j in 0..n {
        sum += f(TAU * j as f64 / n as f64)?;
    }
    Ok(sum / n as f64)
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx)? + f(c + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveResult {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Globally adaptive Gauss–Kronrod 7/15 on `[a, b]`: the interval with the
/// largest error estimate is bisected until the summed estimate falls below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive_gk<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_intervals: usize) -> Result<AdaptiveResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (v, e) = gk15(&mut f, a, b)?;
    let mut pieces = vec![(a, b, v, e)];
    loop {
        let total: f64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(AdaptiveResult {
                value: total,
                error_estimate: err,
                intervals: pieces.len(),
            });
        }
        if pieces.len() >= max_intervals {
            return Err(Error::NotConverged(format!(
                "adaptive Gauss-Kronrod: error {err:e} after {max_intervals} intervals"
            )));
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid)?;
        let (v2, e2) = gk15(&mut f, mid, hi)?;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}
