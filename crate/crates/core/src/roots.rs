//! Scalar root finding: bisection and Brent's method on a sign-changing bracket.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

fn check_bracket(a: f64, b: f64, fa: f64, fb: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && fa.is_finite() && fb.is_finite()) {
        return Err(Error::Domain(format!("non-finite bracket [{a}, {b}]")));
    }
    if fa * fb > 0.0 {
        return Err(Error::Domain(format!(
            "no sign change on [{a}, {b}]: f = {fa:e}, {fb:e}"
        )));
    }
    Ok(())
}

/// Plain bisection until the bracket is narrower than `xtol`.
pub fn bisect<F>(mut f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut fa = f(a)?;
    let fb = f(b)?;
    check_bracket(a, b, fa, fb)?;
    if fa == 0.0 {
        return Ok(Root { x: a, fx: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: 0.0, iterations: 0 });
    }
    for it in 1..=max_iter {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 || (b - a).abs() <= xtol || m == a || m == b {
            return Ok(Root { x: m, fx: fm, iterations: it });
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Err(Error::NotConverged(format!("bisection after {max_iter} iterations")))
}

/// Brent's method (inverse quadratic interpolation with bisection safeguard).
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    check_bracket(a, b, fa, fb)?;
    if fa == 0.0 {
        return Ok(Root { x: a, fx: 0.0, iterations: 0 });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for it in 1..=max_iter {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(Root { x: b, fx: fb, iterations: it });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NotConverged(format!("Brent after {max_iter} iterations")))
}

/// Scan `[lo, hi]` on `n` equal cells and refine every sign change with Brent.
pub fn all_roots<F>(mut f: F, lo: f64, hi: f64, n: usize, xtol: f64) -> Result<Vec<Root>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = n.max(1);
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let fs = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..n {
        if fs[i] == 0.0 {
            out.push(Root { x: xs[i], fx: 0.0, iterations: 0 });
        } else if fs[i] * fs[i + 1] < 0.0 {
            out.push(brent(&mut f, xs[i], xs[i + 1], xtol, 200)?);
        }
    }
    if fs[n] == 0.0 {
        out.push(Root { x: xs[n], fx: 0.0, iterations: 0 });
    }
    Ok(out)
}
