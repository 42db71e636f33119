//! Central finite-difference gradients and Poisson brackets over the
//! canonical Cartesian coordinates `(x, y)` and `(x', y')`.

use crate::error::{Error, Result};
use crate::state::{CartesianState, Vec3, STATE_DIM};

/// Default relative step for central differences.
pub const DEFAULT_H_REL: f64 = 1e-6;

/// Gradient split into conjugate blocks. Index 0 is the attracted body
/// `(x, y)`, index 1 the second centre `(x', y')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalGradient {
    pub dy: [Vec3; 2],
    pub dx: [Vec3; 2],
}

impl CanonicalGradient {
    fn from_flat(g: &[f64; STATE_DIM]) -> Self {
        let v = |i: usize| Vec3::new(g[i], g[i + 1], g[i + 2]);
        // flat layout is [y', y, x', x]
        Self {
            dy: [v(3), v(0)],
            dx: [v(9), v(6)],
        }
    }
}

/// Central-difference gradient of `f` at `s`, step `h_rel * max(1, |c|)` per
/// component. The step is rounded so that `c + h` is exactly representable.
pub fn grad_canonical<F>(f: F, s: &CartesianState, h_rel: f64) -> Result<CanonicalGradient>
where
    F: Fn(&CartesianState) -> Result<f64>,
{
    if !(h_rel > 0.0) {
        return Err(Error::Domain(format!("h_rel must be positive, got {h_rel}")));
    }
    let base = s.to_array();
    let mut grad = [0.0; STATE_DIM];
    for (i, slot) in grad.iter_mut().enumerate() {
        let c = base[i];
        let h = {
            let raw = h_rel * c.abs().max(1.0);
            (c + raw) - c
        };
        let mut plus = base;
        plus[i] = c + h;
        let mut minus = base;
        minus[i] = c - h;
        let fp = f(&CartesianState::from_array(&plus)).map_err(|e| Error::Stencil(Box::new(e)))?;
        let fm = f(&CartesianState::from_array(&minus)).map_err(|e| Error::Stencil(Box::new(e)))?;
        *slot = (fp - fm) / (2.0 * h);
    }
    Ok(CanonicalGradient::from_flat(&grad))
}

/// `{f, g} = Σ ∂f/∂x·∂g/∂y − ∂f/∂y·∂g/∂x` over both conjugate blocks, so that
/// `{x_i, y_j} = δ_ij`.
pub fn poisson_bracket<F, G>(f: F, g: G, s: &CartesianState, h_rel: f64) -> Result<f64>
where
    F: Fn(&CartesianState) -> Result<f64>,
    G: Fn(&CartesianState) -> Result<f64>,
{
    let df = grad_canonical(f, s, h_rel)?;
    let dg = grad_canonical(g, s, h_rel)?;
    Ok(bracket_from_gradients(&df, &dg))
}

pub fn bracket_from_gradients(df: &CanonicalGradient, dg: &CanonicalGradient) -> f64 {
    (0..2)
        .map(|b| df.dx[b].dot(&dg.dy[b]) - df.dy[b].dot(&dg.dx[b]))
        .sum()
}

/// Richardson-extrapolated bracket from steps `h_rel` and `h_rel / 2`,
/// cancelling the leading `O(h²)` stencil error.
pub fn poisson_bracket_richardson<F, G>(f: F, g: G, s: &CartesianState, h_rel: f64) -> Result<f64>
where
    F: Fn(&CartesianState) -> Result<f64>,
    G: Fn(&CartesianState) -> Result<f64>,
{
    let coarse = poisson_bracket(&f, &g, s, h_rel)?;
    let fine = poisson_bracket(&f, &g, s, 0.5 * h_rel)?;
    Ok((4.0 * fine - coarse) / 3.0)
}
