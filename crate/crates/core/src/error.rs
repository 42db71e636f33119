use thiserror::Error;

/// Chart or node degeneracies that make some coordinate undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// Total angular momentum `C_t` vanishes.
    TotalMomentumZero,
    /// Asteroid angular momentum `C` vanishes.
    MomentumZero,
    /// Second centre sits at the origin.
    CentreAtOrigin,
    /// `n0 = k x C_t` vanishes (`C_t` along the reference axis).
    NodeN0,
    /// `n1 = C_t x x'` vanishes.
    NodeN1,
    /// `n = x' x C` vanishes (`|Theta| = G`).
    NodeN,
    /// Eccentricity zero: pericentre undefined.
    CircularOrbit,
    /// Elliptic chart boundary (`lambda = 1` or `|mu| = 1`).
    EllipticBoundary,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("collision: {what} distance {distance:e} below guard {guard:e}")]
    Collision {
        what: &'static str,
        distance: f64,
        guard: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("orbit is not bound (Keplerian energy {0:e} >= 0)")]
    Unbound(f64),
    #[error("chart degenerate: {0:?}")]
    Degenerate(Vec<Degeneracy>),
    #[error("finite-difference stencil failed: {0}")]
    Stencil(Box<Error>),
    #[error("integrator failure at t = {t}: {reason}")]
    Integrator { t: f64, reason: String },
    #[error("no convergence: {0}")]
    NotConverged(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate transition at delta = 2")]
    Transition,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
