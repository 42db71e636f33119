//! Canonical charts: the Delaunay-type chart built on the nodes of `C_t`,
//! `x'` and `C`, the planar P-chart of the symmetric problem and its
//! elliptic coordinates, plus the Kepler-equation solver they rely on.

pub mod delaunay;
pub mod elliptic;
pub mod kepler;

pub use delaunay::{
    cartesian_to_delaunay, delaunay_to_cartesian, g0_from_parts, g0_in_chart, kepler_energy, DelaunayChart,
    DelaunayElements,
};
pub use elliptic::{
    centre_distances, elliptic_from_cartesian, eval_h_elliptic, eval_h_p_chart, from_elliptic, hj_split, p_chart,
    to_elliptic, EllipticState, PChartState,
};
pub use kepler::{eccentric_from_true, mean_from_eccentric, solve_kepler, true_from_eccentric};
