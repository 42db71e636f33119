//! Two-centre (Euler) problem and its Sun–Earth–Asteroid application:
//! Hamiltonians, first integrals, canonical charts, the planar phase
//! portrait of the Euler integral, secular averaging and collision risk.

pub mod bracket;
pub mod collision;
pub mod coords;
pub mod dynamics;
pub mod error;
pub mod integrals;
pub mod ode;
pub mod par;
pub mod portrait;
pub mod quadrature;
pub mod roots;
pub mod secular;
pub mod state;

pub use error::{Degeneracy, Error, Result};
pub use state::{CartesianState, MassParams, Vec3};
