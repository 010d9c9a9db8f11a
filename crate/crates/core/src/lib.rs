//! Quaternionic quantum mechanics on a lattice: quaternion algebra, lattice
//! fields, background potentials, operators, time evolution and the
//! identity battery.

pub mod convergence;
pub mod dynamics;
pub mod error;
pub mod gauge;
pub mod identities;
pub mod lattice;
pub mod left;
pub mod operators;
pub mod quaternion;

pub use error::{HqmError, Result};
pub use lattice::{Boundary, Grid, QField, QVectorField};
pub use quaternion::{Quaternion, QVector3, SymplecticPair};
