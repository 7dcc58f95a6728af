//! Numerical iteration theory for holomorphic self-maps of the unit ball
//! `B^q` and the Siegel half-space `H^q`.

pub mod ball_geometry;
pub mod cli;
pub mod error;
pub mod estimation;
pub mod functional_equations;
pub mod invariants;
pub mod lft_models;
pub mod linalg;
pub mod sampling;
pub mod self_maps;
pub mod semigroups;

pub use error::{Error, Result};
