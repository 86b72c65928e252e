//! Adaptive 1D grids driven by a positive grid field.
//!
//! The field `k` attached to the grid nodes evolves by a
//! preferential-attachment rate law: each node grows in proportion to its
//! share `k_i / sum k_j` of the field. Grid steps follow from the field
//! through `h = A/k`, so regions where the field has grown get fine steps.
//! Calibrating the growth rate against the local Péclet number `b h / (2 mu)`
//! yields boundary-layer grids for the 1D diffusion-transport equation,
//! which an upwind finite-difference solver then exercises against the
//! exact solution.
//!
//! Modules:
//! - [`kfield`]: the rate equation, its closed forms, explicit stepping.
//! - [`gridgen`]: step laws, Péclet calibration, grid generation.
//! - [`solver`]: nonuniform upwind finite differences, Thomas solve, norms.
//! - [`bench`]: grid-vs-grid comparison reports and convergence studies.
//! - [`cli`]: the pipelines behind the `gridfield` binary.

pub mod bench;
pub mod cli;
pub mod error;
pub mod gridgen;
pub mod kfield;
mod numfmt;
pub mod solver;

pub use error::{Error, Result};
