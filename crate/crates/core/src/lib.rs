//! Channel synthesis, degrees-of-freedom analysis and effective-DoF optimization
//! for MIMO links built from dynamic agile reconfigurable metasurface antennas
//! (DARISAs).
//!
//! The crate is organized bottom-up:
//!
//! * [`array_geometry`] places metasurface elements on planar arrays.
//! * [`cluster_channel`] samples clustered scattering environments on the
//!   wavenumber lattice and assembles the array-scattering matrix `H_w`.
//! * [`wavenumber_dof`] holds the closed-form DoF predictions.
//! * [`spacetime_channel`] stacks `K` agile phase slots into the composite
//!   channel `H_C = Q_r^H H_w_bar Q_t`.
//! * [`metrics`] computes rank, effective DoF and capacities.
//! * [`edof_optimizer`] maximizes the effective DoF over receive phases with a
//!   Dinkelbach bisection around a block-structured semidefinite relaxation.
//! * [`experiments`] drives seeded Monte Carlo sweeps and writes CSV/JSON.

pub mod array_geometry;
pub mod cluster_channel;
pub mod edof_optimizer;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod spacetime_channel;
pub mod wavenumber_dof;

pub use error::{Error, Result};
