//! One-dimensional compressible Navier-Stokes in Lagrangian mass coordinates
//! with temperature-dependent heat conductivity `kappa * theta^beta` and a
//! prescribed outer pressure at the wall.
//!
//! The half-line is truncated to `(0, L)` on a staggered grid: velocity on
//! faces, specific volume and temperature on cells. Time stepping is IMEX
//! with implicit viscosity and conduction. The [`diagnostics`] module
//! evaluates the energy, dissipation, norm and representation observables
//! along a trajectory; [`harness`] drives runs, sweeps, convergence studies
//! and the acceptance suite.

// `!(x > 0.0)` is used on purpose so that NaN takes the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// stencil loops read several arrays at neighbouring indices
#![allow(clippy::needless_range_loop)]

pub mod diagnostics;
pub mod domain;
pub mod error;
pub mod harness;
pub mod model;
pub mod stepper;
pub mod tridiag;

pub use domain::{
    build_grid, equilibrium_state, make_initial_data, validate_state, Grid, IcKind, IcSpec, Params,
    State,
};
pub use error::{Error, Result, StepError};
pub use stepper::{advance, stable_dt, step_imex, StepControl};
