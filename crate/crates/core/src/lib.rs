//! Subsonic time-periodic flows of the isentropic Euler equations with a
//! nonlinear friction term `beta(t, x) rho |u|^alpha u` in a pipe `[0, L]`.
//!
//! The crate computes the time-periodic solution triggered by periodic
//! boundary data with a characteristic fixed-point iteration
//! ([`fixed_point`]), integrates the initial-boundary value problem forward
//! with an upwind scheme on the Riemann invariants ([`ibvp`]), checks both
//! against an independent finite-volume solver ([`fvm`]) and measures the
//! exponential decay of perturbations towards the periodic orbit
//! ([`stability`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod field;
pub mod fixed_point;
pub mod friction;
pub mod fvm;
pub mod ibvp;
pub mod model;
pub mod refinement;
pub mod stability;
pub mod tracer;

pub use boundary::{BoundaryData, TrigSeries};
pub use cli::cli_dispatch;
pub use config::{parse_config, SimulationConfig};
pub use error::{Error, Result};
pub use field::PeriodicField;
pub use fixed_point::{c1_norm_estimate, linearized_sweep, solve_periodic, Grid, SolveOptions, SolverReport};
pub use friction::{FrictionKind, FrictionSpec, TrigTerm};
pub use ibvp::{BoundaryMode, Ibvp, IbvpState, RunError, Trajectory};
pub use model::{GasParams, Perturbation, PhysState, RiemannState};
