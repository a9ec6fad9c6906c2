//! Penalized obstacle problem for a one-dimensional viscoelastic string.
//!
//! The string `eta(t, x) >= 0` on `[0, l]` obeys
//! `eta_tt - alpha eta_txx - eta_xx = F`, with a contact force that is
//! approximated by the penalty `(1/eps) [eta < 0] (eta_t)^-`.
//!
//! * [`fd`] is the implicit finite-difference solver.
//! * [`galerkin`] is an independent sine-mode Galerkin solver with smooth cutoffs.
//! * [`analytic`] gives closed-form damped modes for contact-free runs.
//! * [`diagnostics`] holds the energy ledger, contact extraction and weak-form probes.

pub mod analytic;
pub mod diagnostics;
pub mod error;
pub mod fd;
pub mod galerkin;
pub mod model;
pub mod series;
pub mod trisolve;

pub use error::{ConfigError, ProbeError, SolverError};
pub use fd::{run, RunOutput};
pub use model::{evaluate_initial, presets, Grid1D, InitialData, Physics, SimConfig, TimeGrid};
pub use series::{FieldKind, FieldSeries, SpaceTime, StringState};
pub use trisolve::{thomas_solve, ThomasFactor, Tridiagonal};
