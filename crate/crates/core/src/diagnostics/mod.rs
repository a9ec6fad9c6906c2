//! Energy accounting, contact geometry and weak-form probes over a [`FieldSeries`].
//!
//! Velocities are backward differences `(eta^i - eta^{i-1}) / dt` throughout.
//!
//! [`FieldSeries`]: crate::series::FieldSeries

pub mod boundary;
pub mod contact;
pub mod energy;
pub mod mollify;
pub mod probes;
pub mod testfn;

pub use boundary::{stress_jump_probe, velocity_jump_probe, zero_trace_residual, StressJump, VelocityJump, TraceSide};
pub use contact::{extract_contact, penetration_metrics, ContactReport, Polyline, Side};
pub use energy::{EnergyLedger, EnergyRow};
pub use mollify::{dissipation_estimate, mollify, DissipationEstimate, MollifierKernel};
pub use probes::{local_energy_residual, renormalized_residual, weak_momentum_residual, Renormalization, WeakResidual};
pub use testfn::{builtin_family, BumpTestFn, Support, TestFunction};
