//! Finite-window potentials, partition sums over zero-padded configurations
//! and pressure.

mod bounds;
mod partition;
mod potential;
mod pressure;

pub use bounds::{check_lemma3, check_lemma4, Lemma3Report, Lemma4Report};
pub use partition::{xi_constrained, xi_full, PartitionSum};
pub(crate) use partition::{transfer, Pin};
pub use potential::{osc_profile, osc_profile_within, OscProfile, Oscillation, Potential, DEFAULT_TABLE_BUDGET};
pub use pressure::{aitken, pressure, PressureCurve, PressureEstimate, PressureMode, PressurePoint};
