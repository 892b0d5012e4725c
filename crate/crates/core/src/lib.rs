//! Centrifuge G-cueing simulation.
//!
//! A human centrifuge reproduces the G-level of a simulated aircraft by
//! spinning its arm and pitching the cabin into the gravito-inertial vector.
//! Two cabin pitch laws are provided: true alignment ([`CueingLaw::Rm`]) and
//! coherent alignment with a predictive offset ([`CueingLaw::Coham`]), which
//! pre-tilts the cabin so fast G onsets need less cabin rotation and so
//! produce less cross-coupled head acceleration.

pub mod cli;
pub mod config;
pub mod coriolis;
pub mod cueing;
pub mod interp;
pub mod kinematics;
pub mod metrics;
pub mod plant;
pub mod sim;

pub use config::{Config, ConfigError};
pub use cueing::CueingLaw;
pub use sim::{run, run_both, RunTrace, Scenario};
