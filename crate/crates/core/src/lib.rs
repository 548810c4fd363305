//! Open-system dynamics of a Rydberg superatom: a blockaded atomic ensemble
//! acting as one collectively enhanced two-level emitter, driven by a
//! propagating few-photon probe pulse.
//!
//! The state lives on `[|G>, |W>, |D>]` (ground, bright, dark). The main
//! entry points are [`evolve`] for the density matrix, [`observables`] for
//! photon fluxes and populations, [`g2_matrix`] for two-time photon
//! correlations, the closed-form helpers in [`analytics`], the geometric
//! coupling estimate in [`coupling`], the few-photon reference solver in
//! [`oracle`] and the least-squares estimator in [`fitting`].

pub mod analytics;
pub mod correlation;
pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod fitting;
pub mod ode;
pub mod oracle;
pub mod params;
pub mod pulse;
pub mod quad;
pub mod state;

pub use correlation::{conditional_state, equal_time_g2, g2_matrix, CorrelationGrid};
pub use dynamics::{evolve, lindblad_rhs, observables, ObservableTrace, Trajectory};
pub use error::{Error, Result};
pub use params::SuperatomParams;
pub use pulse::{Drive, PulseShape, PulseSpec};
pub use state::DensityMatrix;
