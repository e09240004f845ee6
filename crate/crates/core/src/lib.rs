//! Momentum-ladder simulation of Raman light-pulse atom interferometry with a
//! retroreflected beam geometry.
//!
//! Both counterpropagating Raman pairs are always present. A bias velocity
//! along the beam axis Doppler-splits their resonances, so the pair that
//! drives a pulse is chosen purely by the modulation frequency. Large momentum
//! transfer then amounts to hopping that frequency between the two resonances.
//!
//! Layout:
//! - [`physics`]: constants, species presets and the scalar resonance formulas.
//! - [`propagator`]: rotating-frame Hamiltonian and exact unitary evolution of
//!   one atom over the internal-state x momentum ladder.
//! - [`sequencer`]: Mach-Zehnder and LMT pulse sequences with their
//!   modulation-frequency schedule.
//! - [`ensemble`]: thermal velocity averaging.
//! - [`experiments`]: spectrum and fringe scans, peak finding, cosine fits.

pub mod constants;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod physics;
pub mod propagator;
pub mod schedule;
pub mod sequencer;
mod summation;

pub use error::{Error, Result};
pub use physics::{AtomSpecies, Channel, ChannelSet, KinematicState};
