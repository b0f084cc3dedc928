//! Simulation and analysis toolkit for single quantum emitters coupled to
//! photonic crystal cavities.
//!
//! The crate is split by stage of the measurement chain:
//!
//! - [`photophysics`]: closed-form rate, Purcell and correlation models.
//! - [`sim`]: kinetic Monte Carlo of the three-level emitter and a detector chain.
//! - [`correlation`]: coincidence histograms, g² normalization and lifetime histograms.
//! - [`fitting`]: Levenberg-Marquardt engine and the spectral, lifetime, g² and
//!   saturation models.
//! - [`extraction`]: detuning bookkeeping, Purcell factor from fluxes and the
//!   quantum-efficiency bound.
//! - [`io`]: time-tag and CSV file formats.

// `!(x > 0.0)` is used on purpose: unlike `x <= 0.0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlation;
pub mod error;
pub mod extraction;
pub mod fitting;
pub mod io;
pub mod photophysics;
pub mod sim;

pub use error::{Error, Result};
