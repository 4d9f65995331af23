//! Phase-space analysis of optical vortex beams.
//!
//! The crate builds a desk-scale computational replica of a shearing-Sagnac
//! Wigner-function measurement:
//!
//! - [`lg`] evaluates Laguerre-Gaussian vortex fields on sampling grids,
//!   including generation by spiral-phase-plate action on a Gaussian beam.
//! - [`wigner`] holds the closed-form Wigner distribution of those modes,
//!   the ground truth the simulated pipeline is checked against.
//! - [`sagnac`] calibrates the glass-block shear and synthesizes the four
//!   interferogram frames per shear setting, then extracts the two-point
//!   correlation function (TPCF).
//! - [`reconstruct`] Fourier-transforms a TPCF into a Wigner slice over
//!   momenta at the fixed shear, with a measured momentum-axis calibration.
//! - [`bell`] evaluates and maximizes the continuous-variable Bell-CHSH
//!   parameter from parity values, analytic or reconstructed.
//! - [`pipeline`] wires the stages together for scans and repetition
//!   statistics; [`export`] renders CSV tables and PNG plots.

pub mod bell;
pub mod error;
mod fft;
pub mod export;
pub mod grid;
pub mod lg;
pub mod pgm;
pub mod pipeline;
pub mod reconstruct;
pub mod sagnac;
pub mod wigner;

mod optim;

pub use error::{Error, Result};
