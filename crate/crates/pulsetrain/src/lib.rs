//! Complete population transfer in a three-state Lambda system driven by a
//! train of N pairs of resonant, coincident pump/Stokes pulses.
//!
//! The crate provides the exact single-pair propagator and its cascade, the
//! optimal mixing-angle schedule theta_k = (2k-1) pi / (4N), direct numerical
//! integration of the (optionally lossy) Schroedinger equation, envelope
//! construction for concrete pulse trains, and brute-force oracles that
//! cross-validate the closed-form results.

pub mod analytic;
pub mod claims;
pub mod designer;
pub mod integrator;
pub mod model;
pub mod oracle;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("grid too coarse: dt = {dt} exceeds {max} (narrowest width / 100)")]
    GridTooCoarse { dt: f64, max: f64 },
    #[error("no feasible angle tuple on a {grid_points}-point grid; refine the grid")]
    NoFeasibleTuple { grid_points: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
