//! Simulation library for dispersion-engineered sum-frequency conversion of
//! quantum light (the quantum pulse gate).
//!
//! The modules follow the signal chain: material dispersion feeds the
//! three-wave phase mismatch, which shapes the joint spectra of the photon-pair
//! source and the converter. Photon statistics and efficiency accounting sit
//! on top, and [`processfinder`] searches for group-velocity-matched operating
//! points.

pub mod dispersion;
pub mod efficiency;
pub mod error;
pub mod export;
pub mod fit;
pub mod jsa;
pub mod map;
pub mod phasematching;
pub mod photonstats;
pub mod presets;
pub mod processfinder;
pub mod report;
pub mod units;

pub use error::{Error, Result};
pub use map::ComplexMap2D;
pub use units::{Frequency, SpectralGrid, Temperature, Wavelength, SPEED_OF_LIGHT};
