//! Quantum-classical correspondence toolkit for two bipartite models: the
//! Pullen-Edmonds pair of quartically coupled oscillators and the generalized
//! Jaynes-Cummings model (a spin-J collective atom coupled to one field mode).
//!
//! The crate is organised around the two halves of the correspondence:
//!
//! * [`models`] defines energies, Hamilton's equations, quantized Hamiltonians
//!   and coherent initial states.
//! * [`classical`] integrates trajectories, takes Poincaré sections and
//!   estimates the maximal Lyapunov exponent.
//! * [`spectral`] turns trajectories into power spectra, spectral lines and
//!   frequency entropies.
//! * [`quantum`] diagonalizes truncated Hamiltonians and produces
//!   entanglement-entropy curves and energy-eigenbasis density spectra.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`, with `*32` variants for `f32`.

// `!(x > 0)` style checks are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod io;
pub mod linalg;
pub mod models;
pub mod quantum;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

pub type PhasePoint = models::PhasePoint<f64>;
pub type ModelSpec = models::ModelSpec<f64>;
pub type PullenEdmonds = models::PullenEdmonds<f64>;
pub type JaynesCummings = models::JaynesCummings<f64>;
pub type QuantumState = models::QuantumState<f64>;
pub type HermitianOperator = models::HermitianOperator<f64>;
pub type Trajectory = classical::Trajectory<f64>;
pub type SectionPoints = classical::SectionPoints<f64>;
pub type PowerSpectrum = spectral::PowerSpectrum<f64>;
pub type SpectralLines = spectral::SpectralLines<f64>;
pub type FrequencyEntropy = spectral::FrequencyEntropy<f64>;
pub type EigenSystem = quantum::EigenSystem<f64>;
pub type ReducedDensity = quantum::ReducedDensity<f64>;
pub type EntropyCurve = quantum::EntropyCurve<f64>;
pub type DensitySpectrum = quantum::DensitySpectrum<f64>;

pub type PhasePoint32 = models::PhasePoint<f32>;
pub type ModelSpec32 = models::ModelSpec<f32>;
pub type QuantumState32 = models::QuantumState<f32>;
pub type Trajectory32 = classical::Trajectory<f32>;
pub type PowerSpectrum32 = spectral::PowerSpectrum<f32>;
pub type EigenSystem32 = quantum::EigenSystem<f32>;

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
