//! Simulation of polarization-entangled photon pairs detected after random
//! multiple scattering.
//!
//! Summing over `N` detected spatial modes turns the scattered pure Bell
//! state into a mixed two-qubit state. This crate samples that state from the
//! Gaussian (Laguerre) ensemble of scattering amplitudes, evaluates its
//! concurrence, maximal CHSH value and pseudo-concurrence, estimates their
//! ensemble averages by Monte Carlo, and provides the large-deviation and
//! closed-form asymptotics of those averages.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the double-precision types used by the Monte Carlo driver.

pub mod asymptotics;
pub mod ensembles;
mod error;
pub mod montecarlo;
pub mod qstate;
mod scalar;
mod scenario;
pub mod smallalg;

pub use error::{Error, Result};
pub use scalar::Real;
pub use scenario::{Beams, Mixing, Scenario};

pub type ComplexMatrix4 = smallalg::ComplexMatrix4<f64>;
pub type DensityMatrix = qstate::DensityMatrix<f64>;
pub type GramMatrix4 = qstate::GramMatrix<f64, 4>;
pub type GramMatrix2 = qstate::GramMatrix<f64, 2>;
pub type Measures = qstate::Measures<f64>;
pub type RescaledSpectrum = asymptotics::RescaledSpectrum<f64>;

pub type DensityMatrix32 = qstate::DensityMatrix<f32>;
pub type Measures32 = qstate::Measures<f32>;
