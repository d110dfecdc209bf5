//! Radiation-pressure decoherence of a harmonically bound mirror.

pub mod coefficients;
pub mod entropy;
pub mod error;
pub mod filon;
pub mod io;
pub mod optimize;
pub mod pairs;
pub mod phasespace;
pub mod quadrature;
pub mod real;
pub mod special;
pub mod spectral;
pub mod thermal;

pub use error::{Error, Result};
pub use real::Real;

pub type PhysicalConfig64 = spectral::PhysicalConfig<f64>;
pub type SpectralTable64 = spectral::SpectralTable<f64>;
pub type CoefficientTrace64 = coefficients::CoefficientTrace<f64>;
pub type GaussianState64 = phasespace::GaussianState<f64>;
pub type WignerGrid64 = phasespace::WignerGrid<f64>;
pub type Coefficients64 = phasespace::Coefficients<f64>;
