//! JSON run configurations, one per subcommand.

use std::path::Path;

use casimir_decoherence::entropy::SieveOptions;
use casimir_decoherence::pairs::PairParams;
use casimir_decoherence::phasespace::{GridSpec, Parity, SolverOptions};
use casimir_decoherence::quadrature::QuadOptions;
use casimir_decoherence::PhysicalConfig64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn u_min() -> f64 {
    1e-2
}
fn u_max() -> f64 {
    1e2
}
fn points() -> usize {
    512
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub physical: PhysicalConfig64,
    /// ω/Ω range, log-spaced.
    #[serde(default = "u_min")]
    pub u_min: f64,
    #[serde(default = "u_max")]
    pub u_max: f64,
    #[serde(default = "points")]
    pub points: usize,
    #[serde(default)]
    pub quadrature: QuadOptions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffsConfig {
    pub physical: PhysicalConfig64,
    /// Trace end time in units of 1/ω₀.
    pub t_max: f64,
    pub steps: usize,
    #[serde(default)]
    pub quadrature: QuadOptions,
}

/// Where the Fokker-Planck coefficients come from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSource {
    Constant {
        gamma: f64,
        d1: f64,
        #[serde(default)]
        d2: f64,
        #[serde(default)]
        delta_m: f64,
    },
    /// Long-time values Γ(∞), D₁(∞) and the principal-value D₂.
    Asymptotic,
    /// Time-dependent trace sampled with `steps` intervals (vacuum only).
    Trace { steps: usize },
}

fn even() -> Parity {
    Parity::Even
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub physical: PhysicalConfig64,
    /// |α| of the momentum cat.
    pub alpha: f64,
    #[serde(default = "even")]
    pub parity: Parity,
    pub coefficients: CoefficientSource,
    /// Evolution time in oscillation periods.
    pub periods: f64,
    /// Defaults to the cat-sized 256² grid.
    #[serde(default)]
    pub grid: Option<GridSpec<f64>>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub sphere_radius: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveConfig {
    pub physical: PhysicalConfig64,
    pub coefficients: CoefficientSource,
    #[serde(default)]
    pub options: SieveOptions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairsConfig {
    pub params: PairParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalConfig {
    pub temperatures_k: Vec<f64>,
    pub area_m2: f64,
    #[serde(default)]
    pub mass_kg: Option<f64>,
    #[serde(default)]
    pub delta_q_m: Option<f64>,
    #[serde(default)]
    pub omega0_per_s: Option<f64>,
}
