use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::real::Real;
use crate::spectral::PhysicalConfig;

/// Closed-form decoherence times of a momentum cat with amplitude |α|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct DecoherencePredictors<R> {
    /// Separation ΔP = 2P₀ and ΔQ = ΔP/(Mω₀).
    pub delta_p: R,
    pub delta_q: R,
    /// ħ²/(2P₀²D₁)
    pub from_diffusion: R,
    /// tanh(ħω₀/2T)/(4|α|²Γ)
    pub from_damping: R,
    /// 4(Δp₀/ΔP)²/Γ
    pub momentum_distance: R,
    /// 4(Δq₀/ΔQ)²/Γ
    pub position_distance: R,
    /// 2(λ_T/ΔQ)²/Γ with λ_T = ħ/√(2MT); only for T > 0.
    pub thermal_wavelength: Option<R>,
    /// (3/v²)(2π/ω₀), v = P₀/(Mc): perfect mirror at T = 0.
    pub perfect_mirror: R,
    /// (324/v²)(ω₀R/c)⁻⁶(2π/ω₀) when a sphere radius is given.
    pub sphere: Option<R>,
    pub warnings: Vec<String>,
}

/// Evaluate every predictor for the given Γ, D₁ and |α|.
pub fn decoherence_time_predictors<R: Real>(
    cfg: &PhysicalConfig<R>,
    gamma: R,
    d1: R,
    alpha_abs: R,
    sphere_radius: Option<R>,
) -> Result<DecoherencePredictors<R>> {
    if !(gamma > R::zero() && d1 > R::zero() && alpha_abs > R::zero()) {
        return Err(invalid("predictors", "gamma, d1 and |alpha| must be > 0"));
    }
    let two = R::of(2.0);
    let (h, m, w0, c) = (cfg.hbar, cfg.mass, cfg.omega0, cfg.speed_of_light);
    let dq0 = (h / (two * m * w0)).sqrt();
    let dp0 = h / (two * dq0);
    let p0 = (two * m * h * w0).sqrt() * alpha_abs;
    let delta_p = two * p0;
    let delta_q = delta_p / (m * w0);
    let a2 = alpha_abs * alpha_abs;
    let tanh = if cfg.temperature > R::zero() {
        (h * w0 / (two * cfg.temperature)).tanh()
    } else {
        R::one()
    };
    let v = p0 / (m * c);
    let period = R::TAU() / w0;
    let from_damping = tanh / (R::of(4.0) * a2 * gamma);
    let thermal_wavelength = (cfg.temperature > R::zero()).then(|| {
        let lt = h / (two * m * cfg.temperature).sqrt();
        two * (lt / delta_q).powi(2) / gamma
    });
    let sphere = sphere_radius.map(|r| R::of(324.0) / (v * v) * (w0 * r / c).powi(-6) * period);
    let mut warnings = Vec::new();
    if w0 * from_damping < R::of(10.0) {
        let msg = format!(
            "ω₀·t_d = {} is not large; the oscillation average is unreliable",
            w0 * from_damping
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(DecoherencePredictors {
        delta_p,
        delta_q,
        from_diffusion: h * h / (two * p0 * p0 * d1),
        from_damping,
        momentum_distance: R::of(4.0) * (dp0 / delta_p).powi(2) / gamma,
        position_distance: R::of(4.0) * (dq0 / delta_q).powi(2) / gamma,
        thermal_wavelength,
        perfect_mirror: R::of(3.0) / (v * v) * period,
        sphere,
        warnings,
    })
}
