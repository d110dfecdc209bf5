//! High-temperature damping: Doppler picture of the reflected thermal
//! photons, plate geometry and SI-unit decoherence times.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Checked, Result};
use crate::quadrature::{integrate_to_infinity_try, integrate_try, QuadOptions};
use crate::spectral::PhysicalConfig;

/// CODATA 2018 exact values.
pub mod si {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const C: f64 = 299_792_458.0;
    pub const K_B: f64 = 1.380_649e-23;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MirrorGeometry {
    /// Mirror on a line (1+1 dimensions).
    Line,
    /// Flat plate of area `area`, perfectly reflecting in the thermal band.
    Plate {
        area: f64,
    },
    Sphere {
        radius: f64,
    },
}

impl MirrorGeometry {
    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Plate { area } if !(area > 0.0) => Err(invalid("area", "must be > 0")),
            Self::Sphere { radius } if !(radius > 0.0) => Err(invalid("radius", "must be > 0")),
            g => Ok(g),
        }
    }
}

/// Power reflected by the mirror, ΔE/Δt.
///
/// Line: (1/π)∫|R(ω)|² n_ω ħω dω. Plate: (ħA/π²c²)∫ω³ n_ω dω = (π²/15)AT⁴/(ħ³c²).
pub fn reflected_power(cfg: &PhysicalConfig<f64>, geometry: MirrorGeometry, opts: &QuadOptions) -> Result<f64> {
    let g = geometry.validated()?;
    let (h, t) = (cfg.hbar, cfg.temperature);
    if t <= 0.0 {
        return Ok(0.0);
    }
    match g {
        MirrorGeometry::Line => {
            let om = cfg.omega_cutoff;
            let scale = t / h;
            // in x = ħω/T: (T²/πħ)∫ x/(eˣ−1)·|R|² dx
            let f = |x: f64| -> Result<f64> {
                let w = x * scale;
                let refl = if om.is_infinite() {
                    1.0
                } else {
                    om * om / (w * w + om * om)
                };
                Ok(if x == 0.0 { refl } else { x / x.exp_m1() * refl })
            };
            let knee = (om / scale).min(1e6);
            let head = integrate_try(f, 0.0, 50.0_f64.max(2.0 * knee.min(50.0)), &[knee.min(50.0)], opts)?;
            let tail = integrate_to_infinity_try(f, 50.0_f64.max(2.0 * knee.min(50.0)), opts)?;
            Ok(t * t / (std::f64::consts::PI * h) * (head.value + tail.value))
        }
        MirrorGeometry::Plate { area } => {
            let c2 = cfg.speed_of_light * cfg.speed_of_light;
            Ok(std::f64::consts::PI.powi(2) / 15.0 * area * t.powi(4) / (h.powi(3) * c2))
        }
        MirrorGeometry::Sphere { .. } => Err(crate::Error::Unsupported(
            "thermal reflected power for a sphere is not modelled".into(),
        )),
    }
}

/// F = −2(ΔE/Δt)q̇/c².
pub fn doppler_friction(
    cfg: &PhysicalConfig<f64>,
    geometry: MirrorGeometry,
    qdot: f64,
    opts: &QuadOptions,
) -> Result<Checked<f64>> {
    let p = reflected_power(cfg, geometry, opts)?;
    let beta = qdot.abs() / cfg.speed_of_light;
    Ok(Checked::ok(-2.0 * p * qdot / (cfg.speed_of_light * cfg.speed_of_light))
        .warn_if(beta > 0.01, || format!("q̇/c = {beta} is not small")))
}

/// Damping implied by the Doppler force, Γ = (ΔE/Δt)/(Mc²).
pub fn gamma_doppler(cfg: &PhysicalConfig<f64>, geometry: MirrorGeometry, opts: &QuadOptions) -> Result<f64> {
    Ok(reflected_power(cfg, geometry, opts)? / (cfg.mass * cfg.speed_of_light * cfg.speed_of_light))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalRegime {
    /// T ≫ ħΩ
    AboveCutoff,
    /// ħω₀ ≪ T ≪ ħΩ
    BelowCutoff,
}

/// Closed-form line-mirror damping: ΩT/2M or πT²/(3Mħ). Warns when the
/// configuration is not deep in the requested regime (factor 10).
pub fn gamma_thermal_exact(cfg: &PhysicalConfig<f64>, regime: ThermalRegime) -> Checked<f64> {
    let (t, h) = (cfg.temperature, cfg.hbar);
    let (value, ok) = match regime {
        ThermalRegime::AboveCutoff => (cfg.omega_cutoff * t / (2.0 * cfg.mass), t > 10.0 * h * cfg.omega_cutoff),
        ThermalRegime::BelowCutoff => (
            std::f64::consts::PI * t * t / (3.0 * cfg.mass * h),
            t > 10.0 * h * cfg.omega0 && 10.0 * t < h * cfg.omega_cutoff,
        ),
    };
    Checked::ok(value).warn_if(!ok, || format!("configuration is outside the {regime:?} regime"))
}

/// Thermal photon wavelength λ_th = 2πħc/(k_B T) in metres.
pub fn thermal_photon_wavelength(t_kelvin: f64) -> f64 {
    2.0 * std::f64::consts::PI * si::HBAR * si::C / (si::K_B * t_kelvin)
}

/// de Broglie wavelength λ_T = ħ/√(2M k_B T) in metres.
pub fn thermal_de_broglie_wavelength(mass_kg: f64, t_kelvin: f64) -> f64 {
    si::HBAR / (2.0 * mass_kg * si::K_B * t_kelvin).sqrt()
}

/// Plate damping in SI: π²A(k_BT)⁴/(15ħ³c⁴M), in 1/s.
pub fn plate_gamma_si(t_kelvin: f64, area_m2: f64, mass_kg: f64) -> f64 {
    let kt = si::K_B * t_kelvin;
    std::f64::consts::PI.powi(2) * area_m2 * kt.powi(4) / (15.0 * si::HBAR.powi(3) * si::C.powi(4) * mass_kg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiReport {
    pub temperature_k: f64,
    pub area_m2: f64,
    pub lambda_th_m: f64,
    /// t_d·ΔQ² = (15/32π⁷)λ_th⁵/(cA), in s·m².
    pub td_coeff_s_m2: f64,
    pub delta_q_m: Option<f64>,
    pub t_d_s: Option<f64>,
    pub mass_kg: Option<f64>,
    pub gamma_per_s: Option<f64>,
    /// λ_th < √A.
    pub diffraction_negligible: bool,
    /// ω₀t_d > 10, when ω₀ and ΔQ are given.
    pub slow_decoherence: Option<bool>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateOptions {
    pub delta_q_m: Option<f64>,
    pub mass_kg: Option<f64>,
    pub omega0_per_s: Option<f64>,
}

/// Decoherence time of a plate of area A at temperature T (SI units).
pub fn plate_decoherence_time(t_kelvin: f64, area_m2: f64, extra: &PlateOptions) -> Result<SiReport> {
    if !(t_kelvin > 0.0 && area_m2 > 0.0) {
        return Err(invalid("plate", "temperature and area must be > 0"));
    }
    let lam = thermal_photon_wavelength(t_kelvin);
    let coeff = 15.0 / (32.0 * std::f64::consts::PI.powi(7)) * lam.powi(5) / (si::C * area_m2);
    let t_d = extra.delta_q_m.map(|dq| coeff / (dq * dq));
    let diffraction_negligible = lam < area_m2.sqrt();
    let slow = match (extra.omega0_per_s, t_d) {
        (Some(w), Some(td)) => Some(w * td > 10.0),
        _ => None,
    };
    let mut warnings = Vec::new();
    if !diffraction_negligible {
        warnings.push(format!("λ_th = {lam:e} m is not small against √A; diffraction ignored"));
    }
    if slow == Some(false) {
        warnings.push("ω₀t_d is not large; the damping/decoherence relation does not apply".into());
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(SiReport {
        temperature_k: t_kelvin,
        area_m2,
        lambda_th_m: lam,
        td_coeff_s_m2: coeff,
        delta_q_m: extra.delta_q_m,
        t_d_s: t_d,
        mass_kg: extra.mass_kg,
        gamma_per_s: extra.mass_kg.map(|m| plate_gamma_si(t_kelvin, area_m2, m)),
        diffraction_negligible,
        slow_decoherence: slow,
        warnings,
    })
}

/// Scales of the internal units M = ω₀ = c = 1 for a given SI mass and
/// frequency: time 1/ω₀, length c/ω₀, energy Mc².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalScales {
    pub mass_kg: f64,
    pub omega0_per_s: f64,
}

impl NaturalScales {
    pub fn time_s(&self) -> f64 {
        1.0 / self.omega0_per_s
    }
    pub fn length_m(&self) -> f64 {
        si::C / self.omega0_per_s
    }
    pub fn energy_j(&self) -> f64 {
        self.mass_kg * si::C * si::C
    }
    /// ħ in internal units, ħω₀/(Mc²).
    pub fn hbar(&self) -> f64 {
        si::HBAR / (self.energy_j() * self.time_s())
    }
    /// Internal config with k_BT converted to energy units.
    pub fn config(&self, t_kelvin: f64, omega_cutoff_per_s: f64) -> Result<PhysicalConfig<f64>> {
        PhysicalConfig {
            mass: 1.0,
            omega0: 1.0,
            omega_cutoff: omega_cutoff_per_s * self.time_s(),
            temperature: si::K_B * t_kelvin / self.energy_j(),
            hbar: self.hbar(),
            speed_of_light: 1.0,
        }
        .validated()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn natural(om: f64, t: f64) -> PhysicalConfig<f64> {
        PhysicalConfig::natural(om, t).unwrap()
    }

    #[test]
    fn reflected_power_examples() {
        let o = QuadOptions::with_rel_tol(1e-12);
        let plate = MirrorGeometry::Plate { area: 1.0 };
        assert!((reflected_power(&natural(1e3, 1.0), plate, &o).unwrap() - 0.657974).abs() < 1e-6);
        let p1 = reflected_power(&natural(1e3, 1.0), plate, &o).unwrap();
        let p10 = reflected_power(&natural(1e3, 10.0), plate, &o).unwrap();
        assert!((p10 / p1 / 1e4 - 1.0).abs() < 1e-6);
        assert_eq!(
            reflected_power(&natural(1e3, 0.0), MirrorGeometry::Line, &o).unwrap(),
            0.0
        );
        // perfect line mirror: (ħ/π)(T/ħ)²π²/6
        let cfg = natural(1e12, 2.0);
        let line = reflected_power(&cfg, MirrorGeometry::Line, &o).unwrap();
        assert!((line / (PI * 4.0 / 6.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn doppler_is_half_the_exact_rate() {
        let o = QuadOptions::with_rel_tol(1e-12);
        let cfg = natural(1e6, 100.0);
        let d = gamma_doppler(&cfg, MirrorGeometry::Line, &o).unwrap();
        let e = gamma_thermal_exact(&cfg, ThermalRegime::BelowCutoff);
        assert!(e.warnings.is_empty());
        assert!((d / e.value - 0.5).abs() < 1e-3);
        assert_eq!(
            doppler_friction(&cfg, MirrorGeometry::Line, 0.0, &o).unwrap().value,
            0.0
        );
        let f = doppler_friction(&cfg, MirrorGeometry::Line, 1e-3, &o).unwrap().value;
        assert!((f + 2.0 * d * 1e-3).abs() < 1e-15 * d);
        let hot = natural(1.0, 100.0);
        assert!((gamma_thermal_exact(&hot, ThermalRegime::AboveCutoff).value - 50.0).abs() < 1e-12);
        assert_eq!(gamma_thermal_exact(&hot, ThermalRegime::BelowCutoff).warnings.len(), 1);
    }

    #[test]
    fn si_numbers() {
        let r = plate_decoherence_time(50.0, 1e-6, &PlateOptions::default()).unwrap();
        assert!((r.lambda_th_m / 2.9e-4 - 1.0).abs() < 0.02);
        assert!((r.td_coeff_s_m2 / 1.0e-24 - 1.0).abs() < 0.05);
        assert!(r.diffraction_negligible);
        let hot = plate_decoherence_time(300.0, 1e-6, &PlateOptions::default()).unwrap();
        assert!((r.td_coeff_s_m2 / hot.td_coeff_s_m2 / 7776.0 - 1.0).abs() < 1e-12);
        let tiny = plate_decoherence_time(50.0, 1e-8 * 0.5, &PlateOptions::default()).unwrap();
        assert!(!tiny.diffraction_negligible && tiny.warnings.len() == 1);
    }

    #[test]
    fn restemp_is_res3_with_plate_damping() {
        let (t, a, m, dq) = (50.0, 1e-6, 1e-3, 1e-9);
        let r = plate_decoherence_time(
            t,
            a,
            &PlateOptions {
                delta_q_m: Some(dq),
                mass_kg: Some(m),
                omega0_per_s: None,
            },
        )
        .unwrap();
        let g = r.gamma_per_s.unwrap();
        let lt = thermal_de_broglie_wavelength(m, t);
        let res3 = 2.0 * (lt / dq).powi(2) / g;
        assert!((r.t_d_s.unwrap() / res3 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn internal_units_round_trip() {
        let sc = NaturalScales {
            mass_kg: 1e-3,
            omega0_per_s: 1e3,
        };
        let (t, a) = (50.0, 1e-6);
        let cfg = sc.config(t, 1e20).unwrap();
        let area = a / sc.length_m().powi(2);
        let g_int = gamma_doppler(&cfg, MirrorGeometry::Plate { area }, &QuadOptions::default()).unwrap();
        let g_si = g_int / sc.time_s();
        assert!((g_si / plate_gamma_si(t, a, 1e-3) - 1.0).abs() < 1e-12);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn stefan_scaling(t in 0.5f64..5.0, k in 1.5f64..10.0) {
            let o = QuadOptions::with_rel_tol(1e-12);
            let plate = MirrorGeometry::Plate { area: 1.0 };
            let a = reflected_power(&natural(1e3, t), plate, &o).unwrap();
            let b = reflected_power(&natural(1e3, k * t), plate, &o).unwrap();
            proptest::prop_assert!((b / a / k.powi(4) - 1.0).abs() < 1e-6);
        }

        #[test]
        fn photon_wavelength_is_exact(t in 1e-3f64..1e4) {
            let exact = 2.0 * PI * si::HBAR * si::C / (si::K_B * t);
            proptest::prop_assert!((thermal_photon_wavelength(t) / exact - 1.0).abs() < 1e-15);
        }
    }
}
