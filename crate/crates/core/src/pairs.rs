//! Photon-pair emission by a mirror in prescribed oscillation q̇(t) = q̇(0)cos ω₀t,
//! and the bookkeeping that links it to damping and to loss of coherence.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Checked, Result};
use crate::quadrature::{gauss_legendre, integrate, QuadOptions};

/// Two-photon density |⟨0|𝒫|ω₁,ω₂⟩|².
#[derive(Clone)]
pub enum PairDensity {
    /// (2ħ²/π²)·ω₁ω₂/(ω₁+ω₂)².
    PerfectMirror { hbar: f64 },
    /// User-supplied symmetric, non-negative density.
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for PairDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PerfectMirror { hbar } => write!(f, "PerfectMirror {{ hbar: {hbar} }}"),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl PairDensity {
    pub fn eval(&self, w1: f64, w2: f64) -> f64 {
        match self {
            Self::PerfectMirror { hbar } => pair_density_perfect(w1, w2, *hbar),
            Self::Custom(f) => f(w1, w2),
        }
    }

    /// ∫₀ˢ 𝒫(ω₁, s − ω₁) dω₁ (64-point Gauss–Legendre).
    pub fn line_integral(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let (x, w) = gauss_legendre::<f64>(64);
        let h = 0.5 * s;
        x.iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let w1 = h * (1.0 + xi);
                wi * self.eval(w1, s - w1)
            })
            .sum::<f64>()
            * h
    }
}

/// Perfect-mirror pair density (2ħ²/π²)·ω₁ω₂/(ω₁+ω₂)²; zero off the
/// positive quadrant.
pub fn pair_density_perfect(w1: f64, w2: f64, hbar: f64) -> f64 {
    if w1 <= 0.0 || w2 <= 0.0 {
        return 0.0;
    }
    let s = w1 + w2;
    2.0 * hbar * hbar / (std::f64::consts::PI * std::f64::consts::PI) * (w1 * w2) / (s * s)
}

/// sin²(νΔt/2)/ν², with its limit (Δt/2)² at ν = 0.
pub fn sinc2_weight(nu: f64, dt: f64) -> f64 {
    let y = 0.5 * nu * dt;
    if y.abs() < 1e-6 {
        0.25 * dt * dt * (1.0 - y * y / 3.0)
    } else {
        let s = y.sin();
        s * s / (nu * nu)
    }
}

/// |b(ω₁,ω₂;Δt)|² = 𝒫·q̇0²/ħ² · sin²[(ω₁+ω₂−ω₀)Δt/2]/(ω₁+ω₂−ω₀)².
pub fn pair_probability(w1: f64, w2: f64, dt: f64, qdot0: f64, omega0: f64, density: &PairDensity, hbar: f64) -> f64 {
    density.eval(w1, w2) * qdot0 * qdot0 / (hbar * hbar) * sinc2_weight(w1 + w2 - omega0, dt)
}

/// Inputs of a pair-emission run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairParams {
    pub omega0: f64,
    pub qdot0: f64,
    pub delta_t: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    /// Nodes per axis of the exported |b|² table.
    #[serde(default = "default_table")]
    pub table_points: usize,
}

fn one() -> f64 {
    1.0
}

fn default_table() -> usize {
    101
}

impl PairParams {
    pub fn natural(qdot0: f64, delta_t: f64) -> Self {
        Self {
            omega0: 1.0,
            qdot0,
            delta_t,
            mass: 1.0,
            hbar: 1.0,
            table_points: default_table(),
        }
    }
}

/// Results of [`pair_run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRun {
    pub params: PairParams,
    /// ∬|b|² over the truncated domain and its error estimate
    /// (quadrature plus truncation).
    pub total_probability: f64,
    pub total_probability_error: f64,
    /// ∬|b|² restricted to |ω₁+ω₂−ω₀| < 2π/Δt.
    pub main_lobe_probability: f64,
    /// ½∬|b|²ħ(ω₁+ω₂) and its error estimate.
    pub radiated_energy: f64,
    pub radiated_energy_error: f64,
    /// Upper limit of ω₁+ω₂ used: ω₀ + 60π/Δt.
    pub sum_cutoff: f64,
    /// Frequencies of the exported table and |b|² at (ω₁ᵢ, ω₂ⱼ), row-major.
    pub table_frequencies: Vec<f64>,
    pub table: Vec<f64>,
}

/// Integrate |b|² over the quadrant in (s = ω₁+ω₂, ω₁) coordinates:
/// the line integral in ω₁ is smooth, the s integral carries the sinc²
/// and is split at its zeros.
pub fn pair_run(params: &PairParams, density: &PairDensity) -> Result<PairRun> {
    let p = *params;
    if !(p.omega0 > 0.0 && p.mass > 0.0 && p.hbar > 0.0) || !(p.delta_t >= 0.0) || !p.qdot0.is_finite() {
        return Err(invalid(
            "pairs",
            "need omega0, mass, hbar > 0, delta_t >= 0, finite qdot0",
        ));
    }
    let scale = p.qdot0 * p.qdot0 / (p.hbar * p.hbar);
    let nodes = if p.delta_t > 0.0 {
        2.0 * std::f64::consts::PI / p.delta_t
    } else {
        p.omega0
    };
    let s_max = p.omega0 + 30.0 * nodes;
    let (mut total, mut total_err, mut lobe, mut energy, mut energy_err) = (0.0, 0.0, 0.0, 0.0, 0.0);
    if p.delta_t > 0.0 && scale > 0.0 {
        let mut breaks = Vec::new();
        let mut k = -((p.omega0 / nodes).floor());
        while p.omega0 + k * nodes < s_max {
            breaks.push(p.omega0 + k * nodes);
            k += 1.0;
        }
        let opts = QuadOptions {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 20_000,
        };
        let integrand = |s: f64| density.line_integral(s) * sinc2_weight(s - p.omega0, p.delta_t);
        let t = integrate(integrand, 0.0, s_max, &breaks, &opts)?;
        let e = integrate(|s| s * integrand(s), 0.0, s_max, &breaks, &opts)?;
        let ml = integrate(
            integrand,
            (p.omega0 - nodes).max(0.0),
            p.omega0 + nodes,
            &[p.omega0],
            &opts,
        )?;
        // sinc² envelope beyond s_max (mean of sin² is ½) with the line
        // integral frozen at its edge value; added, and kept as the error
        let tail = density.line_integral(s_max) / (2.0 * (s_max - p.omega0));
        total = scale * (t.value + tail);
        total_err = scale * (t.error + tail);
        lobe = scale * ml.value;
        energy = 0.5 * p.hbar * scale * (e.value + s_max * tail);
        energy_err = 0.5 * p.hbar * scale * (e.error + s_max * tail);
    }
    let n = p.table_points.max(2);
    let table_frequencies: Vec<f64> = (0..n).map(|i| s_max * i as f64 / (n - 1) as f64).collect();
    let mut table = Vec::with_capacity(n * n);
    for &w1 in &table_frequencies {
        for &w2 in &table_frequencies {
            table.push(pair_probability(w1, w2, p.delta_t, p.qdot0, p.omega0, density, p.hbar));
        }
    }
    Ok(PairRun {
        params: p,
        total_probability: total,
        total_probability_error: total_err,
        main_lobe_probability: lobe,
        radiated_energy: energy,
        radiated_energy_error: energy_err,
        sum_cutoff: s_max,
        table_frequencies,
        table,
    })
}

/// |B|² = 1 − ½∬|b|²; flagged when the pair probability exceeds 2.
pub fn vacuum_persistence(run: &PairRun) -> Checked<f64> {
    let b = 1.0 - 0.5 * run.total_probability;
    Checked::ok(b.clamp(0.0, 1.0)).warn_if(b < 0.0, || {
        format!(
            "pair probability {} exceeds 2; outside the perturbative regime",
            run.total_probability
        )
    })
}

/// Γ = ΔE/(M q̇0² Δt); needs ω₀Δt ≥ 200.
pub fn gamma_from_pairs(run: &PairRun) -> Result<f64> {
    let p = &run.params;
    regime_guard(p)?;
    if p.qdot0 == 0.0 {
        return Err(invalid("qdot0", "Γ from pairs needs a moving mirror"));
    }
    Ok(run.radiated_energy / (p.mass * p.qdot0 * p.qdot0 * p.delta_t))
}

/// (π/4)(ω₀/Mħ)∫₀^ω₀ 𝒫(ω₁, ω₀−ω₁) dω₁.
pub fn gamma_line_integral(density: &PairDensity, omega0: f64, mass: f64, hbar: f64) -> f64 {
    std::f64::consts::FRAC_PI_4 * omega0 / (mass * hbar) * density.line_integral(omega0)
}

/// Decay rate of the interference term, ∬|b|²/Δt: the even and odd
/// branches carry opposite signs of ρ_int, so it drops by
/// |B|² − ½∬|b|² = 1 − ∬|b|².
pub fn interference_decay(run: &PairRun) -> Result<f64> {
    regime_guard(&run.params)?;
    Ok(run.total_probability / run.params.delta_t)
}

fn regime_guard(p: &PairParams) -> Result<()> {
    if p.omega0 * p.delta_t < 200.0 {
        return Err(invalid(
            "delta_t",
            format!(
                "ω₀Δt = {} is below 200; the resonance is not sharp",
                p.omega0 * p.delta_t
            ),
        ));
    }
    Ok(())
}

/// Weights of the entangled state: vacuum branch with the even cat and
/// two-photon branch with the odd cat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntangledSummary {
    pub even_vacuum_weight: f64,
    pub odd_pair_weight: f64,
    pub total: f64,
}

pub fn entangled_state_summary(run: &PairRun) -> EntangledSummary {
    let even = vacuum_persistence(run).value;
    let odd = 0.5 * run.total_probability;
    EntangledSummary {
        even_vacuum_weight: even,
        odd_pair_weight: odd,
        total: even + odd,
    }
}
