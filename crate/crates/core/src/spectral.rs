//! Vacuum and thermal spectral densities of the field momentum, and the
//! fluctuation-dissipation bridge between them.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_try, QuadEstimate, QuadOptions};
use crate::real::Real;

/// Mirror and reservoir parameters.
///
/// Internal units are ħ = M = ω₀ = 1; the fields are kept so that every
/// formula can be checked with the constants restored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real + Serialize + for<'a> Deserialize<'a>")]
#[serde(deny_unknown_fields)]
pub struct PhysicalConfig<R> {
    pub mass: R,
    pub omega0: R,
    /// Transparency frequency Ω.
    pub omega_cutoff: R,
    /// k_B T in energy units.
    pub temperature: R,
    #[serde(default = "one")]
    pub hbar: R,
    #[serde(default = "one")]
    pub speed_of_light: R,
}

fn one<R: Real>() -> R {
    R::one()
}

impl<R: Real> PhysicalConfig<R> {
    /// Config in internal units (ħ = M = ω₀ = c = 1).
    pub fn natural(omega_cutoff: R, temperature: R) -> Result<Self> {
        Self {
            mass: R::one(),
            omega0: R::one(),
            omega_cutoff,
            temperature,
            hbar: R::one(),
            speed_of_light: R::one(),
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let pos = |v: R, name: &'static str| {
            if v > R::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be positive and finite, got {v}")))
            }
        };
        pos(self.mass, "mass")?;
        pos(self.omega0, "omega0")?;
        pos(self.omega_cutoff, "omega_cutoff")?;
        pos(self.hbar, "hbar")?;
        pos(self.speed_of_light, "speed_of_light")?;
        if !(self.temperature >= R::zero()) || !self.temperature.is_finite() {
            return Err(invalid(
                "temperature",
                format!("must be >= 0, got {}", self.temperature),
            ));
        }
        Ok(self)
    }

    pub fn with_temperature(mut self, t: R) -> Self {
        self.temperature = t;
        self
    }

    pub fn is_vacuum(&self) -> bool {
        self.temperature == R::zero()
    }

    /// ħω₀/2T, or +∞ at T = 0.
    pub fn half_thermal_ratio(&self) -> R {
        if self.is_vacuum() {
            R::infinity()
        } else {
            self.hbar * self.omega0 / (R::of(2.0) * self.temperature)
        }
    }
}

/// R(ω) = −iΩ/(ω + iΩ).
pub fn reflection_amplitude<R: Real>(omega: R, omega_cutoff: R) -> Complex<R> {
    Complex::new(R::zero(), -omega_cutoff) / Complex::new(omega, omega_cutoff)
}

/// ζ(u) = ln(1+u²)/(2u) + arctan(u)/u² − 1/u for u > 0.
///
/// For u < 0.1 the closed form loses digits to cancellation, so the
/// alternating series Σ (−1)^{k+1} u^{2k−1}/(2k(2k+1)) is summed instead.
pub fn zeta<R: Real>(u: R) -> Result<R> {
    if !(u > R::zero()) {
        return Err(invalid("u", format!("zeta needs u > 0, got {u}")));
    }
    Ok(zeta_unchecked(u))
}

fn zeta_unchecked<R: Real>(u: R) -> R {
    let one = R::one();
    let two = R::of(2.0);
    if u < R::of(0.1) {
        let u2 = u * u;
        let mut pow = u;
        let mut sum = R::zero();
        let mut k = 1usize;
        loop {
            let kf = R::of_usize(2 * k);
            let term = pow / (kf * (kf + one));
            sum = if k % 2 == 1 { sum + term } else { sum - term };
            if term <= R::epsilon() * sum.abs() * R::of(0.01) || k > 40 {
                return sum;
            }
            pow = pow * u2;
            k += 1;
        }
    }
    let log_term = if u > one {
        two * u.ln() + (one / (u * u)).ln_1p()
    } else {
        (u * u).ln_1p()
    };
    log_term / (two * u) + u.atan() / (u * u) - one / u
}

/// Odd extension of ζ, with ζ(0) = 0.
pub fn zeta_odd<R: Real>(u: R) -> R {
    if u == R::zero() {
        R::zero()
    } else if u > R::zero() {
        zeta_unchecked(u)
    } else {
        -zeta_unchecked(-u)
    }
}

/// ξ⁰[ω] = (2/π)ħ²Ω ζ(ω/Ω), extended oddly to ω < 0.
pub fn xi_vacuum<R: Real>(omega: R, cfg: &PhysicalConfig<R>) -> R {
    R::of(2.0) * R::FRAC_1_PI() * cfg.hbar * cfg.hbar * cfg.omega_cutoff * zeta_odd(omega / cfg.omega_cutoff)
}

/// n_ω = 1/(e^{ħω/T} − 1), zero at T = 0.
pub fn thermal_photon_number<R: Real>(omega: R, temperature: R, hbar: R) -> R {
    if temperature == R::zero() {
        return R::zero();
    }
    R::one() / (hbar * omega / temperature).exp_m1()
}

/// x·n_x for x ≥ 0, with the limit T/ħ at x = 0.
pub(crate) fn x_times_n<R: Real>(x: R, temperature: R, hbar: R) -> R {
    if temperature == R::zero() {
        return R::zero();
    }
    let y = hbar * x / temperature;
    if y == R::zero() {
        temperature / hbar
    } else {
        x / y.exp_m1()
    }
}

/// G(ω, ω′) = |ω′−ω|(n_{|ω′−ω|} − ε(ω′−ω)n_{ω′}) for ω′ > 0.
pub fn g_kernel<R: Real>(omega: R, omega_p: R, cfg: &PhysicalConfig<R>) -> R {
    let (t, h) = (cfg.temperature, cfg.hbar);
    let d = omega_p - omega;
    x_times_n(d.abs(), t, h) - d * thermal_photon_number(omega_p, t, h)
}

/// ω′/(ω′²+Ω²)·[G(ω,ω′) − G(−ω,ω′)], written so that it stays finite at ω′ → 0.
fn xi_thermal_integrand<R: Real>(omega: R, omega_p: R, cfg: &PhysicalConfig<R>) -> R {
    let (t, h) = (cfg.temperature, cfg.hbar);
    let bracket = omega_p * (x_times_n((omega_p - omega).abs(), t, h) - x_times_n(omega_p + omega, t, h))
        + R::of(2.0) * omega * x_times_n(omega_p, t, h);
    bracket / (omega_p * omega_p + cfg.omega_cutoff * cfg.omega_cutoff)
}

/// Thermal part ξᵀ[ω] for ω > 0, by adaptive quadrature over ω′ split at
/// {ω, Ω, T/ħ} and truncated at ω + 40T/ħ. The returned error includes the
/// analytic bound on the discarded exponential tail.
pub fn xi_thermal<R: Real>(omega: R, cfg: &PhysicalConfig<R>, opts: &QuadOptions) -> Result<QuadEstimate<R>> {
    if !(omega > R::zero()) {
        return Err(invalid("omega", format!("xi_thermal needs omega > 0, got {omega}")));
    }
    if cfg.is_vacuum() {
        return Ok(QuadEstimate {
            value: R::zero(),
            error: R::zero(),
            evaluations: 0,
        });
    }
    let thermal_freq = cfg.temperature / cfg.hbar;
    let upper = omega + R::of(40.0) * thermal_freq;
    let pref = R::of(2.0) * cfg.hbar * cfg.hbar * cfg.omega_cutoff * cfg.omega_cutoff / (R::PI() * omega * omega);
    let tail = pref * R::of(3.1) * thermal_freq * R::of((-40.0f64).exp());
    let breaks = [omega, cfg.omega_cutoff, thermal_freq];
    let q = integrate_try(
        |wp| Ok(xi_thermal_integrand(omega, wp, cfg)),
        R::zero(),
        upper,
        &breaks,
        opts,
    )
    .map_err(|e| match e {
        Error::QuadratureNotConverged {
            estimate,
            error,
            requested,
        } => Error::QuadratureNotConverged {
            estimate: estimate * pref.f64(),
            error: error * pref.f64(),
            requested,
        },
        other => other,
    })?;
    Ok(QuadEstimate {
        value: q.value * pref,
        error: q.error * pref + tail,
        evaluations: q.evaluations,
    })
}

/// σ[ω] = ξ[ω]/tanh(ħω/2T); at T = 0, ξ[ω]·sign(ω).
pub fn sigma_from_fdt<R: Real>(omega: R, xi_value: R, temperature: R, hbar: R) -> R {
    if temperature == R::zero() {
        return xi_value * omega.signum();
    }
    xi_value / (hbar * omega / (R::of(2.0) * temperature)).tanh()
}

/// ξ[ω] = ξ⁰[ω] + ξᵀ[ω], odd in ω.
pub fn xi_total<R: Real>(omega: R, cfg: &PhysicalConfig<R>, opts: &QuadOptions) -> Result<QuadEstimate<R>> {
    if omega == R::zero() {
        return Ok(QuadEstimate {
            value: R::zero(),
            error: R::zero(),
            evaluations: 0,
        });
    }
    let s = omega.signum();
    let w = omega.abs();
    let th = xi_thermal(w, cfg, opts)?;
    Ok(QuadEstimate {
        value: s * (xi_vacuum(w, cfg) + th.value),
        error: th.error,
        evaluations: th.evaluations,
    })
}

/// Sampled ξ[ω], σ[ω] with tail metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "R: Serialize + for<'a> Deserialize<'a>")]
pub struct SpectralTable<R> {
    pub frequencies: Vec<R>,
    pub xi_values: Vec<R>,
    pub sigma_values: Vec<R>,
    pub temperature: R,
    /// Observed d ln ξ / d ln ω between the two highest samples.
    pub tail_exponent: Option<R>,
}

impl<R: Real> SpectralTable<R> {
    pub fn build(cfg: &PhysicalConfig<R>, frequencies: &[R], opts: &QuadOptions) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(invalid("frequencies", "empty frequency list"));
        }
        if frequencies[0] <= R::zero() || frequencies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("frequencies", "must be positive and strictly increasing"));
        }
        let xi: Vec<R> = frequencies
            .par_iter()
            .map(|&w| xi_total(w, cfg, opts).map(|q| q.value))
            .collect::<Result<_>>()?;
        let sigma = frequencies
            .iter()
            .zip(&xi)
            .map(|(&w, &x)| sigma_from_fdt(w, x, cfg.temperature, cfg.hbar))
            .collect();
        let n = frequencies.len();
        let tail_exponent = if n >= 2 && xi[n - 1] > R::zero() && xi[n - 2] > R::zero() {
            Some((xi[n - 1] / xi[n - 2]).ln() / (frequencies[n - 1] / frequencies[n - 2]).ln())
        } else {
            None
        };
        Ok(Self {
            frequencies: frequencies.to_vec(),
            xi_values: xi,
            sigma_values: sigma,
            temperature: cfg.temperature,
            tail_exponent,
        })
    }
}

/// Logarithmically spaced samples on [lo, hi].
pub fn log_space<R: Real>(lo: R, hi: R, n: usize) -> Vec<R> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * R::of_usize(i) / R::of_usize(n - 1)).exp())
        .collect()
}
