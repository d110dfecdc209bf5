//! Linear entropy and the predictability sieve over pure Gaussian states.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Checked, Error, Result};
use crate::optimize::brent_minimize;
use crate::phasespace::{gaussian_moment_evolution, CoefficientSchedule, Coefficients, GaussianState, WignerGrid};
use crate::real::Real;
use crate::spectral::PhysicalConfig;

/// s = 1 − 2πħ∬W² dx dp. Purity above one by more than 1e-6 is flagged;
/// the result is clamped at zero.
pub fn linear_entropy_grid<R: Real>(w: &WignerGrid<R>, hbar: R) -> Checked<R> {
    let purity = R::TAU() * hbar * w.square_integral();
    let s = R::one() - purity;
    Checked::ok(s.max(R::zero())).warn_if(s < -R::of(1e-6), || {
        format!("grid purity {purity} exceeds one; entropy clamped to 0")
    })
}

/// s = 1 − ħ/(2√(var_q·var_p − C²)).
pub fn linear_entropy_gaussian<R: Real>(state: &GaussianState<R>, hbar: R) -> Result<R> {
    let det = state.determinant();
    if !(det > R::zero()) {
        return Err(invalid("state", "covariance must be positive definite"));
    }
    Ok(R::one() - hbar / (R::of(2.0) * det.sqrt()))
}

/// ṡ = 2Γ(s − 1) + 4D₁Δp²/ħ² + 2D₂σ_{q,p}/ħ², with σ_{q,p} = 2C.
/// Warns for s > 0.1, where the near-pure expansion breaks down.
pub fn entropy_rate<R: Real>(state: &GaussianState<R>, c: &Coefficients<R>, s_now: R, hbar: R) -> Checked<R> {
    let h2 = hbar * hbar;
    let rate = R::of(2.0) * c.gamma * (s_now - R::one())
        + R::of(4.0) * c.d1 * state.var_p / h2
        + R::of(2.0) * c.d2 * state.sigma_qp() / h2;
    Checked::ok(rate).warn_if(s_now > R::of(0.1), || {
        format!("entropy {s_now} is not small; rate formula assumes a nearly pure state")
    })
}

/// s(τ) = 2τ(D₁/ħ²)[Δp² + (Mω₀)²Δq² − Mħω₀] from the initial dispersions.
/// Warns when τ spans fewer than five periods.
pub fn entropy_after_period<R: Real>(initial: &GaussianState<R>, cfg: &PhysicalConfig<R>, d1: R, tau: R) -> Checked<R> {
    let mw = cfg.mass * cfg.omega0;
    let bracket = initial.var_p + mw * mw * initial.var_q - mw * cfg.hbar;
    let s = R::of(2.0) * tau * d1 / (cfg.hbar * cfg.hbar) * bracket;
    let periods = tau * cfg.omega0 / R::TAU();
    Checked::ok(s).warn_if(periods < R::of(5.0), || {
        format!("tau covers {periods} periods; the oscillation average needs many")
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SieveObjective {
    /// The averaged bracket formula for s(τ).
    PeriodFormula,
    /// Entropy of the moment-equation solution at τ.
    MomentEquations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveOptions {
    pub objective: SieveObjective,
    /// τ in oscillation periods.
    #[serde(default = "default_periods")]
    pub periods: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_n_r")]
    pub n_r: usize,
    #[serde(default = "default_n_phi")]
    pub n_phi: usize,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
}

fn default_periods() -> f64 {
    20.0
}
fn default_r_max() -> f64 {
    2.0
}
fn default_n_r() -> usize {
    41
}
fn default_n_phi() -> usize {
    8
}
fn default_tol() -> f64 {
    1e-9
}

impl Default for SieveOptions {
    fn default() -> Self {
        Self {
            objective: SieveObjective::PeriodFormula,
            periods: default_periods(),
            r_max: default_r_max(),
            n_r: default_n_r(),
            n_phi: default_n_phi(),
            tolerance: default_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SieveSample {
    pub r: f64,
    pub phi: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveResult {
    pub r: f64,
    pub phi: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub cov_qp: f64,
    pub entropy_at_optimum: f64,
    pub scan: Vec<SieveSample>,
}

/// Search pure squeezed states (r, φ) for the smallest entropy after τ.
/// The coarse scan is refined by Brent minimization in r and then φ.
pub fn sieve_minimize(
    cfg: &PhysicalConfig<f64>,
    coeffs: &Coefficients<f64>,
    opts: &SieveOptions,
) -> Result<SieveResult> {
    if opts.n_r < 3 || opts.n_phi < 1 || !(opts.r_max > 0.0) || !(opts.periods > 0.0) {
        return Err(invalid("sieve", "need n_r >= 3, n_phi >= 1, r_max > 0, periods > 0"));
    }
    let tau = opts.periods * std::f64::consts::TAU / cfg.omega0;
    let sched = CoefficientSchedule::Constant(*coeffs);
    let objective = |r: f64, phi: f64| -> Result<f64> {
        let s0 = GaussianState::squeezed(cfg, 0.0, 0.0, r, phi);
        match opts.objective {
            SieveObjective::PeriodFormula => Ok(entropy_after_period(&s0, cfg, coeffs.d1, tau).value),
            SieveObjective::MomentEquations => {
                let s1 = gaussian_moment_evolution(&s0, &sched, cfg, tau)?;
                linear_entropy_gaussian(&s1, cfg.hbar)
            }
        }
    };
    let grid: Vec<(f64, f64)> = (0..opts.n_r)
        .flat_map(|i| {
            let r = -opts.r_max + 2.0 * opts.r_max * i as f64 / (opts.n_r - 1) as f64;
            (0..opts.n_phi).map(move |k| (r, std::f64::consts::PI * k as f64 / opts.n_phi as f64))
        })
        .collect();
    let scan: Vec<SieveSample> = grid
        .par_iter()
        .map(|&(r, phi)| objective(r, phi).map(|entropy| SieveSample { r, phi, entropy }))
        .collect::<Result<_>>()?;
    let best = scan
        .iter()
        .min_by(|a, b| a.entropy.total_cmp(&b.entropy))
        .copied()
        .ok_or_else(|| Error::OptimizerNotConverged("empty scan".into()))?;
    let dr = 2.0 * opts.r_max / (opts.n_r - 1) as f64;
    let mut phi = best.phi;
    let mut last: Option<Result<f64>> = None;
    let mut f_r = |r: f64| match objective(r, phi) {
        Ok(v) => v,
        Err(e) => {
            last = Some(Err(e));
            f64::INFINITY
        }
    };
    let mr = brent_minimize(&mut f_r, best.r - dr, best.r + dr, opts.tolerance, 500)?;
    if let Some(Err(e)) = last {
        return Err(e);
    }
    let r = mr.x;
    let mut value = mr.value;
    if opts.objective == SieveObjective::MomentEquations && opts.n_phi > 1 {
        let dphi = std::f64::consts::PI / opts.n_phi as f64;
        let mp = brent_minimize(
            |p| objective(r, p).unwrap_or(f64::INFINITY),
            phi - dphi,
            phi + dphi,
            opts.tolerance,
            500,
        )?;
        if mp.value < value {
            phi = mp.x;
            value = mp.value;
        }
    }
    let st = GaussianState::squeezed(cfg, 0.0, 0.0, r, phi);
    Ok(SieveResult {
        r,
        phi,
        var_q: st.var_q,
        var_p: st.var_p,
        cov_qp: st.cov_qp,
        entropy_at_optimum: value,
        scan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::GridSpec;

    fn cfg() -> PhysicalConfig<f64> {
        PhysicalConfig::natural(1.0, 0.0).unwrap()
    }

    fn gaussian_grid(s: &GaussianState<f64>, spec: GridSpec<f64>) -> WignerGrid<f64> {
        let det = s.determinant();
        WignerGrid::from_fn(spec, |x, p| {
            let (x, p) = (x - s.mean_q, p - s.mean_p);
            let q = (s.var_p * x * x - 2.0 * s.cov_qp * x * p + s.var_q * p * p) / det;
            (-0.5 * q).exp() / (std::f64::consts::TAU * det.sqrt())
        })
    }

    #[test]
    fn entropy_examples() {
        let c = cfg();
        let g = GaussianState::coherent(&c, 0.0, 0.0);
        assert!(linear_entropy_gaussian(&g, 1.0).unwrap().abs() < 1e-15);
        let spec = GridSpec::new(128, 128, 8.0, 8.0).unwrap();
        assert!(linear_entropy_grid(&gaussian_grid(&g, spec), 1.0).value.abs() < 1e-6);
        let wide = GaussianState {
            mean_q: 0.0f64,
            mean_p: 0.0,
            var_q: 1.0,
            var_p: 1.0,
            cov_qp: 0.0,
        };
        assert!((linear_entropy_gaussian(&wide, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let gw = gaussian_grid(&wide, spec);
        assert!((linear_entropy_grid(&gw, 1.0).value - 0.5).abs() < 1e-4);
        // two distant coherent states mixed 50/50
        let a = GaussianState::coherent(&c, 0.0, 4.0);
        let b = GaussianState::coherent(&c, 0.0, -4.0);
        let (ga, gb) = (gaussian_grid(&a, spec), gaussian_grid(&b, spec));
        let mix = WignerGrid {
            spec,
            values: ga.values.iter().zip(&gb.values).map(|(x, y)| 0.5 * (x + y)).collect(),
        };
        assert!((linear_entropy_grid(&mix, 1.0).value - 0.5).abs() < 1e-6);
    }

    #[test]
    fn grid_purity_above_one_is_flagged() {
        let spec = GridSpec::new(16, 16, 4.0, 4.0).unwrap();
        let spike = WignerGrid::from_fn(spec, |x, p| if x == 0.0 && p == 0.0 { 2.0 } else { 0.0 });
        let s = linear_entropy_grid(&spike, 1.0);
        assert_eq!(s.value, 0.0);
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn rate_examples() {
        let c = cfg();
        let g = GaussianState::coherent(&c, 0.0, 0.0);
        let d = Coefficients {
            gamma: 0.0,
            d1: 0.01,
            d2: 0.0,
            delta_m: 0.0,
        };
        assert!((entropy_rate(&g, &d, 0.0, 1.0).value - 2.0 * 0.01).abs() < 1e-15);
        let d = Coefficients {
            gamma: 0.01,
            d1: 0.0,
            d2: 0.0,
            delta_m: 0.0,
        };
        assert!((entropy_rate(&g, &d, 0.0, 1.0).value + 0.02).abs() < 1e-15);
        assert_eq!(entropy_rate(&g, &Coefficients::default(), 0.0, 1.0).value, 0.0);
        assert_eq!(entropy_rate(&g, &Coefficients::default(), 0.2, 1.0).warnings.len(), 1);
    }

    #[test]
    fn period_formula_examples() {
        let c = cfg();
        let tau = 10.0 * std::f64::consts::TAU;
        let coh = GaussianState::coherent(&c, 1.0, 2.0);
        assert_eq!(entropy_after_period(&coh, &c, 1e-3, tau).value, 0.0);
        let sq = GaussianState::squeezed(&c, 0.0, 0.0, 1.0, 0.0);
        let s = entropy_after_period(&sq, &c, 1e-3, tau).value;
        assert!((s / (2.0 * tau * 1e-3) - 2.76220).abs() < 1e-5);
        let sm = entropy_after_period(&GaussianState::squeezed(&c, 0.0, 0.0, -1.0, 0.0), &c, 1e-3, tau).value;
        assert!((s - sm).abs() < 1e-15);
        assert_eq!(
            entropy_after_period(&sq, &c, 1e-3, 2.0 * std::f64::consts::TAU)
                .warnings
                .len(),
            1
        );
    }

    #[test]
    fn sieve_selects_coherent_states() {
        let c = cfg();
        let d = Coefficients {
            gamma: 1e-3,
            d1: 1e-3,
            d2: 0.0,
            delta_m: 0.0,
        };
        let res = sieve_minimize(&c, &d, &SieveOptions::default()).unwrap();
        assert!(res.r.abs() < 1e-4);
        assert!(res.entropy_at_optimum.abs() < 1e-10);
        assert!((res.var_q * res.var_p - 0.25).abs() < 1e-8);
        assert!(res.cov_qp.abs() < 1e-8);
        let ends: Vec<_> = res.scan.iter().filter(|s| (s.r.abs() - 1.0).abs() < 1e-12).collect();
        assert!(ends.len() >= 2);
        let centre = res.scan.iter().find(|s| s.r.abs() < 1e-12).unwrap().entropy;
        for e in &ends {
            assert!((e.entropy - ends[0].entropy).abs() < 1e-12 && e.entropy > centre);
        }
        let ode = SieveOptions {
            objective: SieveObjective::MomentEquations,
            n_r: 21,
            n_phi: 4,
            ..Default::default()
        };
        let r2 = sieve_minimize(&c, &d, &ode).unwrap();
        assert!(r2.r.abs() < 0.05);
    }
}
