use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientTrace;
use crate::error::{invalid, Result};
use crate::real::Real;
use crate::spectral::PhysicalConfig;

/// First moments and covariance of a phase-space distribution.
///
/// `cov_qp` is the Wigner covariance C = ⟨qp⟩_W − ⟨q⟩⟨p⟩; the symmetrized
/// σ_{q,p} = ⟨{q,p}⟩ − 2⟨q⟩⟨p⟩ equals 2C and is available as [`Self::sigma_qp`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState<R> {
    pub mean_q: R,
    pub mean_p: R,
    pub var_q: R,
    pub var_p: R,
    pub cov_qp: R,
}

impl<R: Real> GaussianState<R> {
    pub fn coherent(cfg: &PhysicalConfig<R>, mean_q: R, mean_p: R) -> Self {
        Self::squeezed(cfg, mean_q, mean_p, R::zero(), R::zero())
    }

    /// Pure squeezed state: var_q = Δq₀²e^{−2r}, var_p = Δp₀²e^{2r} for
    /// φ = 0, rotated by φ in ground-state units.
    pub fn squeezed(cfg: &PhysicalConfig<R>, mean_q: R, mean_p: R, r: R, phi: R) -> Self {
        let two = R::of(2.0);
        let dq2 = cfg.hbar / (two * cfg.mass * cfg.omega0);
        let dp2 = cfg.hbar * cfg.mass * cfg.omega0 / two;
        // in scaled units u = q/Δq₀, v = p/Δp₀ the covariance is
        // R(φ) diag(e^{−2r}, e^{2r}) R(φ)ᵀ
        let (a, b) = ((-two * r).exp(), (two * r).exp());
        let (c, s) = (phi.cos(), phi.sin());
        let uu = a * c * c + b * s * s;
        let vv = a * s * s + b * c * c;
        let uv = (a - b) * c * s;
        Self {
            mean_q,
            mean_p,
            var_q: uu * dq2,
            var_p: vv * dp2,
            cov_qp: uv * (dq2 * dp2).sqrt(),
        }
    }

    /// σ_{q,p} = 2C.
    pub fn sigma_qp(&self) -> R {
        R::of(2.0) * self.cov_qp
    }

    /// var_q·var_p − C².
    pub fn determinant(&self) -> R {
        self.var_q * self.var_p - self.cov_qp * self.cov_qp
    }

    /// Uncertainty relation with float slack.
    pub fn is_physical(&self, hbar: R) -> bool {
        self.determinant() >= hbar * hbar / R::of(4.0) - R::of(1e-12)
    }

    fn to_array(self) -> [R; 5] {
        [self.mean_q, self.mean_p, self.var_q, self.var_p, self.cov_qp]
    }

    fn from_array(a: [R; 5]) -> Self {
        Self {
            mean_q: a[0],
            mean_p: a[1],
            var_q: a[2],
            var_p: a[3],
            cov_qp: a[4],
        }
    }
}

/// Fokker–Planck coefficients at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Coefficients<R> {
    pub gamma: R,
    pub d1: R,
    pub d2: R,
    /// Mass correction ΔM entering the drift as (1 − ΔM/M).
    pub delta_m: R,
}

/// Constant or tabulated (linearly interpolated) coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSchedule<R> {
    Constant(Coefficients<R>),
    Tabulated {
        times: Vec<R>,
        values: Vec<Coefficients<R>>,
    },
}

impl<R: Real> CoefficientSchedule<R> {
    /// From a trace; ΔM(t) = ΔM₂(t) (+ ΔM₁ when `static_shift` is given).
    /// Non-finite samples are rejected.
    pub fn from_trace(trace: &CoefficientTrace<R>, static_shift: Option<R>) -> Result<Self> {
        let shift = static_shift.unwrap_or_else(R::zero);
        let mut values = Vec::with_capacity(trace.times.len());
        for k in 0..trace.times.len() {
            let c = Coefficients {
                gamma: trace.gamma[k],
                d1: trace.d1[k],
                d2: trace.d2[k],
                delta_m: trace.delta_m2[k] + shift,
            };
            if !(c.gamma.is_finite() && c.d1.is_finite() && c.d2.is_finite() && c.delta_m.is_finite()) {
                return Err(invalid("coefficients", format!("non-finite trace sample at index {k}")));
            }
            values.push(c);
        }
        Ok(Self::Tabulated {
            times: trace.times.clone(),
            values,
        })
    }

    pub fn at(&self, t: R) -> Coefficients<R> {
        match self {
            Self::Constant(c) => *c,
            Self::Tabulated { times, values } => {
                let n = times.len();
                if t <= times[0] {
                    return values[0];
                }
                if t >= times[n - 1] {
                    return values[n - 1];
                }
                let k = times.partition_point(|&s| s <= t);
                let (t0, t1) = (times[k - 1], times[k]);
                let f = (t - t0) / (t1 - t0);
                let (a, b) = (values[k - 1], values[k]);
                let lerp = |x: R, y: R| x + f * (y - x);
                Coefficients {
                    gamma: lerp(a.gamma, b.gamma),
                    d1: lerp(a.d1, b.d1),
                    d2: lerp(a.d2, b.d2),
                    delta_m: lerp(a.delta_m, b.delta_m),
                }
            }
        }
    }
}

/// Right-hand side of the moment equations of the Fokker–Planck flow.
fn moment_rhs<R: Real>(y: [R; 5], c: &Coefficients<R>, cfg: &PhysicalConfig<R>) -> [R; 5] {
    let two = R::of(2.0);
    let inv_m = (R::one() - c.delta_m / cfg.mass) / cfg.mass;
    let k = cfg.mass * cfg.omega0 * cfg.omega0;
    let [q, p, vq, vp, cqp] = y;
    [
        p * inv_m - two * c.gamma * q,
        -k * q,
        two * cqp * inv_m - R::of(4.0) * c.gamma * vq + two * c.d1,
        -two * k * cqp,
        vp * inv_m - k * vq - two * c.gamma * cqp - c.d2,
    ]
}

/// Integrate the five moment equations from 0 to `t` (RK4, at least 400
/// steps per oscillation period).
pub fn gaussian_moment_evolution<R: Real>(
    state: &GaussianState<R>,
    schedule: &CoefficientSchedule<R>,
    cfg: &PhysicalConfig<R>,
    t: R,
) -> Result<GaussianState<R>> {
    let out = moment_trajectory(state, schedule, cfg, &[t])?;
    Ok(out[0])
}

/// Moments sampled at increasing `times` (≥ 0).
pub fn moment_trajectory<R: Real>(
    state: &GaussianState<R>,
    schedule: &CoefficientSchedule<R>,
    cfg: &PhysicalConfig<R>,
    times: &[R],
) -> Result<Vec<GaussianState<R>>> {
    if times.iter().any(|&t| t < R::zero()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "must be non-negative and non-decreasing"));
    }
    let period = R::TAU() / cfg.omega0;
    let h_max = period / R::of(400.0);
    let mut y = state.to_array();
    let mut t = R::zero();
    let mut out = Vec::with_capacity(times.len());
    let half = R::of(0.5);
    let sixth = R::one() / R::of(6.0);
    for &target in times {
        let span = target - t;
        if span > R::zero() {
            let n = (span / h_max).ceil().to_usize().unwrap_or(1).max(1);
            let h = span / R::of_usize(n);
            for _ in 0..n {
                let c0 = schedule.at(t);
                let cm = schedule.at(t + half * h);
                let c1 = schedule.at(t + h);
                let add = |a: [R; 5], b: [R; 5], s: R| {
                    let mut r = a;
                    for i in 0..5 {
                        r[i] = a[i] + s * b[i];
                    }
                    r
                };
                let k1 = moment_rhs(y, &c0, cfg);
                let k2 = moment_rhs(add(y, k1, half * h), &cm, cfg);
                let k3 = moment_rhs(add(y, k2, half * h), &cm, cfg);
                let k4 = moment_rhs(add(y, k3, h), &c1, cfg);
                for i in 0..5 {
                    y[i] = y[i] + h * sixth * (k1[i] + R::of(2.0) * (k2[i] + k3[i]) + k4[i]);
                }
                t = t + h;
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(crate::error::Error::Unsupported(
                    "moment integration produced non-finite values".into(),
                ));
            }
        }
        out.push(GaussianState::from_array(y));
    }
    Ok(out)
}

/// Constant-coefficient steady state: var_q = D₁/2Γ, C = 0,
/// var_p = M(Mω₀²var_q + D₂).
pub fn steady_state<R: Real>(c: &Coefficients<R>, cfg: &PhysicalConfig<R>) -> Result<GaussianState<R>> {
    if !(c.gamma > R::zero()) {
        return Err(invalid("gamma", "steady state needs gamma > 0"));
    }
    let var_q = c.d1 / (R::of(2.0) * c.gamma);
    let m_eff = cfg.mass / (R::one() - c.delta_m / cfg.mass);
    Ok(GaussianState {
        mean_q: R::zero(),
        mean_p: R::zero(),
        var_q,
        var_p: m_eff * (cfg.mass * cfg.omega0 * cfg.omega0 * var_q + c.d2),
        cov_qp: R::zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> PhysicalConfig<f64> {
        PhysicalConfig::natural(1.0, 0.0).unwrap()
    }

    #[test]
    fn zero_coefficients_rotate_the_ellipse() {
        let c = cfg();
        let s = GaussianState::squeezed(&c, 1.0, -0.5, 0.7, 0.3);
        let sched = CoefficientSchedule::Constant(Coefficients::default());
        let tau = std::f64::consts::TAU;
        let e = gaussian_moment_evolution(&s, &sched, &c, tau).unwrap();
        assert!((e.var_q - s.var_q).abs() < 1e-7);
        assert!((e.mean_q - s.mean_q).abs() < 1e-7);
        let quarter = gaussian_moment_evolution(&s, &sched, &c, tau / 4.0).unwrap();
        // a quarter turn swaps the scaled variances
        assert!((quarter.var_q - s.var_p).abs() < 1e-7);
        assert!((quarter.determinant() - s.determinant()).abs() < 1e-8);
    }

    #[test]
    fn vacuum_damping_relaxes_to_ground_state() {
        let c = cfg();
        let g = 0.05;
        let coeffs = Coefficients {
            gamma: g,
            d1: g,
            d2: 0.0,
            delta_m: 0.0,
        };
        let s = GaussianState::squeezed(&c, 2.0, 0.0, 0.8, 0.0);
        let e = gaussian_moment_evolution(&s, &CoefficientSchedule::Constant(coeffs), &c, 200.0).unwrap();
        assert!((e.var_q / 0.5 - 1.0).abs() < 0.01);
        assert!((e.var_p / 0.5 - 1.0).abs() < 0.01);
        let ss = steady_state(&coeffs, &c).unwrap();
        assert!((ss.var_q - 0.5).abs() < 1e-15 && (ss.var_p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn squeezed_energy_combination_oscillates_at_twice_omega0() {
        let c = cfg();
        let s = GaussianState::squeezed(&c, 0.0, 0.0, 1.0, 0.0);
        let sched = CoefficientSchedule::Constant(Coefficients::default());
        let ts: Vec<f64> = (0..=2000).map(|k| k as f64 * 0.01).collect();
        let tr = moment_trajectory(&s, &sched, &c, &ts).unwrap();
        let v: Vec<f64> = tr.iter().map(|m| m.var_q - 0.5).collect();
        // var_q(t) − (var_q+var_p)/2 ∝ cos 2ω₀t: crossings every π/2
        let mut crossings = Vec::new();
        for k in 1..v.len() {
            if (v[k - 1] < 0.0) != (v[k] < 0.0) {
                crossings.push(ts[k]);
            }
        }
        let spacing = (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
        assert!((spacing - std::f64::consts::FRAC_PI_2).abs() < 0.01);
        // while var_p + (Mω₀)²var_q is conserved
        for m in &tr {
            assert!((m.var_p + m.var_q - (s.var_p + s.var_q)).abs() < 1e-7);
        }
    }

    #[test]
    fn tabulated_interpolation() {
        let a = Coefficients {
            gamma: 0.0,
            d1: 1.0,
            d2: 0.0,
            delta_m: 0.0,
        };
        let b = Coefficients {
            gamma: 2.0,
            d1: 3.0,
            d2: 1.0,
            delta_m: 0.5,
        };
        let s = CoefficientSchedule::Tabulated {
            times: vec![0.0f64, 1.0],
            values: vec![a, b],
        };
        let m = s.at(0.25);
        assert!((m.gamma - 0.5).abs() < 1e-15 && (m.d1 - 1.5).abs() < 1e-15);
        assert_eq!(s.at(5.0), b);
        assert_eq!(s.at(-1.0), a);
    }

    proptest! {
        #[test]
        fn squeezed_states_are_minimum_uncertainty(r in -2.0f64..2.0, phi in 0.0f64..6.3) {
            let s = GaussianState::squeezed(&cfg(), 0.0, 0.0, r, phi);
            prop_assert!((s.determinant() - 0.25).abs() < 1e-12);
            prop_assert!(s.is_physical(1.0));
        }

        #[test]
        fn evolution_preserves_uncertainty(g in 0.0f64..0.05, t in 0.0f64..30.0) {
            let c = cfg();
            let coeffs = Coefficients { gamma: g, d1: g, d2: 0.0, delta_m: 0.0 };
            let s = GaussianState::squeezed(&c, 0.0, 0.0, 0.5, 0.2);
            let e = gaussian_moment_evolution(&s, &CoefficientSchedule::Constant(coeffs), &c, t).unwrap();
            prop_assert!(e.is_physical(1.0));
        }
    }
}
