use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::real::Real;
use crate::spectral::PhysicalConfig;

use super::solver::Trajectory;

/// Normalized fringe contrast at the origin and its exponential fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct CoherenceSeries<R> {
    pub times: Vec<R>,
    pub c: Vec<R>,
    /// Fitted decay rate over `window`; `None` when nothing to fit.
    pub fit_rate: Option<R>,
    /// RMS misfit relative to the fitted amplitude at the window start.
    pub fit_residual: Option<R>,
    pub window: (R, R),
    pub flagged: bool,
}

/// c(t) = [W_cat(0,0,t) − W_mix(0,0,t)] / [W_cat(0,0,0) − W_mix(0,0,0)],
/// fitted to A·e^{−rt} on [2π/ω₀, min(t_final, 3·t_d_predicted)].
pub fn coherence_factor<R: Real>(
    cat: &Trajectory<R>,
    mixture: &Trajectory<R>,
    cfg: &PhysicalConfig<R>,
    t_d_predicted: Option<R>,
) -> Result<CoherenceSeries<R>> {
    if cat.times.len() != mixture.times.len()
        || cat
            .times
            .iter()
            .zip(&mixture.times)
            .any(|(a, b)| (*a - *b).abs() > R::of(1e-9) * (R::one() + a.abs()))
    {
        return Err(invalid("trajectory", "cat and mixture runs must share their time grid"));
    }
    let times = cat.times.clone();
    let t_final = *times.last().unwrap_or(&R::zero());
    let t_lo = if cfg.omega0 > R::zero() {
        R::TAU() / cfg.omega0
    } else {
        R::zero()
    };
    let t_hi = match t_d_predicted {
        Some(td) => t_final.min(R::of(3.0) * td),
        None => t_final,
    };
    let d0 = cat.origin[0] - mixture.origin[0];
    let scale = R::of(1e-12) * cat.origin[0].abs().max(R::min_positive_value());
    if d0.abs() <= scale {
        return Ok(CoherenceSeries {
            c: vec![R::zero(); times.len()],
            times,
            fit_rate: None,
            fit_residual: None,
            window: (t_lo, t_hi),
            flagged: false,
        });
    }
    let c: Vec<R> = cat
        .origin
        .iter()
        .zip(&mixture.origin)
        .map(|(a, b)| (*a - *b) / d0)
        .collect();
    let pts: Vec<(R, R)> = times
        .iter()
        .zip(&c)
        .filter(|(t, v)| **t >= t_lo && **t <= t_hi && **v > R::zero())
        .map(|(t, v)| (*t, *v))
        .collect();
    let (mut fit_rate, mut fit_residual, mut flagged) = (None, None, false);
    if pts.len() >= 3 {
        let n = R::of_usize(pts.len());
        let (st, sy) = pts
            .iter()
            .fold((R::zero(), R::zero()), |(a, b), (t, v)| (a + *t, b + v.ln()));
        let (mt, my) = (st / n, sy / n);
        let (mut sxy, mut sxx) = (R::zero(), R::zero());
        for (t, v) in &pts {
            sxy = sxy + (*t - mt) * (v.ln() - my);
            sxx = sxx + (*t - mt) * (*t - mt);
        }
        if sxx > R::zero() {
            let slope = sxy / sxx;
            let ln_a = my - slope * mt;
            let amp = (ln_a + slope * pts[0].0).exp();
            let rms = (pts
                .iter()
                .map(|(t, v)| {
                    let d = *v - (ln_a + slope * *t).exp();
                    d * d
                })
                .sum::<R>()
                / n)
                .sqrt();
            let res = rms / amp;
            fit_rate = Some(-slope);
            fit_residual = Some(res);
            if res > R::of(0.1) {
                flagged = true;
                log::warn!("coherence fit residual {res} exceeds 10% of the amplitude");
            }
        }
    }
    Ok(CoherenceSeries {
        times,
        c,
        fit_rate,
        fit_residual,
        window: (t_lo, t_hi),
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(origin: Vec<f64>, dt: f64) -> Trajectory<f64> {
        use crate::phasespace::grid::{GridSpec, WignerGrid};
        let spec = GridSpec::new(4, 4, 1.0, 1.0).unwrap();
        Trajectory {
            times: (0..origin.len()).map(|k| k as f64 * dt).collect(),
            norm: vec![1.0; origin.len()],
            origin,
            snapshots: vec![],
            final_grid: WignerGrid::from_fn(spec, |_, _| 0.0),
            dt,
            max_leakage: (0.0, 0.0),
            warnings: vec![],
        }
    }

    #[test]
    fn recovers_exponential_rate() {
        let cfg = PhysicalConfig::natural(1.0, 0.0).unwrap();
        let dt = 0.1;
        let cat: Vec<f64> = (0..600).map(|k| 0.01 + 0.3 * (-0.02 * k as f64 * dt).exp()).collect();
        let mix = vec![0.01; 600];
        let s = coherence_factor(&traj(cat, dt), &traj(mix, dt), &cfg, Some(40.0)).unwrap();
        assert!((s.fit_rate.unwrap() - 0.02).abs() < 1e-12);
        assert!(s.fit_residual.unwrap() < 1e-12);
        assert!((s.window.1 - 59.9).abs() < 1e-9);
        assert!(!s.flagged);
    }

    #[test]
    fn mixture_as_cat_gives_zero() {
        let cfg = PhysicalConfig::natural(1.0, 0.0).unwrap();
        let m = vec![0.02; 50];
        let s = coherence_factor(&traj(m.clone(), 0.1), &traj(m, 0.1), &cfg, None).unwrap();
        assert!(s.c.iter().all(|&v| v == 0.0));
        assert!(s.fit_rate.is_none());
    }

    #[test]
    fn poor_fit_is_flagged() {
        let cfg = PhysicalConfig::natural(1.0, 0.0).unwrap();
        let dt = 0.1;
        let cat: Vec<f64> = (0..400).map(|k| 1.0 + 0.8 * (0.5 * k as f64 * dt).sin()).collect();
        let s = coherence_factor(&traj(cat, dt), &traj(vec![0.0; 400], dt), &cfg, None).unwrap();
        assert!(s.flagged);
    }
}
