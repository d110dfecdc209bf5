use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Checked, Error, Result};
use crate::real::Real;
use crate::spectral::PhysicalConfig;

use super::grid::{GridSpec, WignerGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixture,
}

/// Superposition (|α⟩ ± |−α⟩)/N, or the corresponding 50/50 mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct CatStateSpec<R> {
    pub alpha: Complex<R>,
    pub parity: Parity,
}

/// Ground-state widths and packet centre derived from α and the config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatGeometry<R> {
    /// Δq₀ = √(ħ/2Mω₀)
    pub dq0: R,
    /// Δp₀ = ħ/(2Δq₀)
    pub dp0: R,
    /// Packet centre (q_c, p_c) of |α⟩.
    pub q_c: R,
    pub p_c: R,
    /// P₀ = √(2Mħω₀)|α|
    pub p0: R,
}

impl<R: Real> CatStateSpec<R> {
    /// Momentum-separated cat α = i·alpha_abs.
    pub fn momentum_cat(alpha_abs: R, parity: Parity) -> Self {
        Self {
            alpha: Complex::new(R::zero(), alpha_abs),
            parity,
        }
    }

    pub fn geometry(&self, cfg: &PhysicalConfig<R>) -> CatGeometry<R> {
        let two = R::of(2.0);
        let dq0 = (cfg.hbar / (two * cfg.mass * cfg.omega0)).sqrt();
        let dp0 = cfg.hbar / (two * dq0);
        let s = (two * cfg.mass * cfg.hbar * cfg.omega0).sqrt();
        CatGeometry {
            dq0,
            dp0,
            q_c: two * dq0 * self.alpha.re,
            p_c: s * self.alpha.im,
            p0: s * self.alpha.norm(),
        }
    }

    /// Warns for |α| < 2, where the two packets overlap noticeably.
    pub fn check(&self) -> Checked<()> {
        let a = self.alpha.norm();
        Checked::ok(()).warn_if(a < R::of(2.0) && a > R::zero(), || {
            format!("|alpha| = {a} is not large; cat components overlap")
        })
    }

    /// The same superposition with the other parity/mixture flag.
    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }
}

/// Default grid: half extents |α|√2·Δ·1.5 + 6Δ in ground-state units,
/// 256 × 256 nodes.
pub fn default_grid<R: Real>(spec: &CatStateSpec<R>, cfg: &PhysicalConfig<R>) -> GridSpec<R> {
    let g = spec.geometry(cfg);
    let a = spec.alpha.norm();
    let k = a * R::SQRT_2() * R::of(1.5) + R::of(6.0);
    GridSpec {
        nx: 256,
        np: 256,
        x_half: k * g.dq0,
        p_half: k * g.dp0,
    }
}

/// Wigner function of the cat state (or mixture) on the grid.
///
/// W = [W₊ + W₋ ± 2W_int] / (2(1 ± e^{−2|α|²})) with
/// W_int = (1/πħ) exp(−q²/2Δq₀² − p²/2Δp₀²) cos(2(p_c q − q_c p)/ħ).
pub fn cat_wigner<R: Real>(
    spec: &CatStateSpec<R>,
    grid: &GridSpec<R>,
    cfg: &PhysicalConfig<R>,
) -> Result<WignerGrid<R>> {
    let g = spec.geometry(cfg);
    if spec.parity != Parity::Mixture && g.p0 > R::zero() {
        // The fringe wavevector 2(p_c, −q_c)/ħ rotates with the state, so
        // over a period it reaches 2P₀/ħ along x and 2P₀/(Mω₀ħ) along p.
        let lam_x = R::PI() * cfg.hbar / g.p0;
        let lam_p = lam_x * cfg.mass * cfg.omega0;
        let (ppf_x, ppf_p) = (lam_x / grid.dx(), lam_p / grid.dp());
        let worst = ppf_x.min(ppf_p);
        if worst < R::of(8.0) {
            let need = |n: usize, ppf: R| -> usize {
                let m = (R::of_usize(n) * R::of(8.0) / ppf)
                    .ceil()
                    .to_usize()
                    .unwrap_or(usize::MAX);
                m + m % 2
            };
            let required = need(grid.nx, ppf_x).max(need(grid.np, ppf_p));
            return Err(Error::GridTooCoarse {
                points_per_fringe: worst.f64(),
                required_nx: required,
            });
        }
    }
    let pi_h = R::PI() * cfg.hbar;
    let two = R::of(2.0);
    let (vq, vp) = (two * g.dq0 * g.dq0, two * g.dp0 * g.dp0);
    let gauss = move |q: R, p: R| (-(q * q) / vq - p * p / vp).exp() / pi_h;
    let overlap = (-two * spec.alpha.norm_sqr()).exp();
    let (sign, denom) = match spec.parity {
        Parity::Even => (R::one(), two * (R::one() + overlap)),
        Parity::Odd => (-R::one(), two * (R::one() - overlap)),
        Parity::Mixture => (R::zero(), two),
    };
    if denom == R::zero() {
        return Err(invalid("alpha", "odd cat with alpha = 0 does not exist"));
    }
    let (qc, pc, h) = (g.q_c, g.p_c, cfg.hbar);
    Ok(WignerGrid::from_fn(*grid, |q, p| {
        let plus = gauss(q - qc, p - pc);
        let minus = gauss(q + qc, p + pc);
        let inter = gauss(q, p) * (two * (pc * q - qc * p) / h).cos();
        (plus + minus + sign * two * inter) / denom
    }))
}
