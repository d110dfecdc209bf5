use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::real::Real;

use super::moments::GaussianState;

/// Periodic phase-space grid. Node (i, j) sits at
/// x = −x_half + i·dx, p = −p_half + j·dp with dx = 2x_half/nx, so the
/// origin is always a node (nx, np even).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real + Serialize + for<'a> Deserialize<'a>")]
#[serde(deny_unknown_fields)]
pub struct GridSpec<R> {
    pub nx: usize,
    pub np: usize,
    pub x_half: R,
    pub p_half: R,
}

impl<R: Real> GridSpec<R> {
    pub fn new(nx: usize, np: usize, x_half: R, p_half: R) -> Result<Self> {
        if nx < 4 || np < 4 || nx % 2 != 0 || np % 2 != 0 {
            return Err(invalid("grid", format!("nx, np must be even and >= 4, got {nx}x{np}")));
        }
        if !(x_half > R::zero() && p_half > R::zero()) {
            return Err(invalid("grid", "extents must be positive"));
        }
        Ok(Self { nx, np, x_half, p_half })
    }

    pub fn dx(&self) -> R {
        R::of(2.0) * self.x_half / R::of_usize(self.nx)
    }

    pub fn dp(&self) -> R {
        R::of(2.0) * self.p_half / R::of_usize(self.np)
    }

    pub fn x(&self, i: usize) -> R {
        -self.x_half + R::of_usize(i) * self.dx()
    }

    pub fn p(&self, j: usize) -> R {
        -self.p_half + R::of_usize(j) * self.dp()
    }

    pub fn cell(&self) -> R {
        self.dx() * self.dp()
    }
}

/// W(x, p) sampled on a [`GridSpec`]; `values[i * np + j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real + Serialize + for<'a> Deserialize<'a>")]
pub struct WignerGrid<R> {
    pub spec: GridSpec<R>,
    pub values: Vec<R>,
}

impl<R: Real> WignerGrid<R> {
    pub fn from_fn(spec: GridSpec<R>, f: impl Fn(R, R) -> R) -> Self {
        let mut values = Vec::with_capacity(spec.nx * spec.np);
        for i in 0..spec.nx {
            let x = spec.x(i);
            for j in 0..spec.np {
                values.push(f(x, spec.p(j)));
            }
        }
        Self { spec, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> R {
        self.values[i * self.spec.np + j]
    }

    /// W at the phase-space origin (always a node).
    pub fn origin(&self) -> R {
        self.at(self.spec.nx / 2, self.spec.np / 2)
    }

    /// ∑ W dx dp.
    pub fn norm(&self) -> R {
        self.values.iter().copied().sum::<R>() * self.spec.cell()
    }

    /// ∑ W² dx dp.
    pub fn square_integral(&self) -> R {
        self.values.iter().map(|&v| v * v).sum::<R>() * self.spec.cell()
    }

    pub fn min(&self) -> R {
        self.values.iter().copied().fold(R::infinity(), R::min)
    }

    /// First and second moments, with cov_qp = ⟨xp⟩ − ⟨x⟩⟨p⟩.
    pub fn moments(&self) -> GaussianState<R> {
        let s = &self.spec;
        let (mut m0, mut mx, mut mp, mut mxx, mut mpp, mut mxp) =
            (R::zero(), R::zero(), R::zero(), R::zero(), R::zero(), R::zero());
        for i in 0..s.nx {
            let x = s.x(i);
            for j in 0..s.np {
                let p = s.p(j);
                let w = self.at(i, j);
                m0 = m0 + w;
                mx = mx + w * x;
                mp = mp + w * p;
                mxx = mxx + w * x * x;
                mpp = mpp + w * p * p;
                mxp = mxp + w * x * p;
            }
        }
        let (ex, ep) = (mx / m0, mp / m0);
        GaussianState {
            mean_q: ex,
            mean_p: ep,
            var_q: mxx / m0 - ex * ex,
            var_p: mpp / m0 - ep * ep,
            cov_qp: mxp / m0 - ex * ep,
        }
    }

    /// ∑|W| dx dp over the outer `band` fraction of each axis.
    pub fn boundary_mass(&self, band: f64) -> R {
        let s = &self.spec;
        let bx = ((s.nx as f64 * band).ceil() as usize).max(1);
        let bp = ((s.np as f64 * band).ceil() as usize).max(1);
        let mut acc = R::zero();
        for i in 0..s.nx {
            let edge_x = i < bx || i >= s.nx - bx;
            for j in 0..s.np {
                if edge_x || j < bp || j >= s.np - bp {
                    acc = acc + self.at(i, j).abs();
                }
            }
        }
        acc * s.cell()
    }

    /// (∑ (W − V)² dx dp)^{1/2}.
    pub fn l2_distance(&self, other: &Self) -> R {
        let d: R = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum();
        (d * self.spec.cell()).sqrt()
    }

    pub fn l2_norm(&self) -> R {
        self.square_integral().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_a_node_and_moments_of_gaussian() {
        let spec = GridSpec::new(128, 96, 11.0f64, 6.0).unwrap();
        assert_eq!(spec.x(64), 0.0);
        assert_eq!(spec.p(48), 0.0);
        let (sx, sp, c) = (1.3f64, 0.7, 0.3);
        let det = sx * sx * sp * sp - c * c;
        let g = WignerGrid::from_fn(spec, |x, p| {
            let (x, p) = (x - 0.5, p + 0.25);
            let q = (sp * sp * x * x - 2.0 * c * x * p + sx * sx * p * p) / det;
            (-0.5 * q).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
        });
        let m = g.moments();
        assert!((g.norm() - 1.0).abs() < 1e-9);
        assert!((m.mean_q - 0.5).abs() < 1e-9);
        assert!((m.mean_p + 0.25).abs() < 1e-9);
        assert!((m.var_q - sx * sx).abs() < 1e-8);
        assert!((m.var_p - sp * sp).abs() < 1e-8);
        assert!((m.cov_qp - c).abs() < 1e-8);
        assert!(g.boundary_mass(0.05) < 1e-6);
    }

    #[test]
    fn rejects_odd_sizes() {
        assert!(GridSpec::new(127, 128, 1.0f64, 1.0).is_err());
        assert!(GridSpec::new(128, 128, 0.0f64, 1.0).is_err());
    }
}
