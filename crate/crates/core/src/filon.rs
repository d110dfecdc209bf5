//! Filon-type quadrature for ∫ a(ω) e^{iωt} dω with a smooth amplitude.
//!
//! The amplitude is replaced once, independently of `t`, by piecewise
//! Chebyshev interpolants on adaptively chosen panels. For each `t` every
//! panel is integrated exactly up to the interpolation error: by a
//! Gauss–Legendre rule sized to the number of oscillations when the panel
//! holds few of them, and by the terminating integration-by-parts series of
//! the interpolating polynomial when it holds many. The cost per `t` is
//! therefore independent of how many oscillations the full range contains.

use std::sync::OnceLock;

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::quadrature::gauss_legendre;
use crate::real::Real;

const LADDER: [usize; 10] = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192];

fn ladder_rule(idx: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: [OnceLock<(Vec<f64>, Vec<f64>)>; 10] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    RULES[idx].get_or_init(|| gauss_legendre::<f64>(LADDER[idx]))
}

/// Panel construction parameters.
#[derive(Debug, Clone, Copy)]
pub struct ChebOptions {
    /// Initial polynomial degree (forced odd so that the panel midpoint is
    /// never a node).
    pub degree: usize,
    /// Largest degree tried before giving up on an unsplittable panel.
    pub max_degree: usize,
    /// Relative size of the trailing Chebyshev coefficients accepted.
    pub rel_tol: f64,
    /// Panels may be bisected (otherwise only the degree grows).
    pub split: bool,
    pub max_panels: usize,
}

impl Default for ChebOptions {
    fn default() -> Self {
        Self {
            degree: 31,
            max_degree: 255,
            rel_tol: 1e-13,
            split: true,
            max_panels: 4000,
        }
    }
}

/// One Chebyshev panel of the amplitude.
#[derive(Debug)]
pub struct Panel<R: Real> {
    pub a: R,
    pub b: R,
    coeffs: Vec<R>,
    /// s-derivatives of the interpolant at s = -1 and s = +1.
    deriv_lo: Vec<R>,
    deriv_hi: Vec<R>,
    gl_values: Vec<OnceLock<Vec<R>>>,
}

fn lobatto_values<R: Real, F>(f: &mut F, a: R, b: R, n: usize) -> Result<Vec<R>>
where
    F: FnMut(R) -> Result<R>,
{
    let half = R::of(0.5);
    let m = half * (a + b);
    let h = half * (b - a);
    (0..=n)
        .map(|j| {
            let s = R::of((std::f64::consts::PI * j as f64 / n as f64).cos());
            f(m + h * s)
        })
        .collect()
}

fn cheb_coeffs<R: Real>(values: &[R]) -> Vec<R> {
    let n = values.len() - 1;
    let nf = n as f64;
    let mut c = vec![R::zero(); n + 1];
    for (k, ck) in c.iter_mut().enumerate() {
        let mut sum = R::zero();
        for (j, &v) in values.iter().enumerate() {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            let cosv = (std::f64::consts::PI * (k * j % (2 * n)) as f64 / nf).cos();
            sum = sum + v * R::of(w * cosv);
        }
        let mut ckv = sum * R::of(2.0 / nf);
        if k == 0 || k == n {
            ckv = ckv * R::of(0.5);
        }
        *ck = ckv;
    }
    c
}

fn derivative_coeffs<R: Real>(c: &[R]) -> Vec<R> {
    let n = c.len();
    if n <= 1 {
        return vec![R::zero()];
    }
    let mut d = vec![R::zero(); n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + R::of(2.0 * k as f64) * c[k];
    }
    d[0] = d[0] * R::of(0.5);
    d.truncate(n - 1);
    if d.is_empty() {
        d.push(R::zero());
    }
    d
}

fn clenshaw<R: Real>(c: &[R], s: R) -> R {
    let mut b1 = R::zero();
    let mut b2 = R::zero();
    for &ck in c.iter().skip(1).rev() {
        let b0 = R::of(2.0) * s * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    s * b1 - b2 + c[0]
}

impl<R: Real> Panel<R> {
    fn from_coeffs(a: R, b: R, coeffs: Vec<R>) -> Self {
        let mut deriv_lo = Vec::with_capacity(coeffs.len());
        let mut deriv_hi = Vec::with_capacity(coeffs.len());
        let mut cur = coeffs.clone();
        loop {
            let hi: R = cur.iter().copied().sum();
            let lo: R = cur
                .iter()
                .enumerate()
                .map(|(k, &v)| if k % 2 == 0 { v } else { -v })
                .sum();
            deriv_hi.push(hi);
            deriv_lo.push(lo);
            if cur.len() <= 1 {
                break;
            }
            cur = derivative_coeffs(&cur);
        }
        Self {
            a,
            b,
            coeffs,
            deriv_lo,
            deriv_hi,
            gl_values: (0..LADDER.len()).map(|_| OnceLock::new()).collect(),
        }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn half_width(&self) -> R {
        R::of(0.5) * (self.b - self.a)
    }

    /// Evaluate the interpolant at ω.
    pub fn eval(&self, omega: R) -> R {
        let m = R::of(0.5) * (self.a + self.b);
        clenshaw(&self.coeffs, (omega - m) / self.half_width())
    }

    /// ∫ p(ω) dω over the panel.
    pub fn integral(&self) -> R {
        let mut s = R::zero();
        for (k, &c) in self.coeffs.iter().enumerate().step_by(2) {
            s = s + c * R::of(2.0 / (1.0 - (k * k) as f64));
        }
        s * self.half_width()
    }

    fn ibp_threshold(&self) -> f64 {
        let n = self.degree() as f64;
        (0.5 * n * n).max(32.0)
    }

    /// ∫ p(ω) e^{iωt} dω over the panel.
    pub fn fourier(&self, t: R) -> Complex<R> {
        let h = self.half_width();
        let m = R::of(0.5) * (self.a + self.b);
        let kappa = t * h;
        if kappa == R::zero() {
            return Complex::new(self.integral(), R::zero());
        }
        let kf = kappa.abs().f64();
        if kf <= self.ibp_threshold() {
            let need = 0.75 * kf + 0.5 * self.degree() as f64 + 24.0;
            let idx = LADDER
                .iter()
                .position(|&m| m as f64 >= need)
                .unwrap_or(LADDER.len() - 1);
            let (nodes, weights) = ladder_rule(idx);
            let vals =
                self.gl_values[idx].get_or_init(|| nodes.iter().map(|&s| clenshaw(&self.coeffs, R::of(s))).collect());
            let mut re = R::zero();
            let mut im = R::zero();
            for ((&s, &w), &v) in nodes.iter().zip(weights.iter()).zip(vals.iter()) {
                let phase = (m + h * R::of(s)) * t;
                let wv = R::of(w) * v;
                re = re + wv * phase.cos();
                im = im + wv * phase.sin();
            }
            return Complex::new(re * h, im * h);
        }
        // Integration by parts in s: exact for the polynomial.
        let i_kappa = Complex::new(R::zero(), kappa);
        let e_hi = Complex::new(kappa.cos(), kappa.sin());
        let e_lo = e_hi.conj();
        let mut sum = Complex::new(R::zero(), R::zero());
        let mut denom = i_kappa;
        let mut sign = R::one();
        for (dh, dl) in self.deriv_hi.iter().zip(self.deriv_lo.iter()) {
            let term = (e_hi * *dh - e_lo * *dl) / denom;
            sum = sum + term * sign;
            sign = -sign;
            denom = denom * i_kappa;
        }
        let phase = m * t;
        Complex::new(phase.cos(), phase.sin()) * sum * h
    }

    /// ω-derivatives of the interpolant at the right endpoint.
    fn right_derivatives(&self, count: usize) -> Vec<R> {
        let scale = R::one() / self.half_width();
        let mut f = R::one();
        self.deriv_hi
            .iter()
            .take(count)
            .map(|&d| {
                let v = d * f;
                f = f * scale;
                v
            })
            .collect()
    }
}

/// Piecewise-Chebyshev amplitude ready for Fourier-type integration.
#[derive(Debug)]
pub struct FilonIntegrand<R: Real> {
    pub panels: Vec<Panel<R>>,
}

impl<R: Real> FilonIntegrand<R> {
    /// Build panels on `[a, b]`, with extra panel boundaries at `breaks`.
    pub fn build<F>(mut f: F, a: R, b: R, breaks: &[R], opts: &ChebOptions) -> Result<Self>
    where
        F: FnMut(R) -> Result<R>,
    {
        if !(b > a) {
            return Err(invalid("interval", "panel construction needs a < b"));
        }
        let mut edges = vec![a];
        let mut inner: Vec<R> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
        inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
        edges.extend(inner);
        edges.push(b);
        let mut panels = Vec::new();
        let mut stack: Vec<(R, R, usize)> = edges.windows(2).rev().map(|w| (w[0], w[1], 0usize)).collect();
        let degree = opts.degree | 1;
        while let Some((lo, hi, depth)) = stack.pop() {
            let mut n = degree;
            loop {
                let vals = lobatto_values(&mut f, lo, hi, n)?;
                let c = cheb_coeffs(&vals);
                let scale = c.iter().fold(R::zero(), |m, v| m.max(v.abs()));
                let tail = c[n - 2..].iter().fold(R::zero(), |m, v| m.max(v.abs()));
                let resolved = tail <= R::of(opts.rel_tol) * scale || scale == R::zero();
                let tiny = (hi - lo) <= R::epsilon() * R::of(64.0) * (lo.abs() + hi.abs());
                if resolved || tiny {
                    panels.push(Panel::from_coeffs(lo, hi, c));
                    break;
                }
                if opts.split && depth < 200 {
                    let mid = if lo > R::zero() && hi / lo > R::of(4.0) {
                        (lo * hi).sqrt()
                    } else {
                        R::of(0.5) * (lo + hi)
                    };
                    stack.push((mid, hi, depth + 1));
                    stack.push((lo, mid, depth + 1));
                    break;
                }
                if 2 * n + 1 > opts.max_degree.max(degree) {
                    return Err(Error::QuadratureNotConverged {
                        estimate: f64::NAN,
                        error: (tail / scale).f64(),
                        requested: opts.rel_tol,
                    });
                }
                n = 2 * n + 1;
            }
            if panels.len() > opts.max_panels {
                return Err(Error::QuadratureNotConverged {
                    estimate: f64::NAN,
                    error: f64::NAN,
                    requested: opts.rel_tol,
                });
            }
        }
        Ok(Self { panels })
    }

    pub fn lower(&self) -> R {
        self.panels.first().map(|p| p.a).unwrap_or_else(R::zero)
    }

    pub fn upper(&self) -> R {
        self.panels.last().map(|p| p.b).unwrap_or_else(R::zero)
    }

    /// Value of the interpolant at ω (clamped to the panel range).
    pub fn eval(&self, omega: R) -> R {
        let idx = self.panels.partition_point(|p| p.b < omega);
        let p = &self.panels[idx.min(self.panels.len() - 1)];
        p.eval(omega)
    }

    /// ∫ a(ω) dω.
    pub fn integral(&self) -> R {
        self.panels.iter().map(Panel::integral).sum()
    }

    /// ∫ a(ω) e^{iωt} dω over the panel range.
    pub fn fourier(&self, t: R) -> Complex<R> {
        self.panels
            .iter()
            .fold(Complex::new(R::zero(), R::zero()), |acc, p| acc + p.fourier(t))
    }

    /// Asymptotic ∫_{upper}^∞ a(ω) e^{iωt} dω for an amplitude decaying to
    /// zero, from the integration-by-parts series; returns (value, bound).
    pub fn tail_fourier(&self, t: R) -> (Complex<R>, R) {
        let zero = Complex::new(R::zero(), R::zero());
        let last = match self.panels.last() {
            Some(p) => p,
            None => return (zero, R::zero()),
        };
        if t == R::zero() {
            return (zero, R::infinity());
        }
        let w = last.b;
        let d = last.right_derivatives(5);
        let it = Complex::new(R::zero(), t);
        let mut denom = it;
        let mut sum = zero;
        let mut sign = -R::one();
        let mut last_mag = R::zero();
        for (k, &dk) in d.iter().enumerate() {
            let term = Complex::new(dk, R::zero()) / denom * sign;
            if k < 4 {
                sum = sum + term;
            } else {
                last_mag = term.norm();
            }
            sign = -sign;
            denom = denom * it;
        }
        let phase = w * t;
        (Complex::new(phase.cos(), phase.sin()) * sum, last_mag)
    }
}
