//! Globally adaptive Gauss–Kronrod quadrature and Gauss–Legendre rules.
//!
//! The adaptive driver follows the QUADPACK `qag` strategy with the
//! 10/21-point Gauss–Kronrod pair: the interval with the largest error
//! estimate is bisected until the summed error meets the tolerance.
//! Known kinks and singular points go in as breakpoints so that they are
//! never interior quadrature nodes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Tolerances for the adaptive driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_subdivisions: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Value and absolute error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate<R> {
    pub value: R,
    pub error: R,
    pub evaluations: usize,
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208024890625,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

struct Segment<R> {
    a: R,
    b: R,
    value: R,
    error: R,
}

impl<R: Real> PartialEq for Segment<R> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<R: Real> Eq for Segment<R> {}
impl<R: Real> PartialOrd for Segment<R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<R: Real> Ord for Segment<R> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Apply the 21-point Kronrod rule on `[a, b]`; returns (value, error).
fn qk21<R: Real, F>(f: &mut F, a: R, b: R) -> Result<(R, R)>
where
    F: FnMut(R) -> Result<R>,
{
    let half = R::of(0.5);
    let center = half * (a + b);
    let h = half * (b - a);
    let fc = f(center)?;
    let mut resk = fc * R::of(WGK[10]);
    let mut resg = R::zero();
    let mut resabs = resk.abs();
    let mut fv1 = [R::zero(); 10];
    let mut fv2 = [R::zero(); 10];
    for j in 0..10 {
        let dx = h * R::of(XGK[j]);
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let w = R::of(WGK[j]);
        resk = resk + w * (f1 + f2);
        resabs = resabs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg = resg + R::of(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = resk * half;
    let mut resasc = R::of(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        resasc = resasc + R::of(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let habs = h.abs();
    let value = resk * h;
    resabs = resabs * habs;
    resasc = resasc * habs;
    let mut err = ((resk - resg) * h).abs();
    if resasc != R::zero() && err != R::zero() {
        let ratio = (R::of(200.0) * err / resasc).powf(R::of(1.5));
        err = resasc * ratio.min(R::one());
    }
    let floor = R::of(50.0) * R::epsilon() * resabs;
    if resabs > R::min_positive_value() / (R::of(50.0) * R::epsilon()) {
        err = err.max(floor);
    }
    if !value.is_finite() {
        return Err(Error::Divergent(format!(
            "non-finite integrand on [{:e}, {:e}]",
            a.f64(),
            b.f64()
        )));
    }
    Ok((value, err))
}

/// Adaptive integration of a fallible integrand over `[a, b]` with
/// interior breakpoints (need not be sorted; points outside are ignored).
pub fn integrate_try<R: Real, F>(mut f: F, a: R, b: R, breakpoints: &[R], opts: &QuadOptions) -> Result<QuadEstimate<R>>
where
    F: FnMut(R) -> Result<R>,
{
    if a == b {
        return Ok(QuadEstimate {
            value: R::zero(),
            error: R::zero(),
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, R::one()) } else { (b, a, -R::one()) };
    let mut points: Vec<R> = vec![lo];
    let mut inner: Vec<R> = breakpoints.iter().copied().filter(|&p| p > lo && p < hi).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    inner.dedup();
    points.extend(inner);
    points.push(hi);

    let mut heap = BinaryHeap::new();
    let mut total = R::zero();
    let mut total_err = R::zero();
    let mut evaluations = 0usize;
    for w in points.windows(2) {
        let (v, e) = qk21(&mut f, w[0], w[1])?;
        evaluations += 21;
        total = total + v;
        total_err = total_err + e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let rel = R::of(opts.rel_tol);
    let abs = R::of(opts.abs_tol);
    let mut subdivisions = heap.len();
    while total_err > abs.max(rel * total.abs()) {
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::QuadratureNotConverged {
                estimate: (sign * total).f64(),
                error: total_err.f64(),
                requested: opts.rel_tol,
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = R::of(0.5) * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval below floating-point resolution: accept what we have.
            heap.push(worst);
            break;
        }
        let (v1, e1) = qk21(&mut f, worst.a, mid)?;
        let (v2, e2) = qk21(&mut f, mid, worst.b)?;
        evaluations += 42;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }
    // Re-sum to shed the drift of incremental updates.
    let mut value = R::zero();
    let mut error = R::zero();
    for s in heap.iter() {
        value = value + s.value;
        error = error + s.error;
    }
    Ok(QuadEstimate {
        value: sign * value,
        error,
        evaluations,
    })
}

/// Infallible-integrand convenience wrapper around [`integrate_try`].
pub fn integrate<R: Real, F>(mut f: F, a: R, b: R, breakpoints: &[R], opts: &QuadOptions) -> Result<QuadEstimate<R>>
where
    F: FnMut(R) -> R,
{
    integrate_try(|x| Ok(f(x)), a, b, breakpoints, opts)
}

/// Integrate over `[a, ∞)` through the map `x = a + (1 - s) / s`.
pub fn integrate_to_infinity_try<R: Real, F>(mut f: F, a: R, opts: &QuadOptions) -> Result<QuadEstimate<R>>
where
    F: FnMut(R) -> Result<R>,
{
    integrate_try(
        |s: R| {
            let x = a + (R::one() - s) / s;
            let v = f(x)?;
            let out = v / (s * s);
            Ok(if out.is_finite() { out } else { R::zero() })
        },
        R::zero(),
        R::one(),
        &[],
        opts,
    )
}

/// Gauss–Legendre rule on [-1, 1] with `n` nodes, as (nodes, weights).
pub fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    let (x, w) = gauss_legendre_f64(n);
    (x.into_iter().map(R::of).collect(), w.into_iter().map(R::of).collect())
}

fn gauss_legendre_f64(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
