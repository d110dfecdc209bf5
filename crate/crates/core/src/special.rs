//! Special functions needed by the oscillatory quadrature.

use num_complex::Complex;

use crate::real::Real;

/// Sine integral Si(x) = ∫₀ˣ sin(t)/t dt.
///
/// Power series for |x| ≤ 4, continued fraction for E₁(ix) beyond.
pub fn sine_integral<R: Real>(x: R) -> R {
    if x < R::zero() {
        return -sine_integral(-x);
    }
    if x == R::zero() {
        return R::zero();
    }
    if x <= R::of(4.0) {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 1usize;
        loop {
            // term_k = (-1)^k x^(2k+1) / (2k+1)!, series term = term_k / (2k+1)
            let kf = R::of_usize(k);
            term = -term * x2 / ((R::of(2.0) * kf) * (R::of(2.0) * kf + R::one()));
            let add = term / (R::of(2.0) * kf + R::one());
            sum = sum + add;
            if add.abs() <= R::epsilon() * sum.abs() * R::of(0.1) || k > 60 {
                break;
            }
            k += 1;
        }
        return sum;
    }
    let tiny = R::min_positive_value() * R::of(1e10);
    let one = Complex::new(R::one(), R::zero());
    let mut b = Complex::new(R::one(), x);
    let mut c = Complex::new(R::one() / tiny, R::zero());
    let mut d = one / b;
    let mut h = d;
    for i in 2..500usize {
        let a = -R::of(((i - 1) * (i - 1)) as f64);
        b = b + Complex::new(R::of(2.0), R::zero());
        d = one / (d * a + b);
        c = b + Complex::new(a, R::zero()) / c;
        let del = c * d;
        h = h * del;
        if (del.re - R::one()).abs() + del.im.abs() < R::epsilon() * R::of(4.0) {
            break;
        }
    }
    let phase = Complex::new(x.cos(), -x.sin());
    let h = phase * h;
    R::FRAC_PI_2() + h.im
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};

    #[test]
    fn matches_direct_quadrature() {
        let o = QuadOptions::with_rel_tol(1e-13);
        for &x in &[0.1f64, 1.0, 3.9, 4.1, 7.5, 20.0, 55.0] {
            let q = integrate(|t: f64| if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0, x, &[], &o)
                .unwrap()
                .value;
            assert!((sine_integral(x) - q).abs() < 2e-13, "x={x}");
        }
    }

    #[test]
    fn known_values_and_limits() {
        assert!((sine_integral(1.0f64) - 0.946_083_070_367_183).abs() < 1e-14);
        assert!((sine_integral(1e7f64) - std::f64::consts::FRAC_PI_2).abs() < 1e-7);
        assert_eq!(sine_integral(-2.0f64), -sine_integral(2.0f64));
        assert!((sine_integral(1.0f32) - 0.946_083_1).abs() < 1e-6);
    }
}
