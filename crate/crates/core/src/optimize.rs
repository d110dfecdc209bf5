//! One-dimensional minimization (Brent's parabolic/golden-section method).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Minimize `f` on [a, b]. `tol` is the absolute tolerance on x.
pub fn brent_minimize(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<Minimum> {
    if !(a < b) || !(tol > 0.0) {
        return Err(Error::OptimizerNotConverged(format!(
            "bad interval [{a}, {b}] or tolerance {tol}"
        )));
    }
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (a, b);
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for it in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = tol + 1e-12 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(Minimum {
                x,
                value: fx,
                iterations: it,
            });
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Err(Error::OptimizerNotConverged(format!(
        "no convergence after {max_iter} iterations (x = {x}, f = {fx})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn finds_cosine_minimum() {
        let m = brent_minimize(|x| x.cos(), 2.0, 4.5, 1e-10, 200).unwrap();
        assert!((m.x - std::f64::consts::PI).abs() < 1e-8);
        assert!((m.value + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(brent_minimize(|x| x, 1.0, 0.0, 1e-8, 10).is_err());
        assert!(brent_minimize(|x| (x - 0.3).powi(2), -1.0, 1.0, 1e-12, 2).is_err());
    }

    proptest! {
        #[test]
        fn quartic_minimum(c in -0.9f64..0.9) {
            let m = brent_minimize(|x| (x - c).powi(2) * (1.0 + (x - c).powi(2)), -1.0, 1.0, 1e-10, 200).unwrap();
            prop_assert!((m.x - c).abs() < 1e-6);
        }
    }
}
