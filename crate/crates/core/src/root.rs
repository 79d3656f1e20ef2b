//! Bracketed scalar root finding (Brent–Dekker: bisection safeguarded
//! inverse quadratic interpolation).

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;

/// Find `x` in `[a, b]` with `f(x) = 0` to absolute tolerance `xtol`.
///
/// `f` may fail; errors are propagated unchanged. When `f(a)` and `f(b)`
/// share a sign the returned error is built by `no_root`.
pub fn brent<F, E>(mut f: F, a: f64, b: f64, xtol: f64, no_root: E) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
    E: FnOnce(f64, f64) -> Error,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(no_root(fa, fb));
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NoConvergence(MAX_ITERATIONS))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none(_: f64, _: f64) -> Error {
        Error::NoCgvm("test".into())
    }

    #[test]
    fn finds_cubic_root() {
        let r = brent(|x| Ok(x * x * x - 2.0 * x - 5.0), 2.0, 3.0, 1e-14, none).unwrap();
        assert!((r - 2.094_551_481_542_326_5).abs() < 1e-13);
    }

    #[test]
    fn reversed_bracket() {
        let r = brent(|x| Ok(x.cos() - x), 1.0, 0.0, 1e-14, none).unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-13);
    }

    #[test]
    fn no_sign_change() {
        let err = brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-10, none).unwrap_err();
        assert!(matches!(err, Error::NoCgvm(_)));
    }

    #[test]
    fn propagates_evaluation_errors() {
        let err = brent(|_| Err(Error::ZeroJsa), 0.0, 1.0, 1e-10, none).unwrap_err();
        assert_eq!(err, Error::ZeroJsa);
    }

    #[test]
    fn endpoint_root() {
        assert_eq!(brent(|x| Ok(x - 1.0), 1.0, 2.0, 1e-10, none).unwrap(), 1.0);
    }
}
