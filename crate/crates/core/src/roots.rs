//! Bracketed scalar root finding.

use crate::scalar::{c, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("no sign change on [{a}, {b}]")]
    NoBracket { a: f64, b: f64 },
    #[error("function evaluation failed at {x}")]
    Eval { x: f64 },
}

/// Brent's method. `f` may fail; a failure aborts the search.
pub fn brent<T: Real, E>(mut f: impl FnMut(T) -> Result<T, E>, a: T, b: T, xtol: T) -> Result<T, RootError> {
    let ev = |f: &mut dyn FnMut(T) -> Result<T, E>, x: T| f(x).map_err(|_| RootError::Eval { x: x.as_f64() });
    let (mut a, mut b) = (a, b);
    let mut fa = ev(&mut f, a)?;
    let mut fb = ev(&mut f, b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(RootError::NoBracket { a: a.as_f64(), b: b.as_f64() });
    }
    let (mut cc, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > T::zero()) == (fc > T::zero()) {
            cc = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = cc;
            cc = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = c::<T>(2.0) * T::epsilon() * b.abs() + xtol * c(0.5);
        let m = (cc - b) * c(0.5);
        if m.abs() <= tol || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == cc {
                p = c::<T>(2.0) * m * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (c::<T>(2.0) * m * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            if c::<T>(2.0) * p < (c::<T>(3.0) * m * q - (tol * q).abs()).min((e * q).abs()) {
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
        b = b + if d.abs() > tol { d } else { tol * m.signum() };
        fb = ev(&mut f, b)?;
    }
    Ok(b)
}

/// Scans `n` equal subintervals of `[a, b]` and returns the first bracket.
pub fn scan_bracket<T: Real, E>(mut f: impl FnMut(T) -> Result<T, E>, a: T, b: T, n: usize) -> Option<(T, T)> {
    let mut xa = a;
    let mut fa = f(a).ok()?;
    for i in 1..=n {
        let xb = a + (b - a) * T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
        let fb = match f(xb) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if (fa > T::zero()) != (fb > T::zero()) || fb == T::zero() {
            return Some((xa, xb));
        }
        xa = xb;
        fa = fb;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt2() {
        let r = brent(|x: f64| Ok::<_, ()>(x * x - 2.0), 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn no_bracket() {
        assert!(brent(|x: f64| Ok::<_, ()>(x * x + 1.0), -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn cosine_scan() {
        let (a, b) = scan_bracket(|x: f64| Ok::<_, ()>(x.cos()), 0.0, 3.0, 10).unwrap();
        assert!(a < std::f64::consts::FRAC_PI_2 && b > std::f64::consts::FRAC_PI_2);
    }
}
