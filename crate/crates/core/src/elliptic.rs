//! Complete elliptic integrals via the arithmetic-geometric mean.
//!
//! Parameter convention: `m = k²`. Callers pass the complementary modulus
//! `kc = sqrt(1 - m)` alongside `m` because near the source `1 - m` is tiny
//! and cannot be recovered from `m` without cancellation.

use crate::scalar::{c, Real};

/// Result of one AGM sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Elliptic<T> {
    /// First kind, K(m).
    pub k: T,
    /// Second kind, E(m).
    pub e: T,
    /// (K - E) / m, finite at m = 0 where it equals π/4.
    pub d: T,
}

const MAX_ITER: usize = 40;

/// Arithmetic-geometric mean of two non-negative numbers.
///
/// ```text
/// a_{n+1} = (a_n + b_n) / 2,   b_{n+1} = sqrt(a_n b_n)
/// ```
pub fn agm<T: Real>(a: T, b: T) -> T {
    let (mut a, mut b) = (a, b);
    let tol = c::<T>(T::AGM_TOL);
    for _ in 0..MAX_ITER {
        if (a - b).abs() <= tol * a {
            break;
        }
        let an = (a + b) * c(0.5);
        b = (a * b).sqrt();
        a = an;
    }
    (a + b) * c(0.5)
}

/// K, E and (K-E)/m from `m` and `kc = sqrt(1-m)`.
///
/// Uses the Gauss transformation
/// ```text
/// K = π / (2 AGM(1, kc))
/// E = K (1 - Σ 2^{n-1} c_n²),  c_0² = m,  c_{n+1} = c_n² / (4 a_{n+1})
/// ```
pub fn complete<T: Real>(m: T, kc: T) -> Elliptic<T> {
    let half = c::<T>(0.5);
    let tol = c::<T>(T::AGM_TOL);
    let mut a = T::one();
    let mut b = kc;
    // Σ_{n≥1} 2^{n-1} c_n², kept separate from the n = 0 term m/2.
    let mut tail = T::zero();
    let mut cn = m.sqrt();
    let mut pow = half;
    for _ in 0..MAX_ITER {
        let an = (a + b) * half;
        let bn = (a * b).sqrt();
        let cn1 = cn * cn / (c::<T>(4.0) * an);
        pow = pow + pow;
        tail += pow * cn1 * cn1;
        a = an;
        b = bn;
        cn = cn1;
        if cn <= tol * a {
            break;
        }
    }
    let k = T::PI() / (a + a);
    let e = k * (T::one() - m * half - tail);
    // (K - E)/m = K (1/2 + tail/m); tail = O(m²) so the ratio is safe.
    let d = if m > T::zero() { k * (half + tail / m) } else { T::FRAC_PI_4() };
    Elliptic { k, e, d }
}

/// Convenience wrapper computing `kc` from `m`; only accurate away from `m = 1`.
pub fn complete_m<T: Real>(m: T) -> Elliptic<T> {
    complete(m, (T::one() - m).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Gauss-Legendre free oracle: midpoint rule on the smooth integrand
    // over φ in [0, π/2] converges spectrally (periodic extension).
    fn k_quad(m: f64) -> f64 {
        let n = 4096;
        let h = PI / 2.0 / n as f64;
        (0..n)
            .map(|i| {
                let s = ((i as f64 + 0.5) * h).sin();
                h / (1.0 - m * s * s).sqrt()
            })
            .sum()
    }

    fn e_quad(m: f64) -> f64 {
        let n = 4096;
        let h = PI / 2.0 / n as f64;
        (0..n)
            .map(|i| {
                let s = ((i as f64 + 0.5) * h).sin();
                h * (1.0 - m * s * s).sqrt()
            })
            .sum()
    }

    #[test]
    fn zero_parameter() {
        let r = complete_m(0.0f64);
        assert!((r.k - PI / 2.0).abs() < 1e-15);
        assert!((r.e - PI / 2.0).abs() < 1e-15);
        assert!((r.d - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn matches_quadrature() {
        for &m in &[1e-6, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let r = complete_m(m);
            assert!((r.k - k_quad(m)).abs() < 1e-13 * r.k, "K({m})");
            assert!((r.e - e_quad(m)).abs() < 1e-13 * r.e, "E({m})");
            let d = (k_quad(m) - e_quad(m)) / m;
            assert!((r.d - d).abs() < 1e-8 * d.max(1.0), "D({m})");
        }
    }

    #[test]
    fn small_m_series_for_d() {
        // (K - E)/m = π/4 (1 + 3m/8 + ...)
        let m = 1e-9;
        let r = complete_m(m);
        assert!((r.d - PI / 4.0 * (1.0 + 3.0 * m / 8.0)).abs() < 4e-16);
    }

    #[test]
    fn logarithmic_limit() {
        // K ~ ln(4/kc) as kc -> 0
        let kc: f64 = 1e-9;
        let r = complete(1.0 - kc * kc, kc);
        assert!((r.k - (4.0 / kc).ln()).abs() < 1e-12);
        assert!((r.e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_precision_runs() {
        let r = complete_m(0.5f32);
        assert!((r.k as f64 - k_quad(0.5)).abs() < 1e-5);
    }

    #[test]
    fn agm_homogeneous() {
        assert!((agm(2.0f64, 8.0) - 2.0 * agm(1.0, 4.0)).abs() < 1e-14);
        assert_eq!(agm(3.0f64, 3.0), 3.0);
    }
}
