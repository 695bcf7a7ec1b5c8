use serde::Serialize;

use super::VerifyError;
use crate::potential::PlanarField;
use crate::roots::brent;
use crate::scalar::{c, Real};

/// Size of the region `{V ≤ δ}` and the return-time bound derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HillData {
    #[serde(serialize_with = "crate::io::sig17")]
    pub delta: f64,
    #[serde(serialize_with = "crate::io::sig17")]
    pub r_delta: f64,
    /// Lower bound of the vertical stiffness inside the ball of radius R_δ.
    #[serde(serialize_with = "crate::io::sig17")]
    pub a_coef: f64,
    /// Λ_A = 2/min{1, A} + 1.
    #[serde(serialize_with = "crate::io::sig17")]
    pub lambda: f64,
    /// T_δ = 2Λ_A.
    #[serde(serialize_with = "crate::io::sig17")]
    pub t_delta: f64,
    /// The sampled sublevel set stayed inside the ball.
    pub validated: bool,
}

pub fn return_time_bound(a: f64) -> (f64, f64) {
    let lambda = 2.0 / a.min(1.0) + 1.0;
    (lambda, 2.0 * lambda)
}

/// R_δ from `V(x, 0) = δ` on the positive axis beyond the source, then a
/// check that no sampled point outside the ball lies in `{V ≤ δ}`.
pub fn hill_radius<T: Real, F: PlanarField<T>>(field: &F, delta: T) -> Result<HillData, VerifyError> {
    if !(delta < T::zero()) {
        return Err(VerifyError::Unbounded(delta.as_f64()));
    }
    let outer = field.axis_sources().into_iter().fold(T::zero(), T::max);
    let scale = field.extent().max(T::min_positive_value().sqrt());
    let g = |x: T| field.potential_xz([x, T::zero()]).map(|v| v - delta);
    // just outside the source V is below δ unless δ is very deep
    let mut lo = outer + scale * c(1e-6);
    while g(lo).map_or(true, |v| v > T::zero()) {
        let next = outer + (lo - outer) * c(0.01);
        if next <= outer || next == lo {
            return Err(VerifyError::Unbounded(delta.as_f64()));
        }
        lo = next;
    }
    let mut hi = outer + scale;
    while g(hi).map_err(|_| VerifyError::Unbounded(delta.as_f64()))? <= T::zero() {
        hi = hi + hi;
        if !hi.is_finite() {
            return Err(VerifyError::Unbounded(delta.as_f64()));
        }
    }
    let r = brent(g, lo, hi, hi * c(4.0) * T::epsilon()).map_err(|_| VerifyError::Unbounded(delta.as_f64()))?;

    let mut validated = true;
    let n = 720;
    for k in 0..n {
        let th = T::TAU() * T::from_usize(k).unwrap() / T::from_usize(n).unwrap();
        for f in [1.0 + 1e-9, 1.01, 1.1, 1.5, 2.0, 4.0] {
            let rr = r * c(f);
            if let Ok(v) = field.potential_xz([rr * th.cos(), rr * th.sin()]) {
                if v < delta - delta.abs() * c(1e-12) {
                    validated = false;
                }
            }
        }
    }
    let a = field.stiffness_bound(r).as_f64();
    let (lambda, t_delta) = return_time_bound(a);
    Ok(HillData { delta: delta.as_f64(), r_delta: r.as_f64(), a_coef: a, lambda, t_delta, validated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{EulerSystem, PointMass, RingSystem};

    #[test]
    fn kepler_closed_form() {
        for d in [-0.1, -1.0, -3.0] {
            let h = hill_radius(&PointMass { mass: 2.0 }, d).unwrap();
            assert!((h.r_delta - 2.0 / -d).abs() < 1e-13 * h.r_delta);
            assert!(h.validated);
        }
    }

    #[test]
    fn ring_level_matches() {
        let ring = RingSystem::<f64>::new(1.0, std::f64::consts::TAU).unwrap();
        let h = hill_radius(&ring, -1.0).unwrap();
        let v = ring.potential([h.r_delta, 0.0, 0.0]).unwrap();
        assert!((v + 1.0).abs() < 1e-10);
        assert!(h.validated);
        assert!((h.a_coef - std::f64::consts::TAU / (1.0 + h.r_delta).powi(3)).abs() < 1e-15);
        assert!((h.t_delta - 2.0 * (1.0 + 2.0 / h.a_coef.min(1.0))).abs() < 1e-12);
    }

    #[test]
    fn euler_bound() {
        let e = EulerSystem::<f64>::new(1.0, 1.0).unwrap();
        for d in [-0.5, -1.0, -2.0] {
            let h = hill_radius(&e, d).unwrap();
            assert!(h.r_delta <= 2.0 / -d + 1.0);
        }
    }

    #[test]
    fn positive_energy_rejected() {
        let ring = RingSystem::<f64>::new(1.0, 1.0).unwrap();
        assert!(hill_radius(&ring, 0.0).is_err());
    }

    #[test]
    fn bound_monotone_in_energy() {
        let ring = RingSystem::<f64>::new(1.0, 1.0).unwrap();
        let mut last = 0.0;
        for d in [-2.0, -1.0, -0.5, -0.25, -0.1] {
            let h = hill_radius(&ring, d).unwrap();
            assert!(h.t_delta >= last);
            last = h.t_delta;
        }
    }
}
