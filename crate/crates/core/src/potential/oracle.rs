//! Brute-force periodic trapezoid quadrature over the circle. Slow, but
//! independent of the elliptic-integral closed forms.

use super::RingSystem;
use crate::scalar::{c, Real};

/// Node count: 2^16 normally, 2^20 within 1e-2 ρ of the circle.
pub fn oracle_nodes<T: Real>(sys: &RingSystem<T>, p: [T; 3]) -> usize {
    if sys.distance(p) < c::<T>(1e-2) * sys.radius() {
        1 << 20
    } else {
        1 << 16
    }
}

fn node<T: Real>(sys: &RingSystem<T>, j: usize, n: usize) -> [T; 3] {
    let th = T::TAU() * T::from_usize(j).unwrap() / T::from_usize(n).unwrap();
    let ctr = sys.center();
    [ctr[0] + sys.radius() * th.cos(), ctr[1] + sys.radius() * th.sin(), ctr[2]]
}

/// V(p) = -(M/n) Σ 1/‖p - u_j‖.
pub fn oracle_potential<T: Real>(sys: &RingSystem<T>, p: [T; 3], n: usize) -> T {
    let mut acc = T::zero();
    for j in 0..n {
        let u = node(sys, j, n);
        let d = ((p[0] - u[0]).powi(2) + (p[1] - u[1]).powi(2) + (p[2] - u[2]).powi(2)).sqrt();
        acc += d.recip();
    }
    -sys.mass() * acc / T::from_usize(n).unwrap()
}

/// -∇V(p) = -(M/n) Σ (p - u_j)/‖p - u_j‖³.
pub fn oracle_force<T: Real>(sys: &RingSystem<T>, p: [T; 3], n: usize) -> [T; 3] {
    let mut acc = [T::zero(); 3];
    for j in 0..n {
        let u = node(sys, j, n);
        let d = [p[0] - u[0], p[1] - u[1], p[2] - u[2]];
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        let w = (r * r * r).recip();
        for i in 0..3 {
            acc[i] += d[i] * w;
        }
    }
    let f = -sys.mass() / T::from_usize(n).unwrap();
    [acc[0] * f, acc[1] * f, acc[2] * f]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_point_exact() {
        let s = RingSystem::new(1.0, 1.0).unwrap();
        let v = oracle_potential(&s, [0.0, 0.0, 1.0], 64);
        assert!((v + 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn escalates_near_circle() {
        let s = RingSystem::new(1.0, 1.0).unwrap();
        assert_eq!(oracle_nodes(&s, [1.001, 0.0, 0.0]), 1 << 20);
        assert_eq!(oracle_nodes(&s, [2.0, 0.0, 0.0]), 1 << 16);
    }
}
