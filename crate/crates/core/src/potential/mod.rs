//! Gravitational fields of the homogeneous circle, the two-center problem and
//! the comparison fields used by the searches. G = 1 throughout.

mod euler;
mod oracle;
mod ring;
mod wire;

pub use euler::EulerSystem;
pub use oracle::{oracle_force, oracle_nodes, oracle_potential};
pub use ring::{RingEval, RingSystem};
pub use wire::{measure_wire_constant, wire_force, WireLimit, WIRE_CONSTANT_CLAIMED};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("point on source (distance {distance:e} inside collision band)")]
    OnSource { distance: f64 },
    #[error("singular point of the limit field")]
    Singular,
    #[error("invalid system parameter: {0}")]
    Parameter(&'static str),
}

/// A point where a field was evaluated, with its distance to the source set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldPoint<T, const D: usize> {
    pub position: [T; D],
    pub distance: T,
}

/// Serializable description of a system, written into orbit metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemDescriptor {
    pub kind: String,
    #[serde(serialize_with = "crate::io::sig17")]
    pub radius: f64,
    #[serde(serialize_with = "crate::io::sig17")]
    pub mass: f64,
    /// NaN (written as null) for systems without a linear density.
    #[serde(serialize_with = "crate::io::sig17", deserialize_with = "crate::io::f64_or_nan")]
    pub density: f64,
    #[serde(serialize_with = "crate::io::sig17_vec")]
    pub center: [f64; 3],
    /// Which quantity the search held fixed: "mass" or "density".
    pub convention: String,
}

/// A field restricted to a vertical plane through its symmetry axis.
///
/// Planar coordinates are `(x, z)`; for the two-center problem `z` plays the
/// role of the second planar coordinate.
pub trait PlanarField<T: Real>: Send + Sync {
    fn potential_xz(&self, p: [T; 2]) -> Result<T, FieldError>;
    fn accel_xz(&self, p: [T; 2]) -> Result<[T; 2], FieldError>;
    /// Distance from `p` to the (planar trace of the) source set.
    fn source_distance_xz(&self, p: [T; 2]) -> T;
    /// Radius inside which evaluation is refused.
    fn collision_radius(&self) -> T;
    /// Total attracting mass (the monopole seen from far away).
    fn total_mass(&self) -> T;
    /// Size of the source, ρ.
    fn extent(&self) -> T;
    /// Same kind of system with source size `rho`, mass parameters unchanged.
    fn with_extent(&self, rho: T) -> Self
    where
        Self: Sized;
    /// Same system with every mass parameter multiplied by `factor`.
    fn with_mass_factor(&self, factor: T) -> Self
    where
        Self: Sized;
    /// Lower bound for the vertical stiffness inside the ball of radius `r_hill`.
    fn stiffness_bound(&self, r_hill: T) -> T;
    /// Positions of the source on the planar x-axis (singular points).
    fn axis_sources(&self) -> Vec<T>;
    fn descriptor(&self) -> SystemDescriptor;
}

/// Point mass at the origin; the Kepler limit of both systems.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointMass<T> {
    pub mass: T,
}

impl<T: Real> PlanarField<T> for PointMass<T> {
    fn potential_xz(&self, p: [T; 2]) -> Result<T, FieldError> {
        let r = p[0].hypot(p[1]);
        if r <= T::zero() {
            return Err(FieldError::OnSource { distance: 0.0 });
        }
        Ok(-self.mass / r)
    }

    fn accel_xz(&self, p: [T; 2]) -> Result<[T; 2], FieldError> {
        let r = p[0].hypot(p[1]);
        if r <= T::zero() {
            return Err(FieldError::OnSource { distance: 0.0 });
        }
        let f = -self.mass / (r * r * r);
        Ok([f * p[0], f * p[1]])
    }

    fn source_distance_xz(&self, p: [T; 2]) -> T {
        p[0].hypot(p[1])
    }

    fn collision_radius(&self) -> T {
        T::min_positive_value()
    }

    fn total_mass(&self) -> T {
        self.mass
    }

    fn extent(&self) -> T {
        T::zero()
    }

    fn with_extent(&self, _rho: T) -> Self {
        *self
    }

    fn with_mass_factor(&self, factor: T) -> Self {
        PointMass { mass: self.mass * factor }
    }

    fn stiffness_bound(&self, r_hill: T) -> T {
        self.mass / (r_hill * r_hill * r_hill)
    }

    fn axis_sources(&self) -> Vec<T> {
        vec![T::zero()]
    }

    fn descriptor(&self) -> SystemDescriptor {
        let m = self.mass.as_f64();
        SystemDescriptor {
            kind: "point".into(),
            radius: 0.0,
            mass: m,
            density: f64::NAN,
            center: [0.0; 3],
            convention: "mass".into(),
        }
    }
}

/// Residual of the perturbation expansion `V(p; ε) = -M/‖p‖ + ε² f(p, ε)`:
/// returns `|V(p; ε) + M/‖p‖| / ε²` for a ring of radius ε.
pub fn perturbation_residual<T: Real>(mass: T, p: [T; 3], eps: T) -> Result<T, FieldError> {
    let kepler = -mass / (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    if eps == T::zero() {
        return Ok(T::zero());
    }
    let sys = RingSystem::new(eps.abs(), mass)?;
    Ok((sys.potential(p)? - kepler).abs() / (eps * eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_kepler() {
        let pm = PointMass { mass: 2.0f64 };
        assert_eq!(pm.potential_xz([0.0, 4.0]).unwrap(), -0.5);
        let a = pm.accel_xz([2.0, 0.0]).unwrap();
        assert!((a[0] + 0.5).abs() < 1e-16 && a[1] == 0.0);
        assert!(pm.potential_xz([0.0, 0.0]).is_err());
    }

    #[test]
    fn perturbation_ratio_converges() {
        let p = [2.0, 0.0, 0.0];
        assert_eq!(perturbation_residual(1.0, p, 0.0).unwrap(), 0.0);
        let r: Vec<f64> = [1e-1, 1e-2, 1e-3].iter().map(|&e| perturbation_residual(1.0, p, e).unwrap()).collect();
        // f(p,0) for a ring in its own plane: M/(4|p|³) = 1/32
        assert!((r[2] - 1.0 / 32.0).abs() < 1e-6, "{r:?}");
        assert!((r[1] - r[2]).abs() < (r[0] - r[1]).abs());
    }

    #[test]
    fn potential_even_in_eps() {
        let p = [1.3, 0.4, -0.7];
        let a = perturbation_residual(1.0, p, 0.2).unwrap();
        let b = perturbation_residual(1.0, p, -0.2).unwrap();
        assert_eq!(a, b);
    }
}
