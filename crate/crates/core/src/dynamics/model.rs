//! Right-hand sides: vertical-plane, full spatial and reduced cylindrical systems.

use serde::{Deserialize, Serialize};

use crate::potential::{FieldError, PlanarField, RingSystem};
use crate::scalar::{c, Real};

/// Scalar quantities event functions are built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    X,
    Z,
    Vx,
    Vz,
    /// Euclidean norm of the position.
    Radius,
    /// Distance to the source set.
    SourceDistance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Planar,
    Spatial,
    Reduced,
}

impl TraceKind {
    pub fn header(self) -> &'static [&'static str] {
        match self {
            TraceKind::Planar => &["t", "x", "z", "vx", "vz", "E"],
            TraceKind::Spatial => &["t", "x", "y", "z", "vx", "vy", "vz", "E"],
            TraceKind::Reduced => &["t", "r", "z", "vr", "vz", "phi", "E"],
        }
    }
}

pub trait Model<T: Real, const N: usize> {
    fn rhs(&self, t: T, y: &[T; N]) -> Result<[T; N], FieldError>;
    fn energy(&self, y: &[T; N]) -> Result<T, FieldError>;
    fn observe(&self, obs: Observable, y: &[T; N]) -> T;
    fn collision_radius(&self) -> T;
    fn kind(&self) -> TraceKind;
    /// φ̇ for models carrying an ignorable angle.
    fn angular_rate(&self, _y: &[T; N]) -> Option<T> {
        None
    }
}

/// (x, z, ẋ, ż) in a vertical plane through the axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarState<T> {
    pub x: T,
    pub z: T,
    pub vx: T,
    pub vz: T,
}

impl<T: Real> PlanarState<T> {
    pub fn new(x: T, z: T, vx: T, vz: T) -> Self {
        Self { x, z, vx, vz }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.x, self.z, self.vx, self.vz]
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self { x: a[0], z: a[1], vx: a[2], vz: a[3] }
    }
}

/// (r, z, ṙ, ż) with constant angular momentum `keff` and angle `phi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedState<T> {
    pub r: T,
    pub z: T,
    pub vr: T,
    pub vz: T,
    pub phi: T,
    pub keff: T,
}

impl<T: Real> ReducedState<T> {
    pub fn to_array(self) -> [T; 4] {
        [self.r, self.z, self.vr, self.vz]
    }
}

/// Motion in the plane y = 0 (ring) or the two-center plane.
#[derive(Clone, Copy, Debug)]
pub struct Planar<F>(pub F);

impl<T: Real, F: PlanarField<T>> Model<T, 4> for Planar<F> {
    #[inline]
    fn rhs(&self, _t: T, y: &[T; 4]) -> Result<[T; 4], FieldError> {
        let a = self.0.accel_xz([y[0], y[1]])?;
        Ok([y[2], y[3], a[0], a[1]])
    }

    fn energy(&self, y: &[T; 4]) -> Result<T, FieldError> {
        let v = self.0.potential_xz([y[0], y[1]])?;
        Ok(c::<T>(0.5) * (y[2] * y[2] + y[3] * y[3]) + v)
    }

    fn observe(&self, obs: Observable, y: &[T; 4]) -> T {
        match obs {
            Observable::X => y[0],
            Observable::Z => y[1],
            Observable::Vx => y[2],
            Observable::Vz => y[3],
            Observable::Radius => y[0].hypot(y[1]),
            Observable::SourceDistance => self.0.source_distance_xz([y[0], y[1]]),
        }
    }

    fn collision_radius(&self) -> T {
        self.0.collision_radius()
    }

    fn kind(&self) -> TraceKind {
        TraceKind::Planar
    }
}

/// Full three-dimensional motion around a ring.
#[derive(Clone, Copy, Debug)]
pub struct Spatial<T>(pub RingSystem<T>);

impl<T: Real> Model<T, 6> for Spatial<T> {
    #[inline]
    fn rhs(&self, _t: T, y: &[T; 6]) -> Result<[T; 6], FieldError> {
        let a = self.0.force([y[0], y[1], y[2]])?;
        Ok([y[3], y[4], y[5], a[0], a[1], a[2]])
    }

    fn energy(&self, y: &[T; 6]) -> Result<T, FieldError> {
        let v = self.0.potential([y[0], y[1], y[2]])?;
        Ok(c::<T>(0.5) * (y[3] * y[3] + y[4] * y[4] + y[5] * y[5]) + v)
    }

    fn observe(&self, obs: Observable, y: &[T; 6]) -> T {
        match obs {
            Observable::X => y[0],
            Observable::Z => y[2],
            Observable::Vx => y[3],
            Observable::Vz => y[5],
            Observable::Radius => (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt(),
            Observable::SourceDistance => self.0.distance([y[0], y[1], y[2]]),
        }
    }

    fn collision_radius(&self) -> T {
        PlanarField::collision_radius(&self.0)
    }

    fn kind(&self) -> TraceKind {
        TraceKind::Spatial
    }
}

/// Reduced system in the meridian half-plane:
/// ```text
/// r̈ = K²/r³ - ∂V/∂r,   z̈ = -∂V/∂z,   φ̇ = K/r²
/// ```
#[derive(Clone, Copy, Debug)]
pub struct Reduced<T> {
    ring: RingSystem<T>,
    keff: T,
}

impl<T: Real> Reduced<T> {
    pub fn new(ring: RingSystem<T>, keff: T) -> Result<Self, FieldError> {
        let ctr = ring.center();
        if ctr[0] != T::zero() || ctr[1] != T::zero() {
            return Err(FieldError::Parameter("reduction needs the ring axis on the z-axis"));
        }
        Ok(Self { ring, keff })
    }

    pub fn ring(&self) -> &RingSystem<T> {
        &self.ring
    }

    pub fn keff(&self) -> T {
        self.keff
    }

    /// Effective potential V̄ = K²/(2r²) + V(r, 0, z).
    pub fn effective_potential(&self, r: T, z: T) -> Result<T, FieldError> {
        if !(r > T::zero()) {
            return Err(FieldError::Parameter("centrifugal singularity at r = 0"));
        }
        let v = self.ring.eval_rz(r, z - self.ring.center()[2])?.potential;
        Ok(self.keff * self.keff / (c::<T>(2.0) * r * r) + v)
    }
}

impl<T: Real> Model<T, 4> for Reduced<T> {
    #[inline]
    fn rhs(&self, _t: T, y: &[T; 4]) -> Result<[T; 4], FieldError> {
        let r = y[0];
        if !(r > T::zero()) {
            return Err(FieldError::Parameter("centrifugal singularity at r = 0"));
        }
        let ev = self.ring.eval_rz(r, y[1] - self.ring.center()[2])?;
        let cf = self.keff * self.keff / (r * r * r);
        Ok([y[2], y[3], cf + ev.accel_r, ev.accel_z])
    }

    fn energy(&self, y: &[T; 4]) -> Result<T, FieldError> {
        Ok(c::<T>(0.5) * (y[2] * y[2] + y[3] * y[3]) + self.effective_potential(y[0], y[1])?)
    }

    fn observe(&self, obs: Observable, y: &[T; 4]) -> T {
        match obs {
            Observable::X => y[0],
            Observable::Z => y[1],
            Observable::Vx => y[2],
            Observable::Vz => y[3],
            Observable::Radius => y[0].hypot(y[1]),
            Observable::SourceDistance => (y[0] - self.ring.radius()).hypot(y[1] - self.ring.center()[2]),
        }
    }

    fn collision_radius(&self) -> T {
        PlanarField::collision_radius(&self.ring)
    }

    fn kind(&self) -> TraceKind {
        TraceKind::Reduced
    }

    fn angular_rate(&self, y: &[T; 4]) -> Option<T> {
        Some(self.keff / (y[0] * y[0]))
    }
}

/// The reduced system with φ carried as a fifth state component. Only used as
/// an independent check of the quadrature of φ̇.
#[derive(Clone, Copy, Debug)]
pub struct ReducedWithAngle<T>(pub Reduced<T>);

impl<T: Real> Model<T, 5> for ReducedWithAngle<T> {
    fn rhs(&self, t: T, y: &[T; 5]) -> Result<[T; 5], FieldError> {
        let d = self.0.rhs(t, &[y[0], y[1], y[2], y[3]])?;
        Ok([d[0], d[1], d[2], d[3], self.0.keff / (y[0] * y[0])])
    }

    fn energy(&self, y: &[T; 5]) -> Result<T, FieldError> {
        self.0.energy(&[y[0], y[1], y[2], y[3]])
    }

    fn observe(&self, obs: Observable, y: &[T; 5]) -> T {
        self.0.observe(obs, &[y[0], y[1], y[2], y[3]])
    }

    fn collision_radius(&self) -> T {
        self.0.collision_radius()
    }

    fn kind(&self) -> TraceKind {
        TraceKind::Reduced
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_acceleration_opposes_height() {
        let m = Planar(RingSystem::new(1.0, 1.0).unwrap());
        for &(x, z) in &[(0.3, 0.2), (1.5, -0.4), (-2.0, 1.0), (0.99, -0.01)] {
            let d = m.rhs(0.0, &[x, z, 0.0, 0.0]).unwrap();
            assert!(d[3] * z < 0.0);
        }
    }

    #[test]
    fn reduced_without_momentum_is_planar() {
        let ring = RingSystem::new(1.0, 2.0).unwrap();
        let p = Planar(ring);
        let r = Reduced::new(ring, 0.0).unwrap();
        let y = [1.7, 0.3, 0.1, -0.2];
        assert_eq!(p.rhs(0.0, &y).unwrap(), r.rhs(0.0, &y).unwrap());
    }

    #[test]
    fn reduced_rejects_axis() {
        let r = Reduced::new(RingSystem::new(1.0, 1.0).unwrap(), 0.5).unwrap();
        assert!(r.rhs(0.0, &[0.0, 0.1, 0.0, 0.0]).is_err());
        let off = RingSystem::new(1.0, 1.0).unwrap().translate([1.0, 0.0, 0.0]);
        assert!(Reduced::new(off, 0.5).is_err());
    }
}
