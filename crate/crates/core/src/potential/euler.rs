use super::{FieldError, PlanarField, SystemDescriptor};
use crate::scalar::{c, Real};

/// Two fixed centers of mass `mass` each at `(±separation, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerSystem<T> {
    mass: T,
    separation: T,
    band: T,
}

impl<T: Real> EulerSystem<T> {
    pub fn new(mass: T, separation: T) -> Result<Self, FieldError> {
        if !(mass > T::zero()) {
            return Err(FieldError::Parameter("mass must be positive"));
        }
        if !(separation > T::zero()) {
            return Err(FieldError::Parameter("separation must be positive"));
        }
        Ok(Self { mass, separation, band: c(1e-8) })
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn separation(&self) -> T {
        self.separation
    }

    fn offsets(&self, p: [T; 2]) -> Result<([T; 2], T, [T; 2], T), FieldError> {
        let a = [p[0] + self.separation, p[1]];
        let b = [p[0] - self.separation, p[1]];
        let ra = a[0].hypot(a[1]);
        let rb = b[0].hypot(b[1]);
        let lim = self.band * self.separation;
        if ra <= lim || rb <= lim {
            return Err(FieldError::OnSource { distance: ra.min(rb).as_f64() });
        }
        Ok((a, ra, b, rb))
    }

    /// U(p) = -M/‖p + ρe₁‖ - M/‖p - ρe₁‖.
    pub fn potential(&self, p: [T; 2]) -> Result<T, FieldError> {
        let (_, ra, _, rb) = self.offsets(p)?;
        Ok(-self.mass / ra - self.mass / rb)
    }

    /// Acceleration -∇U.
    pub fn force(&self, p: [T; 2]) -> Result<[T; 2], FieldError> {
        let (a, ra, b, rb) = self.offsets(p)?;
        let wa = -self.mass / (ra * ra * ra);
        let wb = -self.mass / (rb * rb * rb);
        Ok([wa * a[0] + wb * b[0], wa * a[1] + wb * b[1]])
    }

    /// Energy of the explicit near-center launch: position (ρ+ε, 0), speed √(M/ε)
    /// for unit separation, E = -(M/2ε)(1 + 2ε/(2+ε)).
    pub fn near_launch_energy(mass: T, eps: T) -> T {
        let two = c::<T>(2.0);
        -(mass / (two * eps)) * (T::one() + two * eps / (two + eps))
    }
}

impl<T: Real> PlanarField<T> for EulerSystem<T> {
    fn potential_xz(&self, p: [T; 2]) -> Result<T, FieldError> {
        self.potential(p)
    }

    fn accel_xz(&self, p: [T; 2]) -> Result<[T; 2], FieldError> {
        self.force(p)
    }

    fn source_distance_xz(&self, p: [T; 2]) -> T {
        let a = (p[0] + self.separation).hypot(p[1]);
        let b = (p[0] - self.separation).hypot(p[1]);
        a.min(b)
    }

    fn collision_radius(&self) -> T {
        self.band * self.separation
    }

    fn total_mass(&self) -> T {
        self.mass + self.mass
    }

    fn extent(&self) -> T {
        self.separation
    }

    fn with_extent(&self, rho: T) -> Self {
        let mut s = *self;
        s.separation = rho;
        s
    }

    fn with_mass_factor(&self, factor: T) -> Self {
        let mut s = *self;
        s.mass = s.mass * factor;
        s
    }

    fn stiffness_bound(&self, r_hill: T) -> T {
        let d = self.separation + r_hill;
        (self.mass + self.mass) / (d * d * d)
    }

    fn axis_sources(&self) -> Vec<T> {
        vec![-self.separation, self.separation]
    }

    fn descriptor(&self) -> SystemDescriptor {
        SystemDescriptor {
            kind: "euler".into(),
            radius: self.separation.as_f64(),
            mass: self.mass.as_f64(),
            density: f64::NAN,
            center: [0.0; 3],
            convention: "mass".into(),
        }
    }
}
