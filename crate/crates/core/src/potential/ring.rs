use super::{FieldError, PlanarField, SystemDescriptor};
use crate::elliptic;
use crate::scalar::{c, Real};

/// Homogeneous circle of radius `radius` and mass `mass`, lying in the plane
/// `z = center[2]` with axis parallel to the z-axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingSystem<T> {
    radius: T,
    mass: T,
    center: [T; 3],
    /// Collision band as a fraction of the radius.
    band: T,
    /// "mass" or "density": which parameter a search holds fixed.
    density_fixed: bool,
}

/// Potential and the cylindrical components of the acceleration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingEval<T> {
    pub potential: T,
    pub accel_r: T,
    pub accel_z: T,
    /// Distance to the circle.
    pub distance: T,
    /// Inside the zone where the quadrature oracle must escalate its node count.
    pub near_source: bool,
}

impl<T: Real> RingSystem<T> {
    pub const DEFAULT_BAND: f64 = 1e-8;

    pub fn new(radius: T, mass: T) -> Result<Self, FieldError> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(FieldError::Parameter("radius must be positive"));
        }
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(FieldError::Parameter("mass must be positive"));
        }
        Ok(Self { radius, mass, center: [T::zero(); 3], band: c(Self::DEFAULT_BAND), density_fixed: false })
    }

    /// Builds the system from its linear density, M = 2πρλ.
    pub fn from_density(radius: T, density: T) -> Result<Self, FieldError> {
        let mut s = Self::new(radius, T::TAU() * radius * density)?;
        s.density_fixed = true;
        Ok(s)
    }

    pub fn with_band(mut self, band: T) -> Self {
        self.band = band;
        self
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn density(&self) -> T {
        self.mass / (T::TAU() * self.radius)
    }

    pub fn center(&self) -> [T; 3] {
        self.center
    }

    pub fn density_fixed(&self) -> bool {
        self.density_fixed
    }

    /// W(s) = V(s - q).
    pub fn translate(&self, q: [T; 3]) -> Self {
        let mut s = *self;
        for i in 0..3 {
            s.center[i] += q[i];
        }
        s
    }

    /// Same center, radius and mass multiplied by the given factors.
    pub fn scaled(&self, length: T, mass: T) -> Self {
        let mut s = *self;
        s.radius = s.radius * length;
        s.mass = s.mass * mass;
        for x in s.center.iter_mut() {
            *x = *x * length;
        }
        s
    }

    /// Distance from a 3D point to the circle.
    pub fn distance(&self, p: [T; 3]) -> T {
        let (r, z) = self.cylindrical(p);
        (r - self.radius).hypot(z)
    }

    fn cylindrical(&self, p: [T; 3]) -> (T, T) {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        (dx.hypot(dy), p[2] - self.center[2])
    }

    /// Field at cylindrical coordinates relative to the center, `r >= 0`.
    ///
    /// ```text
    /// d± = sqrt((r ± ρ)² + z²),  m = 4rρ/d+²
    /// V   = -2M K / (π d+)
    /// a_r = -M/(π d+) [4ρ (K-E)/m / d+² - 2(ρ-r) E / d-²]
    /// a_z = -2M z E / (π d+ d-²)
    /// ```
    pub fn eval_rz(&self, r: T, z: T) -> Result<RingEval<T>, FieldError> {
        let rho = self.radius;
        let dp = (r + rho).hypot(z);
        let dm = (r - rho).hypot(z);
        if dm <= self.band * rho {
            return Err(FieldError::OnSource { distance: dm.as_f64() });
        }
        let m = c::<T>(4.0) * r * rho / (dp * dp);
        let ell = elliptic::complete(m, dm / dp);
        let pi = T::PI();
        let dm2 = dm * dm;
        let potential = -c::<T>(2.0) * self.mass * ell.k / (pi * dp);
        let accel_r =
            -self.mass / (pi * dp) * (c::<T>(4.0) * rho * ell.d / (dp * dp) - c::<T>(2.0) * (rho - r) * ell.e / dm2);
        let accel_z = -c::<T>(2.0) * self.mass * z * ell.e / (pi * dp * dm2);
        Ok(RingEval { potential, accel_r, accel_z, distance: dm, near_source: dm < c::<T>(1e-2) * rho })
    }

    pub fn eval(&self, p: [T; 3]) -> Result<RingEval<T>, FieldError> {
        let (r, z) = self.cylindrical(p);
        self.eval_rz(r, z)
    }

    pub fn potential(&self, p: [T; 3]) -> Result<T, FieldError> {
        Ok(self.eval(p)?.potential)
    }

    /// Acceleration -∇V.
    pub fn force(&self, p: [T; 3]) -> Result<[T; 3], FieldError> {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let r = dx.hypot(dy);
        let ev = self.eval_rz(r, p[2] - self.center[2])?;
        if r > T::zero() {
            Ok([ev.accel_r * dx / r, ev.accel_r * dy / r, ev.accel_z])
        } else {
            Ok([T::zero(), T::zero(), ev.accel_z])
        }
    }

    /// λ ∫ du/‖p-u‖³, the factor in z̈ = -z (...) on the source plane's normal.
    pub fn vertical_stiffness(&self, r: T, z: T) -> Result<T, FieldError> {
        let rho = self.radius;
        let dp = (r + rho).hypot(z);
        let dm = (r - rho).hypot(z);
        if dm <= self.band * rho {
            return Err(FieldError::OnSource { distance: dm.as_f64() });
        }
        let ell = elliptic::complete(c::<T>(4.0) * r * rho / (dp * dp), dm / dp);
        Ok(c::<T>(2.0) * self.mass * ell.e / (T::PI() * dp * dm * dm))
    }

    /// Relative residuals of the four scaling identities at `p` for factor `k`:
    /// `V(p,ρ,kM) = kV`, `V(kp,kρ,M) = V/k`, `∇V(kp,kρ,M) = ∇V/k²`, `∇V(p,ρ,kM) = k∇V`.
    pub fn scaling_residuals(&self, p: [T; 3], k: T) -> Result<[T; 4], FieldError> {
        let v = self.potential(p)?;
        let g = self.force(p)?;
        let heavy = self.scaled(T::one(), k);
        let big = self.scaled(k, T::one());
        let kp = [p[0] * k, p[1] * k, p[2] * k];
        let v_mass = heavy.potential(p)?;
        let v_len = big.potential(kp)?;
        let g_len = big.force(kp)?;
        let g_mass = heavy.force(p)?;
        let gn = g.iter().fold(T::zero(), |a, x| a.max(x.abs()));
        let gscale = if gn > T::zero() { gn } else { T::one() };
        let mut r = [T::zero(); 4];
        r[0] = (v_mass - k * v).abs() / (k * v).abs();
        r[1] = (v_len - v / k).abs() / (v / k).abs();
        for i in 0..3 {
            r[2] = r[2].max((g_len[i] - g[i] / (k * k)).abs() / (gscale / (k * k)));
            r[3] = r[3].max((g_mass[i] - k * g[i]).abs() / (gscale * k));
        }
        Ok(r)
    }

    /// Largest length-scaling residual, `max(|V(kp,kρ,M) - V/k|, |∇V(kp,kρ,M) - ∇V/k²|)` relative.
    pub fn scale_check(&self, p: [T; 3], k: T) -> Result<T, FieldError> {
        let r = self.scaling_residuals(p, k)?;
        Ok(r[1].max(r[2]))
    }

    fn planar(&self, p: [T; 2]) -> (T, T, T) {
        let dx = p[0] - self.center[0];
        (dx.abs(), p[1] - self.center[2], dx.signum())
    }
}

impl<T: Real> PlanarField<T> for RingSystem<T> {
    fn potential_xz(&self, p: [T; 2]) -> Result<T, FieldError> {
        let (r, z, _) = self.planar(p);
        Ok(self.eval_rz(r, z)?.potential)
    }

    fn accel_xz(&self, p: [T; 2]) -> Result<[T; 2], FieldError> {
        let (r, z, s) = self.planar(p);
        let ev = self.eval_rz(r, z)?;
        Ok([s * ev.accel_r, ev.accel_z])
    }

    fn source_distance_xz(&self, p: [T; 2]) -> T {
        let (r, z, _) = self.planar(p);
        (r - self.radius).hypot(z)
    }

    fn collision_radius(&self) -> T {
        self.band * self.radius
    }

    fn total_mass(&self) -> T {
        self.mass
    }

    fn extent(&self) -> T {
        self.radius
    }

    fn with_extent(&self, rho: T) -> Self {
        let mut s = *self;
        s.radius = rho;
        s
    }

    fn with_mass_factor(&self, factor: T) -> Self {
        self.scaled(T::one(), factor)
    }

    fn stiffness_bound(&self, r_hill: T) -> T {
        let d = self.radius + r_hill;
        self.mass / (d * d * d)
    }

    fn axis_sources(&self) -> Vec<T> {
        vec![self.center[0] - self.radius, self.center[0] + self.radius]
    }

    fn descriptor(&self) -> SystemDescriptor {
        SystemDescriptor {
            kind: "ring".into(),
            radius: self.radius.as_f64(),
            mass: self.mass.as_f64(),
            density: self.density().as_f64(),
            center: [self.center[0].as_f64(), self.center[1].as_f64(), self.center[2].as_f64()],
            convention: if self.density_fixed { "density" } else { "mass" }.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{oracle_force, oracle_potential};

    fn unit() -> RingSystem<f64> {
        RingSystem::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn axis_values() {
        let s = unit();
        assert!((s.potential([0.0, 0.0, 1.0]).unwrap() + 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s.potential([0.0, 0.0, 0.0]).unwrap() + 1.0).abs() < 1e-15);
        let f = s.force([0.0, 0.0, 1.0]).unwrap();
        assert!(f[0] == 0.0 && f[1] == 0.0);
        assert!((f[2] + 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(s.force([0.0; 3]).unwrap(), [0.0; 3]);
    }

    #[test]
    fn on_source_rejected() {
        let s = unit();
        assert!(matches!(s.potential([1.0, 0.0, 0.0]), Err(FieldError::OnSource { .. })));
        assert!(s.force([0.0, 1.0, 1e-9]).is_err());
        assert!(s.force([0.0, 1.0, 1e-7]).is_ok());
    }

    #[test]
    fn density_roundtrip() {
        let s = RingSystem::<f64>::from_density(3.0, 0.25).unwrap();
        assert!((s.density() - 0.25).abs() < 1e-16);
        assert!((s.mass() - 2.0 * std::f64::consts::PI * 3.0 * 0.25).abs() < 1e-15);
        assert!(RingSystem::<f64>::new(0.0, 1.0).is_err());
    }

    #[test]
    fn matches_quadrature_point() {
        let s = RingSystem::new(1.0, std::f64::consts::TAU).unwrap();
        let p = [2.0, 0.0, 0.0];
        let v = s.potential(p).unwrap();
        let q = oracle_potential(&s, p, 1 << 20);
        assert!(((v - q) / q).abs() < 1e-10);
        let p = [1.5, 0.0, 0.5];
        let f = s.force(p).unwrap();
        let g = oracle_force(&s, p, 1 << 16);
        for i in 0..3 {
            assert!((f[i] - g[i]).abs() < 1e-10 * g[0].abs().max(g[2].abs()));
        }
    }

    #[test]
    fn gradient_matches_differences() {
        let s = unit();
        for &p in &[[0.3, 0.2, 0.5], [2.0, -1.0, 0.3], [0.0, 0.5, -0.2], [1.2, 0.0, 0.1]] {
            let f = s.force(p).unwrap();
            let fmax = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            for i in 0..3 {
                let h = 1e-3;
                let at = |d: f64| {
                    let mut q = p;
                    q[i] += d;
                    s.potential(q).unwrap()
                };
                let g = (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h);
                assert!((f[i] + g).abs() < 1e-7 * fmax, "{p:?} {i}");
            }
        }
    }

    #[test]
    fn symmetries() {
        let s = unit();
        let a = s.potential([0.7, 0.2, 0.4]).unwrap();
        assert_eq!(a, s.potential([0.7, 0.2, -0.4]).unwrap());
        let r = 0.7f64.hypot(0.2);
        let b = s.potential([0.0, r, 0.4]).unwrap();
        assert!((a - b).abs() < 1e-15);
        let fz = s.force([0.4, 0.1, 0.3]).unwrap()[2];
        assert!(fz < 0.0);
        assert!(s.force([0.4, 0.1, -0.3]).unwrap()[2] > 0.0);
    }

    #[test]
    fn translation_is_shift() {
        let s = unit();
        let q = [20.0, 0.0, 0.0];
        let w = s.translate(q);
        let p = [0.4, 0.3, -0.2];
        let v = s.potential(p).unwrap();
        let wv = w.potential([p[0] + q[0], p[1], p[2]]).unwrap();
        assert!((v - wv).abs() < 1e-15);
        assert_eq!(s.translate([0.0; 3]), s);
    }

    #[test]
    fn scaling_identity_examples() {
        let s = unit();
        assert!(s.scale_check([3.0, 0.0, 1.0], 1.0).unwrap() == 0.0);
        assert!(s.scale_check([3.0, 0.0, 1.0], 2.0).unwrap() <= 1e-12);
    }

    #[test]
    fn planar_restriction_consistent() {
        let s = unit();
        let a = s.accel_xz([-1.5, 0.3]).unwrap();
        let f = s.force([-1.5, 0.0, 0.3]).unwrap();
        assert!((a[0] - f[0]).abs() < 1e-16 && (a[1] - f[2]).abs() < 1e-16);
    }

    #[test]
    fn single_precision_field() {
        let s = RingSystem::new(1.0f32, 1.0f32).unwrap();
        let v = s.potential([0.0, 0.0, 1.0]).unwrap();
        assert!((v + 0.70710677).abs() < 1e-6);
    }

    proptest::proptest! {
        #[test]
        fn scaling_identities_hold(
            rho in 0.1f64..10.0,
            mass in 0.1f64..10.0,
            r in 0.0f64..5.0,
            th in 0.0f64..std::f64::consts::TAU,
            z in -5.0f64..5.0,
            k in 0.1f64..10.0,
        ) {
            let s = RingSystem::new(rho, mass).unwrap();
            let p = [rho * r * th.cos(), rho * r * th.sin(), rho * z];
            proptest::prop_assume!(s.distance(p) > 1e-3 * rho);
            let res = s.scaling_residuals(p, k).unwrap();
            proptest::prop_assert!(res.iter().all(|&x| x <= 1e-12), "{res:?}");
        }
    }
}
