use super::model::Reduced;
use crate::potential::{FieldError, RingSystem};
use crate::roots::{brent, RootError};
use crate::scalar::{c, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircularOrbit<T> {
    pub radius: T,
    pub speed: T,
    pub period: T,
    /// Angular momentum r v.
    pub keff: T,
    /// ∂²V̄/∂r² and ∂²V̄/∂z² at the equilibrium of the reduced system.
    pub hessian: [T; 2],
    pub stable: bool,
}

/// ∂²V̄/∂r² at (r, 0) for the circular angular momentum, i.e. 3V_r/r + V_rr,
/// with V_rr from fourth-order central differences of the analytic force.
pub fn stability_function<T: Real>(ring: &RingSystem<T>, r: T) -> Result<T, FieldError> {
    let vr = |x: T| ring.eval_rz(x, T::zero()).map(|e| -e.accel_r);
    let h = (r - ring.radius()).abs().min(r) * c(1e-3);
    let vrr =
        (-vr(r + h + h)? + c::<T>(8.0) * vr(r + h)? - c::<T>(8.0) * vr(r - h)? + vr(r - h - h)?) / (c::<T>(12.0) * h);
    Ok(c::<T>(3.0) * vr(r)? / r + vrr)
}

/// Horizontal circular orbit of radius `r` around the axis.
pub fn circular_orbit<T: Real>(ring: &RingSystem<T>, r: T) -> Result<CircularOrbit<T>, FieldError> {
    if !(r > ring.radius()) {
        return Err(FieldError::Parameter("the force is repulsive inside the circle; no circular orbit"));
    }
    let ev = ring.eval_rz(r, T::zero())?;
    let fr = -ev.accel_r;
    if !(fr > T::zero()) {
        return Err(FieldError::Parameter("the force is repulsive here; no circular orbit"));
    }
    let speed = (r * fr).sqrt();
    let keff = r * speed;
    let red = Reduced::new(ring.translate([-ring.center()[0], -ring.center()[1], T::zero()]), keff)?;
    let vzz = red.ring().vertical_stiffness(r, T::zero())?;
    let vrr = stability_function(ring, r)?;
    Ok(CircularOrbit {
        radius: r,
        speed,
        period: T::TAU() * r / speed,
        keff,
        hessian: [vrr, vzz],
        stable: vrr > T::zero() && vzz > T::zero(),
    })
}

/// Radius r₀ beyond which horizontal circular orbits are stable.
pub fn stability_radius<T: Real>(ring: &RingSystem<T>, xtol: T) -> Result<T, RootError> {
    let rho = ring.radius();
    let f = |r: T| stability_function(ring, r);
    // unstable next to the circle, Kepler-stable far away
    let mut a = rho * c(1.001);
    let mut fa = f(a).map_err(|_| RootError::Eval { x: a.as_f64() })?;
    let mut b = a;
    for k in 1..200 {
        b = rho * (T::one() + c::<T>(0.001) * c::<T>(1.25).powi(k));
        let fb = f(b).map_err(|_| RootError::Eval { x: b.as_f64() })?;
        if (fa > T::zero()) != (fb > T::zero()) {
            break;
        }
        a = b;
        fa = fb;
    }
    brent(f, a, b, xtol)
}
