use super::{
    continuation, root_near, shoot_symmetric, state_distance, Axis, OrbitClass, OrbitMeta, PeriodicOrbit, SearchConfig,
    SearchError, Symmetry,
};
use crate::dynamics::{integrate_planar, EventKind, PlanarState, PlanarTrace, Until};
use crate::potential::{PlanarField, PointMass, RingSystem};
use crate::scalar::{c, Real};

/// A periodic orbit symmetric about the x-axis, in the target system.
#[derive(Clone, Debug)]
pub struct SymmetricOrbit<T> {
    pub orbit: PeriodicOrbit,
    pub x0: T,
    pub v0: T,
    pub period: T,
    pub eps: T,
    /// One full period integrated from the stored initial state.
    pub trace: PlanarTrace<T>,
    /// x-coordinates where the orbit meets the x-axis, launch point first.
    pub crossings: Vec<T>,
    /// Launch speed in the auxiliary problem where the search ran.
    pub v_aux: T,
}

/// Largest state defect of the reflection symmetry about `axis` centered at
/// time `t_c`: `S(2 t_c - t) = R S(t)` with `R` the reflection composed with
/// time reversal.
pub fn reflection_defect<T: Real>(tr: &PlanarTrace<T>, t_c: T, axis: Axis, n: usize) -> T {
    let (t0, t1) = (tr.start().t, tr.end().t);
    let lo = t0.max(t_c + t_c - t1);
    let hi = t1.min(t_c + t_c - t0);
    let mut worst = T::zero();
    for k in 0..=n {
        let t = lo + (hi - lo) * T::from_usize(k).unwrap() / T::from_usize(n).unwrap();
        let (Some(a), Some(b)) = (tr.state_at(t), tr.state_at(t_c + t_c - t)) else {
            continue;
        };
        let r = match axis {
            Axis::X => [a[0], -a[1], -a[2], a[3]],
            Axis::Z => [-a[0], a[1], a[2], -a[3]],
        };
        worst = worst.max(state_distance(&r, &b));
    }
    worst
}

fn symmetric_root<T: Real, F: PlanarField<T> + Clone>(
    field: &F,
    x: T,
    guess: T,
    cfg: &SearchConfig<T>,
) -> Result<T, SearchError> {
    let f = |v: T| shoot_symmetric(field, x, v, Axis::X, cfg)?.value();
    root_near(f, guess, guess * cfg.window, cfg.scan, cfg.xtol)
}

/// Integrates one period in the target system and collects the x-axis
/// crossings and symmetry tags.
fn finish<T: Real, F: PlanarField<T> + Clone>(
    target: &F,
    x0: T,
    v0: T,
    period: T,
    cfg: &SearchConfig<T>,
) -> Result<(PlanarTrace<T>, T, Vec<T>, Vec<Symmetry>), SearchError> {
    let s0 = PlanarState::new(x0, T::zero(), T::zero(), v0);
    let until = Until::time(period).watching(&[EventKind::ZCrossUp, EventKind::ZCrossDown, EventKind::ZAxisCross]);
    let tr = integrate_planar(target, s0, &until, &cfg.integrator)?;
    if tr.collided() {
        return Err(SearchError::Collided);
    }
    let closure = state_distance(&tr.end().y, &s0.to_array());
    if !(closure <= cfg.closure_tol) {
        return Err(SearchError::Closure { closure: closure.as_f64(), tol: cfg.closure_tol.as_f64() });
    }
    let edge = period * c(1e-9);
    let mut crossings = vec![x0];
    crossings.extend(
        tr.events
            .iter()
            .filter(|e| matches!(e.kind, EventKind::ZCrossUp | EventKind::ZCrossDown))
            .filter(|e| e.t > edge && e.t < period - edge)
            .map(|e| e.state[0]),
    );
    let scale = x0.abs().max(v0.abs());
    let tol = cfg.closure_tol.max(scale * c(1e-10));
    let mut sym = vec![Symmetry::XAxis];
    if let Some(ez) = tr.events.iter().find(|e| e.kind == EventKind::ZAxisCross) {
        if reflection_defect(&tr, ez.t, Axis::Z, 64) <= tol {
            sym = vec![Symmetry::Both];
        }
    }
    Ok((tr, closure, crossings, sym))
}

fn record<T: Real, F: PlanarField<T>>(
    class: OrbitClass,
    target: &F,
    x0: T,
    v0: T,
    period: T,
    closure: T,
    symmetries: Vec<Symmetry>,
    meta: OrbitMeta,
) -> PeriodicOrbit {
    PeriodicOrbit {
        class,
        system: target.descriptor(),
        initial_state: vec![x0.as_f64(), 0.0, 0.0, v0.as_f64()],
        period: period.as_f64(),
        closure_error: closure.as_f64(),
        symmetries,
        metadata: meta,
    }
}

/// Far orbit of a source of size ρ: a symmetric orbit of the same system
/// shrunk to size ερ near the Kepler circle of radius 2, blown up by 1/ε.
pub fn find_far_orbit<T: Real, F: PlanarField<T> + Clone>(
    sys: &F,
    eps: T,
    cfg: &SearchConfig<T>,
) -> Result<SymmetricOrbit<T>, SearchError> {
    if !(eps >= T::zero()) {
        return Err(SearchError::Parameter("epsilon must be non-negative"));
    }
    let m = sys.total_mass();
    let two = c::<T>(2.0);
    let v_kepler = (m / two).sqrt();
    if eps == T::zero() {
        let kepler = PointMass { mass: m };
        let period = T::TAU() * (c::<T>(8.0) / m).sqrt();
        let (trace, closure, crossings, sym) = finish(&kepler, two, v_kepler, period, cfg)?;
        let meta = OrbitMeta { eps: Some(0.0), energy: Some(trace.start().energy.as_f64()), ..Default::default() };
        return Ok(SymmetricOrbit {
            orbit: record(OrbitClass::Far, &kepler, two, v_kepler, period, closure, sym, meta),
            x0: two,
            v0: v_kepler,
            period,
            eps,
            trace,
            crossings,
            v_aux: v_kepler,
        });
    }
    let rho = sys.extent();
    let v = continuation(T::zero(), eps, v_kepler, eps * c(0.5), |e, g| {
        symmetric_root(&sys.with_extent(rho * e), two, g, cfg)
    })?;
    let small = sys.with_extent(rho * eps);
    let shot = shoot_symmetric(&small, two, v, Axis::X, cfg)?;
    let t_half = shot.crossing.as_ref().ok_or(SearchError::Collided)?.t;

    // s(t) = a r(b t), a = 1/ε, b = ε^{3/2}
    let a = T::one() / eps;
    let b = eps * eps.sqrt();
    let (x0, v0, period) = (two * a, v * a * b, (t_half + t_half) / b);
    let (trace, closure, crossings, sym) = finish(sys, x0, v0, period, cfg)?;
    let meta = OrbitMeta {
        eps: Some(eps.as_f64()),
        energy: Some(trace.start().energy.as_f64()),
        convention: Some(sys.descriptor().convention),
        ..Default::default()
    };
    Ok(SymmetricOrbit {
        orbit: record(OrbitClass::Far, sys, x0, v0, period, closure, sym, meta),
        x0,
        v0,
        period,
        eps,
        trace,
        crossings,
        v_aux: v,
    })
}

/// Default launch distance from the wire in the blown-up near problem.
pub const NEAR_LAUNCH: f64 = 0.36;

/// Near orbit: a symmetric orbit launched at distance [`NEAR_LAUNCH`] outside
/// the wire of the circle of radius ρ/ε with the same linear density, scaled
/// down by ε.
pub fn find_near_orbit<T: Real>(
    sys: &RingSystem<T>,
    eps: T,
    cfg: &SearchConfig<T>,
) -> Result<SymmetricOrbit<T>, SearchError> {
    find_near_orbit_from(sys, eps, c(NEAR_LAUNCH), cfg)
}

/// [`find_near_orbit`] with an explicit launch distance `d0` in (1/3, 1).
pub fn find_near_orbit_from<T: Real>(
    sys: &RingSystem<T>,
    eps: T,
    d0: T,
    cfg: &SearchConfig<T>,
) -> Result<SymmetricOrbit<T>, SearchError> {
    if !(eps > T::zero()) {
        return Err(SearchError::Parameter("epsilon must be positive"));
    }
    if !(d0 > T::zero()) {
        return Err(SearchError::Parameter("launch distance must be positive"));
    }
    let rho = sys.radius();
    let lambda = sys.density();
    let half = c::<T>(0.5);
    let big = |e: T| RingSystem::from_density(rho / e, lambda).map(|r| r.translate(sys.center()));
    let v_wire = (c::<T>(2.0) * lambda).sqrt();
    let v = continuation(T::zero(), eps, v_wire, eps * half, |e, g| {
        let ring = big(e)?;
        symmetric_root(&ring, rho / e + d0, g, cfg)
    })?;
    let ring = big(eps)?;
    let shot = shoot_symmetric(&ring, rho / eps + d0, v, Axis::X, cfg)?;
    let t_half = shot.crossing.as_ref().ok_or(SearchError::Collided)?.t;

    // lengths and masses both scale by ε: a = ε, b = 1/ε, velocities unchanged
    let (x0, v0, period) = (rho + d0 * eps, v, (t_half + t_half) * eps);
    let (trace, closure, crossings, _) = finish(sys, x0, v0, period, cfg)?;
    let meta = OrbitMeta {
        eps: Some(eps.as_f64()),
        energy: Some(trace.start().energy.as_f64()),
        convention: Some("density".into()),
        ..Default::default()
    };
    Ok(SymmetricOrbit {
        orbit: record(OrbitClass::Near, sys, x0, v0, period, closure, vec![Symmetry::XAxis], meta),
        x0,
        v0,
        period,
        eps,
        trace,
        crossings,
        v_aux: v,
    })
}
