//! Integration of the spatial, vertical-plane and reduced systems with event
//! detection, plus the orbit transformations built on top of it.

mod circular;
mod events;
mod integrator;
mod model;
mod rk;
mod tableau;
mod trace;

pub use circular::{circular_orbit, stability_function, stability_radius, CircularOrbit};
pub use events::{Event, EventKind, EventRecord};
pub use integrator::{integrate, IntegrateError, IntegratorConfig, Until};
pub use model::{Model, Observable, Planar, PlanarState, Reduced, ReducedState, ReducedWithAngle, Spatial, TraceKind};
pub use rk::{DenseSegment, Method};
pub use trace::{OrbitTrace, Sample, Termination, TraceIoError};

use crate::potential::{PlanarField, RingSystem};
use crate::scalar::Real;

pub type PlanarTrace<T> = OrbitTrace<T, 4>;
pub type SpatialTrace<T> = OrbitTrace<T, 6>;

pub fn integrate_planar<T: Real, F: PlanarField<T> + Clone>(
    field: &F,
    s0: PlanarState<T>,
    until: &Until<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<PlanarTrace<T>, IntegrateError> {
    integrate(&Planar(field.clone()), T::zero(), s0.to_array(), until, cfg)
}

/// Reduced trace; the angle is accumulated by adaptive Simpson quadrature
/// of K/r² on the interpolant and stored in `Sample::phi`, offset by `s0.phi`.
pub fn integrate_reduced<T: Real>(
    ring: &RingSystem<T>,
    s0: ReducedState<T>,
    until: &Until<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<PlanarTrace<T>, IntegrateError> {
    let model = Reduced::new(*ring, s0.keff)?;
    let mut tr = integrate(&model, T::zero(), s0.to_array(), until, cfg)?;
    if s0.phi != T::zero() {
        for s in tr.samples.iter_mut() {
            s.phi += s0.phi;
        }
        for e in tr.events.iter_mut() {
            if let Some(p) = e.phi.as_mut() {
                *p += s0.phi;
            }
        }
    }
    Ok(tr)
}

pub fn integrate_spatial<T: Real>(
    ring: &RingSystem<T>,
    y0: [T; 6],
    until: &Until<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<SpatialTrace<T>, IntegrateError> {
    integrate(&Spatial(*ring), T::zero(), y0, until, cfg)
}

/// (r, z, φ) ↦ (r cos φ, r sin φ, z) with velocities from φ̇ = K/r².
pub fn lift_state<T: Real>(y: &[T; 4], phi: T, keff: T) -> [T; 6] {
    let (r, z, vr, vz) = (y[0], y[1], y[2], y[3]);
    let w = keff / (r * r);
    let (s, c) = phi.sin_cos();
    [r * c, r * s, z, vr * c - r * w * s, vr * s + r * w * c, vz]
}

/// Lifts a reduced trace to three dimensions. The interpolant is not carried
/// over (the map is nonlinear).
pub fn lift_to_3d<T: Real>(tr: &PlanarTrace<T>, keff: T) -> SpatialTrace<T> {
    let samples = tr
        .samples
        .iter()
        .map(|s| Sample { t: s.t, y: lift_state(&s.y, s.phi, keff), energy: s.energy, phi: s.phi })
        .collect();
    let events = tr
        .events
        .iter()
        .map(|e| Event {
            t: e.t,
            kind: e.kind,
            state: lift_state(&e.state, e.phi.unwrap_or(T::zero()), keff),
            phi: e.phi,
        })
        .collect();
    OrbitTrace {
        kind: TraceKind::Spatial,
        samples,
        events,
        energy_drift: tr.energy_drift,
        termination: tr.termination,
        segments: Vec::new(),
    }
}

/// x ẏ - y ẋ.
pub fn angular_momentum<T: Real>(y: &[T; 6]) -> T {
    y[0] * y[4] - y[1] * y[3]
}

/// Applies `s(t) = a r(b t)` with `a = ζ/ρ` and `b = sqrt(N ρ³/(M ζ³))`,
/// where `mass_ratio = N/M`. The first half of the state holds positions.
/// Energies scale by `N/(M a)`.
pub fn rescale_orbit<T: Real, const N: usize>(
    tr: &OrbitTrace<T, N>,
    length_ratio: T,
    mass_ratio: T,
) -> OrbitTrace<T, N> {
    let a = length_ratio;
    let b = (mass_ratio / (a * a * a)).sqrt();
    let half = N / 2;
    let map = move |y: &[T; N]| {
        let mut out = *y;
        for (i, v) in out.iter_mut().enumerate() {
            *v = *v * if i < half { a } else { a * b };
        }
        out
    };
    let escale = mass_ratio / a;
    let kind_map = |k: EventKind<T>| match k {
        EventKind::LineCross(h) => EventKind::LineCross(h * a),
        EventKind::HillExit(r) => EventKind::HillExit(r * a),
        other => other,
    };
    OrbitTrace {
        kind: tr.kind,
        samples: tr
            .samples
            .iter()
            .map(|s| Sample { t: s.t / b, y: map(&s.y), energy: s.energy * escale, phi: s.phi })
            .collect(),
        events: tr
            .events
            .iter()
            .map(|e| Event { t: e.t / b, kind: kind_map(e.kind), state: map(&e.state), phi: e.phi })
            .collect(),
        energy_drift: tr.energy_drift,
        termination: match tr.termination {
            Termination::Event(k) => Termination::Event(kind_map(k)),
            t => t,
        },
        segments: tr.segments.iter().map(|s| s.mapped(T::one() / b, T::zero(), |cf, _| map(cf))).collect(),
    }
}

/// Largest relative defect of `ÿ = a(y)` on the rescaled samples, with the
/// acceleration of the rescaled curve obtained from the source acceleration.
pub fn rescale_defect<T: Real, F: PlanarField<T>, G: PlanarField<T>>(
    source: &F,
    target: &G,
    src: &PlanarTrace<T>,
    length_ratio: T,
    mass_ratio: T,
) -> T {
    let a = length_ratio;
    let b2 = mass_ratio / (a * a * a);
    let mut worst = T::zero();
    for s in &src.samples {
        let p = [s.y[0], s.y[1]];
        let (Ok(acc), Ok(tgt)) = (source.accel_xz(p), target.accel_xz([a * p[0], a * p[1]])) else {
            continue;
        };
        let curve = [a * b2 * acc[0], a * b2 * acc[1]];
        let n = tgt[0].hypot(tgt[1]);
        if n > T::zero() {
            worst = worst.max((curve[0] - tgt[0]).hypot(curve[1] - tgt[1]) / n);
        }
    }
    worst
}

#[cfg(test)]
mod tests;
