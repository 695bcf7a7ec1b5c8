use super::*;
use crate::potential::{PointMass, RingSystem};

fn ring() -> RingSystem<f64> {
    RingSystem::new(1.0, 1.0).unwrap()
}

#[test]
fn kepler_circle_closes() {
    let pm = PointMass { mass: 1.0 };
    let s0 = PlanarState::new(2.0, 0.0, 0.0, 0.5f64.sqrt());
    let period = std::f64::consts::TAU * 8f64.sqrt();
    for m in [Method::Dop853, Method::Dopri5] {
        let cfg = IntegratorConfig::default().with_method(m);
        let tr = integrate_planar(&pm, s0, &Until::time(period), &cfg).unwrap();
        let y = tr.end().y;
        let err = (y[0] - 2.0).hypot(y[1]);
        assert!(err < 1e-8, "{m:?} {err}");
        assert!((tr.end().t - period).abs() < 1e-14);
    }
}

#[test]
fn dense_output_tracks_exact_solution() {
    let pm = PointMass { mass: 1.0 };
    let s0 = PlanarState::new(1.0, 0.0, 0.0, 1.0);
    let tr = integrate_planar(&pm, s0, &Until::time(6.0), &IntegratorConfig::default()).unwrap();
    for k in 0..600 {
        let t = k as f64 * 0.01;
        let y = tr.state_at(t).unwrap();
        assert!((y[0] - t.cos()).abs() < 1e-9 && (y[1] - t.sin()).abs() < 1e-9, "t={t}");
    }
}

#[test]
fn higher_pair_is_more_accurate_per_step() {
    let pm = PointMass { mass: 1.0 };
    let s0 = PlanarState::new(1.0, 0.0, 0.0, 1.2);
    let cfg = |m| IntegratorConfig::default().with_method(m).with_tol(1e-9, 1e-10);
    let a = integrate_planar(&pm, s0, &Until::time(20.0), &cfg(Method::Dop853)).unwrap();
    let b = integrate_planar(&pm, s0, &Until::time(20.0), &cfg(Method::Dopri5)).unwrap();
    assert!(a.samples.len() < b.samples.len());
}

#[test]
fn event_states_satisfy_equation() {
    let s0 = PlanarState::new(2.5, 0.0, 0.0, 0.55);
    let until = Until::time(60.0).watching(&[EventKind::ZCrossUp, EventKind::ZCrossDown, EventKind::VzZero]);
    let tr = integrate_planar(&ring(), s0, &until, &IntegratorConfig::default()).unwrap();
    assert!(tr.events.len() > 4);
    for e in &tr.events {
        let v = match e.kind {
            EventKind::VzZero => e.state[3],
            _ => e.state[1],
        };
        assert!(v.abs() <= 1e-10, "{:?} {v}", e.kind);
    }
    for w in tr.samples.windows(2) {
        assert!(w[1].t > w[0].t);
    }
    // up and down crossings alternate
    let zs: Vec<_> = tr.events.iter().filter(|e| e.kind != EventKind::VzZero).collect();
    for w in zs.windows(2) {
        assert_ne!(w[0].kind, w[1].kind);
    }
}

#[test]
fn stop_on_event_and_timeout() {
    let s0 = PlanarState::new(2.5, 0.0, 0.0, 0.55);
    let cfg = IntegratorConfig::default();
    let tr = integrate_planar(&ring(), s0, &Until::event(EventKind::ZCrossDown, 100.0), &cfg).unwrap();
    assert_eq!(tr.termination, Termination::Event(EventKind::ZCrossDown));
    assert!(tr.end().y[1].abs() < 1e-10);
    assert!(tr.end().y[3] < 0.0);
    let r = integrate_planar(&ring(), s0, &Until::event(EventKind::ZCrossDown, 0.5), &cfg);
    assert!(matches!(r, Err(IntegrateError::Timeout { .. })));
}

#[test]
fn energy_conserved_long_run() {
    let s0 = PlanarState::new(1.8, 0.1, 0.05, 0.5);
    let tr = integrate_planar(&ring(), s0, &Until::time(1000.0), &IntegratorConfig::default()).unwrap();
    assert!(!tr.collided());
    assert!(tr.energy_drift < 1e-9, "{}", tr.energy_drift);
}

#[test]
fn time_reversal_returns() {
    let s0 = PlanarState::new(1.6, 0.2, -0.1, 0.4);
    let cfg = IntegratorConfig::default();
    let fw = integrate_planar(&ring(), s0, &Until::time(20.0), &cfg).unwrap();
    let y = fw.end().y;
    let back = integrate(&Planar(ring()), 20.0, y, &Until::time(0.0), &cfg).unwrap();
    let y0 = back.end().y;
    let d = (0..4).map(|i| (y0[i] - s0.to_array()[i]).abs()).fold(0.0, f64::max);
    assert!(d < 1e-8, "{d}");
}

#[test]
fn mirror_symmetry() {
    let cfg = IntegratorConfig::default();
    let a = integrate_planar(&ring(), PlanarState::new(1.7, 0.3, 0.1, 0.2), &Until::time(15.0), &cfg).unwrap();
    let b = integrate_planar(&ring(), PlanarState::new(1.7, -0.3, 0.1, -0.2), &Until::time(15.0), &cfg).unwrap();
    for k in 0..150 {
        let t = k as f64 * 0.1;
        let (p, q) = (a.state_at(t).unwrap(), b.state_at(t).unwrap());
        assert!((p[0] - q[0]).abs() < 1e-9 && (p[1] + q[1]).abs() < 1e-9);
    }
}

#[test]
fn hill_confinement() {
    let r = ring();
    let s0 = PlanarState::new(2.0, 0.0, 0.0, 0.0);
    let e = crate::potential::PlanarField::potential_xz(&r, [2.0, 0.0]).unwrap();
    let tr = integrate_planar(&r, s0, &Until::time(50.0), &IntegratorConfig::default()).unwrap();
    for (_, y) in tr.dense_points(4) {
        let v = crate::potential::PlanarField::potential_xz(&r, [y[0], y[1]]).unwrap();
        assert!(v <= e + 1e-9);
    }
}

#[test]
fn collision_is_an_event() {
    // aimed straight at the wire
    let s0 = PlanarState::new(1.5, 0.0, -1.0, 0.0);
    let tr = integrate_planar(&ring(), s0, &Until::time(10.0), &IntegratorConfig::default()).unwrap();
    assert!(tr.collided());
    assert_eq!(tr.events.last().unwrap().kind, EventKind::Collision);
    // with K = 0 the reduced system reaches the axis
    let s = ReducedState { r: 0.5, z: 0.0, vr: -1.0, vz: 0.0, phi: 0.0, keff: 0.0 };
    assert!(integrate_reduced(&ring(), s, &Until::time(10.0), &IntegratorConfig::default()).is_err());
}

#[test]
fn spatial_circle_closes() {
    let r = ring();
    let co = circular_orbit(&r, 3.0).unwrap();
    let y0 = [3.0, 0.0, 0.0, 0.0, co.speed, 0.0];
    let tr = integrate_spatial(&r, y0, &Until::time(co.period), &IntegratorConfig::default()).unwrap();
    let y = tr.end().y;
    let d = (0..6).map(|i| (y[i] - y0[i]).abs()).fold(0.0, f64::max);
    assert!(d < 1e-8, "{d}");
    assert!(tr.energy_drift < 1e-9);
}

#[test]
fn reduced_without_momentum_matches_planar() {
    let r = ring();
    let cfg = IntegratorConfig::default();
    // a loop around the wire that stays off the axis
    let s = ReducedState { r: 1.1, z: 0.0, vr: 0.0, vz: 0.56, phi: 0.0, keff: 0.0 };
    let a = integrate_reduced(&r, s, &Until::time(10.0), &cfg).unwrap();
    let b = integrate_planar(&r, PlanarState::new(1.1, 0.0, 0.0, 0.56), &Until::time(10.0), &cfg).unwrap();
    assert_eq!(a.termination, Termination::Time);
    assert_eq!(a.samples.len(), b.samples.len());
    for (p, q) in a.samples.iter().zip(&b.samples) {
        for i in 0..4 {
            assert!((p.y[i] - q.y[i]).abs() <= 1e-12);
        }
    }
}

#[test]
fn reduced_equilibrium_and_angle() {
    let r = ring();
    let co = circular_orbit(&r, 2.5).unwrap();
    let s = ReducedState { r: 2.5, z: 0.0, vr: 0.0, vz: 0.0, phi: 0.0, keff: co.keff };
    let tr = integrate_reduced(&r, s, &Until::time(30.0), &IntegratorConfig::default()).unwrap();
    let w = co.keff / (2.5 * 2.5);
    for smp in &tr.samples {
        assert!((smp.y[0] - 2.5).abs() < 1e-10 && smp.y[1].abs() < 1e-12);
        assert!((smp.phi - w * smp.t).abs() < 1e-11 * (1.0 + smp.t));
    }
}

#[test]
fn angle_quadrature_matches_augmented_state() {
    let r = ring();
    let s = ReducedState { r: 1.8, z: 0.1, vr: 0.05, vz: 0.2, phi: 0.0, keff: 0.4 };
    let cfg = IntegratorConfig::default();
    let a = integrate_reduced(&r, s, &Until::time(25.0), &cfg).unwrap();
    let m = ReducedWithAngle(Reduced::new(r, 0.4).unwrap());
    let b = integrate(&m, 0.0, [1.8, 0.1, 0.05, 0.2, 0.0], &Until::time(25.0), &cfg).unwrap();
    assert!((a.end().phi - b.end().y[4]).abs() < 1e-10);
    for w in a.samples.windows(2) {
        assert!(w[1].phi > w[0].phi);
    }
}

#[test]
fn lift_conserves_angular_momentum() {
    let r = ring();
    let s = ReducedState { r: 1.8, z: 0.1, vr: 0.05, vz: 0.2, phi: 0.3, keff: 0.4 };
    let red = integrate_reduced(&r, s, &Until::time(20.0), &IntegratorConfig::default()).unwrap();
    let lifted = lift_to_3d(&red, 0.4);
    for (a, b) in lifted.samples.iter().zip(&red.samples) {
        assert!((angular_momentum(&a.y) - 0.4).abs() < 1e-10 * 0.4);
        assert_eq!(a.y[2], b.y[1]);
    }
    // the lifted state follows the spatial flow
    let y0 = lifted.start().y;
    let sp = integrate_spatial(&r, y0, &Until::time(20.0), &IntegratorConfig::default()).unwrap();
    let d = (0..6).map(|i| (sp.end().y[i] - lifted.end().y[i]).abs()).fold(0.0, f64::max);
    assert!(d < 1e-8, "{d}");
}

#[test]
fn rescale_identity_and_kepler_law() {
    let pm = PointMass { mass: 1.0 };
    let s0 = PlanarState::new(2.0, 0.0, 0.0, 0.5f64.sqrt());
    let tr = integrate_planar(&pm, s0, &Until::time(10.0), &IntegratorConfig::default()).unwrap();
    let same = rescale_orbit(&tr, 1.0, 1.0);
    assert_eq!(same.samples, tr.samples);
    let a = 20.0;
    let big = rescale_orbit(&tr, a, 1.0);
    assert!((big.end().t - 10.0 * a.powf(1.5)).abs() < 1e-9);
    assert!(rescale_defect(&pm, &pm, &tr, a, 1.0) < 1e-14);
}

#[test]
fn rescaled_ring_trace_solves_target() {
    let eps = 0.05;
    let small = RingSystem::new(eps, 1.0).unwrap();
    let s0 = PlanarState::new(2.0, 0.0, 0.0, 0.7);
    let cfg = IntegratorConfig::default();
    let tr = integrate_planar(&small, s0, &Until::time(5.0), &cfg).unwrap();
    let unit = ring();
    let big = rescale_orbit(&tr, 1.0 / eps, 1.0);
    assert!(rescale_defect(&small, &unit, &tr, 1.0 / eps, 1.0) < 1e-13);
    // and the rescaled initial condition reproduces the rescaled end state
    let direct =
        integrate_planar(&unit, PlanarState::from_array(big.start().y), &Until::time(big.end().t), &cfg).unwrap();
    let d = (0..2).map(|i| (direct.end().y[i] - big.end().y[i]).abs()).fold(0.0, f64::max);
    assert!(d < 1e-8 / eps, "{d}");
    // interpolant maps too
    let t = big.end().t * 0.37;
    let p = big.state_at(t).unwrap();
    let q = tr.state_at(t * eps.powf(1.5)).unwrap();
    assert!((p[0] - q[0] / eps).abs() < 1e-12 / eps);
}

#[test]
fn stability_radius_in_range_and_mass_free() {
    let r1 = stability_radius(&RingSystem::<f64>::new(1.0, 1.0).unwrap(), 1e-13).unwrap();
    let r10 = stability_radius(&RingSystem::<f64>::new(1.0, 10.0).unwrap(), 1e-13).unwrap();
    assert!(r1 > 1.0 && r1 < 2.0, "{r1}");
    assert!((r1 - r10).abs() < 1e-8);
    let inner = circular_orbit(&ring(), 0.5 * (1.0 + r1)).unwrap();
    let outer = circular_orbit(&ring(), r1 + 0.5).unwrap();
    assert!(!inner.stable && outer.stable);
    assert!(circular_orbit(&ring(), 0.8).is_err());
}

#[test]
fn circular_speed_far_field() {
    let co = circular_orbit(&ring(), 1e4).unwrap();
    assert!((co.speed / (1.0f64 / 1e4).sqrt() - 1.0).abs() < 1e-8);
}

#[test]
fn csv_and_events_roundtrip() {
    let s0 = PlanarState::new(2.5, 0.0, 0.0, 0.55);
    let until = Until::time(20.0).watching(&[EventKind::ZCrossDown, EventKind::LineCross(0.25)]);
    let tr = integrate_planar(&ring(), s0, &until, &IntegratorConfig::default()).unwrap();
    let mut buf = Vec::new();
    tr.write_csv(&mut buf).unwrap();
    let back = PlanarTrace::<f64>::read_csv(TraceKind::Planar, &buf[..]).unwrap();
    assert_eq!(back.samples, tr.samples);
    let mut ev = Vec::new();
    tr.write_events_json(&mut ev).unwrap();
    let evs = PlanarTrace::<f64>::read_events_json(&ev[..]).unwrap();
    assert_eq!(evs, tr.events);
    assert!(PlanarTrace::<f64>::read_csv(TraceKind::Reduced, &buf[..]).is_err());
}

#[test]
fn single_precision_integration() {
    let r = RingSystem::new(1.0f32, 1.0f32).unwrap();
    let s0 = PlanarState::new(2.0f32, 0.0, 0.0, 0.6);
    let tr =
        integrate_planar(&r, s0, &Until::event(EventKind::ZCrossDown, 100.0), &IntegratorConfig::default()).unwrap();
    assert!(tr.end().y[0] < 0.0);
    assert!(tr.energy_drift < 1e-3);
}
