use super::*;
use crate::potential::{PointMass, RingSystem};

#[test]
fn kepler_residual_vanishes_on_circle() {
    let pm = PointMass { mass: 1.0 };
    let cfg = SearchConfig::default();
    for x0 in [1.0, 2.0, 5.0] {
        let v = (1.0f64 / x0).sqrt();
        let s = shoot_symmetric(&pm, x0, v, Axis::X, &cfg).unwrap();
        assert!(s.residual.abs() < 1e-11);
        let half = std::f64::consts::PI * x0.powf(1.5);
        assert!((s.crossing.unwrap().t - half).abs() < 1e-9 * half);
    }
}

fn ring() -> RingSystem<f64> {
    RingSystem::new(1.0, 1.0).unwrap()
}

fn positions(tr: &crate::Trace, per: usize) -> Vec<(f64, f64)> {
    tr.dense_points(per).into_iter().map(|(_, y)| (y[0], y[1])).collect()
}

fn hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let one_side = |p: &[(f64, f64)], q: &[(f64, f64)]| {
        p.iter()
            .map(|&(x, z)| q.iter().map(|&(u, w)| (x - u).hypot(z - w)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_side(a, b).max(one_side(b, a))
}

#[test]
fn far_orbit_at_zero_is_kepler_circle() {
    let o = find_far_orbit(&ring(), 0.0, &SearchConfig::default()).unwrap();
    assert_eq!(o.x0, 2.0);
    assert!((o.period - std::f64::consts::TAU * 8f64.sqrt()).abs() < 1e-12);
    assert!(o.orbit.closure_error < 1e-10);
}

#[test]
fn far_orbit_post_conditions() {
    let cfg = SearchConfig::default();
    let o = find_far_orbit(&ring(), 0.05, &cfg).unwrap();
    assert!(o.orbit.closure_error <= 1e-8);
    let rmin = positions(&o.trace, 8).iter().map(|p| p.0.hypot(p.1)).fold(f64::INFINITY, f64::min);
    assert!(rmin >= 1.0 / 0.05, "{rmin}");
    assert_eq!(o.crossings.len(), 2);
    assert!((o.crossings[1] + o.x0).abs() < 1e-6 * o.x0, "{:?}", o.crossings);
    assert_eq!(o.orbit.symmetries, vec![Symmetry::Both]);
    assert!(o.trace.energy_drift <= 1e-9);
    let half = o.period / 2.0;
    assert!(reflection_defect(&o.trace, half, Axis::X, 64) <= 1e-8);
}

#[test]
fn far_period_follows_power_law() {
    let cfg = SearchConfig::default();
    let a = find_far_orbit(&ring(), 0.1, &cfg).unwrap();
    let b = find_far_orbit(&ring(), 0.05, &cfg).unwrap();
    let law = 2f64.powf(1.5);
    assert!(((b.period / a.period) / law - 1.0).abs() < 1e-2);
}

fn circle_distance(p: (f64, f64)) -> f64 {
    (p.0.abs() - 1.0).hypot(p.1)
}

#[test]
fn near_orbit_post_conditions() {
    let cfg = SearchConfig::default();
    let eps = 0.05;
    let o = find_near_orbit(&ring(), eps, &cfg).unwrap();
    assert!(o.orbit.closure_error <= 1e-8);
    let d: Vec<f64> = positions(&o.trace, 8).into_iter().map(circle_distance).collect();
    let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(eps / 3.0 < lo && hi < eps, "{lo} {hi}");
    assert_eq!(o.crossings.len(), 2);
    assert!(o.crossings[0] > 1.0 && 1.0 > o.crossings[1] && o.crossings[1] > 0.0);
    assert!(o.trace.energy_drift <= 1e-9);
}

#[test]
fn near_period_is_eps_times_blown_up_period() {
    let cfg = SearchConfig::default();
    let sys = ring();
    for eps in [0.1, 0.05] {
        let o = find_near_orbit(&sys, eps, &cfg).unwrap();
        let big = RingSystem::from_density(1.0 / eps, sys.density()).unwrap();
        let s0 = crate::dynamics::PlanarState::new(1.0 / eps + NEAR_LAUNCH, 0.0, 0.0, o.v_aux);
        let until = crate::dynamics::Until::event(crate::dynamics::EventKind::ZCrossDown, 1e4);
        let tr = crate::dynamics::integrate_planar(&big, s0, &until, &cfg.integrator).unwrap();
        let tau = 2.0 * tr.end().t;
        assert!((o.period / (eps * tau) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn near_period_ratio_tends_to_eps() {
    let cfg = SearchConfig::default();
    let a = find_near_orbit(&ring(), 0.004, &cfg).unwrap();
    let b = find_near_orbit(&ring(), 0.002, &cfg).unwrap();
    assert!(((b.period / a.period) / 0.5 - 1.0).abs() < 1e-2);
}

#[test]
fn near_residual_changes_sign_around_root() {
    let cfg = SearchConfig::default();
    let eps = 0.05;
    let o = find_near_orbit(&ring(), eps, &cfg).unwrap();
    let big = RingSystem::from_density(1.0 / eps, ring().density()).unwrap();
    let x = 1.0 / eps + NEAR_LAUNCH;
    let lo = shoot_symmetric(&big, x, 0.95 * o.v_aux, Axis::X, &cfg).unwrap();
    let hi = shoot_symmetric(&big, x, 1.05 * o.v_aux, Axis::X, &cfg).unwrap();
    assert!(lo.residual * hi.residual < 0.0);
}

#[test]
fn orbit_json_roundtrip_and_reintegration() {
    let cfg = SearchConfig::default();
    let o = find_far_orbit(&ring(), 0.1, &cfg).unwrap().orbit;
    let back = PeriodicOrbit::from_json(&o.to_json()).unwrap();
    assert_eq!(back, o);
    assert_eq!(back.to_json(), o.to_json());
    let (closure, drift) = back.reintegrate(&cfg.integrator).unwrap();
    assert!(closure <= o.closure_error * (1.0 + 1e-9) + 1e-15);
    assert!(drift <= 1e-9);
}

fn check_family(
    field: &(impl crate::potential::PlanarField<f64> + Clone),
    class: OrbitClass,
    path: impl Fn(usize) -> SearchPathA<f64>,
) {
    let cfg = SearchConfig::default();
    let mut parts = Vec::new();
    for m in 0..3 {
        let a = eight_family(field, &path(m), class, m, &EightOptions::default(), &cfg).unwrap();
        let e = &a.essential;
        assert!(e.x0 > 1.0 && e.v0 > 0.0);
        assert!(e.endpoint[0].hypot(e.endpoint[1]) <= 1e-8);
        assert!(e.interior_min_height(16) > 0.0);
        assert!(crate::verify::check_injective(&e.trace, 0.05).unwrap().injective);
        assert!(a.orbit.closure_error <= 1e-7);
        assert!(a.assembly_defect <= 1e-7);
        assert!(e.trace.energy_drift <= 1e-9);
        assert_eq!(a.orbit.metadata.family, Some(m));
        parts.push(positions(&e.trace, 8));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            assert!(hausdorff(&parts[i], &parts[j]) > 1e-3);
        }
    }
}

#[test]
fn ring_eights_three_distinct_families() {
    let r = ring();
    let cfg = SearchConfig::default();
    check_family(&r, OrbitClass::Eight, |m| ring_path(&r, m, &cfg).unwrap());
}

#[test]
fn euler_eights_three_distinct_families() {
    let eu = crate::potential::EulerSystem::new(1.0, 1.0).unwrap();
    let cfg = SearchConfig::default();
    check_family(&eu, OrbitClass::EulerEight, |m| euler_path(&eu, m, &cfg).unwrap());
}

#[test]
fn eight_path_endpoints_straddle_origin() {
    let r = ring();
    let cfg = SearchConfig::default();
    let p = ring_path(&r, 0, &cfg).unwrap();
    let h = 0.5 * apex_height(&r, p.far, &cfg).unwrap().min(apex_height(&r, p.near, &cfg).unwrap());
    assert!(line_crossing_x(&r, p.far, h, &cfg).unwrap() < 0.0);
    assert!(line_crossing_x(&r, p.near, h, &cfg).unwrap() > 0.0);
}

#[test]
fn spiral_closes_on_rational_winding() {
    let cfg = SearchConfig::default();
    let k = 0.3;
    let opts = SpiralOptions::default();
    let s = find_spiral(&ring(), k, &opts, &cfg).unwrap();
    let target = s.p as f64 / s.q as f64;
    assert!(s.q <= opts.qmax);
    assert!((s.theta - target).abs() <= 1e-10);
    assert!((s.theta - s.theta_state).abs() <= 1e-11);
    assert!(s.closure <= 1e-7);
    assert!(s.momentum_drift <= 1e-10);
    assert!(s.eps / 3.0 < s.dist_range.0 && s.dist_range.1 < s.eps, "{:?} {}", s.dist_range, s.eps);
    let l = crate::dynamics::angular_momentum(&s.lifted_trace.start().y);
    assert!((l - k).abs() <= 1e-12);
    let neg = spiral_closure_at(&ring(), k, s.theta + 1e-3, s.q, &opts, &cfg).unwrap();
    assert!(neg >= 1e-4, "{neg}");
}

#[test]
fn spiral_rejects_zero_momentum() {
    let e = find_spiral(&ring(), 0.0, &SpiralOptions::default(), &SearchConfig::default()).unwrap_err();
    assert_eq!(e.to_string(), "K must be nonzero");
}
