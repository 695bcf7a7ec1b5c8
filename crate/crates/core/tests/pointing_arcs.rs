use rand::{Rng, SeedableRng};
use ring_dynamics::dynamics::{integrate_planar, EventKind, PlanarState, Until};
use ring_dynamics::search::{find_near_orbit, SearchConfig};
use ring_dynamics::verify::{check_trajectory_pointing, first_pointing_time, Interval, VerifyError};
use ring_dynamics::{Config, Ring, Trace};

fn fall(ring: &Ring, y: [f64; 4], cfg: &Config) -> Trace {
    let until = Until::event(EventKind::ZCrossDown, 1e4);
    integrate_planar(ring, PlanarState::from_array(y), &until, cfg).unwrap()
}

fn diameter() -> Interval {
    Interval::bounded(-1.0, 1.0).unwrap()
}

/// Upper arc of the near orbit from the first instant its velocity points to
/// the diameter down to the axis.
fn near_arc(ring: &Ring, cfg: &Config) -> Trace {
    let o = find_near_orbit(ring, 0.05, &SearchConfig::default()).unwrap();
    let upper = fall(ring, o.trace.start().y, cfg);
    let t = first_pointing_time(&upper, &diameter(), 64).unwrap();
    fall(ring, upper.state_at(t).unwrap(), cfg)
}

#[test]
fn near_orbit_arc_points_and_lands_inside() {
    let ring = Ring::new(1.0, 1.0).unwrap();
    let cfg = Config::default();
    let arc = near_arc(&ring, &cfg);
    let rep = check_trajectory_pointing(&arc, &diameter(), 16).unwrap();
    assert!(rep.pass(), "{:?}", rep.report.violations.first());
    let x = rep.landing.unwrap();
    assert!((-1.0..=1.0).contains(&x) && x > 0.9, "{x}");
}

#[test]
fn reversed_arc_fails_pointing() {
    let ring = Ring::new(1.0, 1.0).unwrap();
    let cfg = Config::default();
    let arc = near_arc(&ring, &cfg);
    let e = arc.end().y;
    let back =
        integrate_planar(&ring, PlanarState::new(e[0], 0.0, -e[2], -e[3]), &Until::time(arc.duration()), &cfg).unwrap();
    let rep = check_trajectory_pointing(&back, &diameter(), 16).unwrap();
    assert!(!rep.pass());
    assert!(rep.flags.iter().skip(1).all(|f| !f));
}

#[test]
fn premise_checked_at_start() {
    let ring = Ring::new(1.0, 1.0).unwrap();
    let cfg = Config::default();
    // straight up from outside the interval
    let tr = fall(&ring, [2.0, 0.0, 0.0, 0.3], &cfg);
    assert!(matches!(check_trajectory_pointing(&tr, &diameter(), 8), Err(VerifyError::Precondition(_))));
}

#[test]
fn released_arcs_keep_pointing() {
    let ring = Ring::new(1.0, 1.0).unwrap();
    let cfg = Config::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut landed = 0;
    for _ in 0..20 {
        let y = [rng.gen_range(-5.0..5.0), rng.gen_range(0.2..5.0), 0.0, 0.0];
        let tr = fall(&ring, y, &cfg);
        let rep = check_trajectory_pointing(&tr, &diameter(), 16).unwrap();
        assert!(rep.pass(), "{y:?} {:?}", rep.report.violations.first());
        for frame in 0..2 {
            let h: Vec<f64> = rep.h.iter().map(|m| m[frame]).collect();
            let scale = h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            assert!(h.windows(2).all(|w| w[1] - w[0] >= -1e-9 * scale));
        }
        if let Some(x) = rep.landing {
            assert!(x.abs() <= 1.0 + 1e-9);
            landed += 1;
        }
    }
    assert!(landed > 0);
}
