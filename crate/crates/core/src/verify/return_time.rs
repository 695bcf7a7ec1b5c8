use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::hill::{hill_radius, HillData};
use super::report::{Report, Violation};
use super::VerifyError;
use crate::dynamics::{integrate_planar, EventKind, IntegratorConfig, PlanarState, Termination, Until};
use crate::potential::PlanarField;
use crate::scalar::{c, Real};

/// A launch from the x-axis with upward velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Launch {
    pub x0: f64,
    pub vx: f64,
    pub vz: f64,
}

/// Random launches `(x0, 0)` with `ż > 0` and energy in `[V(x0), δ]`, drawn
/// inside the Hill interval on the axis and away from the source.
pub fn random_launches<T: Real, F: PlanarField<T>>(field: &F, hill: &HillData, n: usize, seed: u64) -> Vec<Launch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = hill.r_delta;
    let keep_off = 1e-3 * field.extent().as_f64().max(1e-300);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n && tries < 1000 * n.max(1) {
        tries += 1;
        let x0: f64 = rng.gen_range(-r..r);
        let p = [c::<T>(x0), T::zero()];
        if field.source_distance_xz(p).as_f64() < keep_off {
            continue;
        }
        let Ok(v) = field.potential_xz(p).map(|v| v.as_f64()) else { continue };
        if !(v < hill.delta) {
            continue;
        }
        let e = rng.gen_range(v..hill.delta);
        let speed = (2.0 * (e - v)).sqrt();
        let angle: f64 = rng.gen_range(1e-3..std::f64::consts::PI - 1e-3);
        out.push(Launch { x0, vx: speed * angle.cos(), vz: speed * angle.sin() });
    }
    out
}

/// Return (or collision) time of one launch, `None` when the orbit is still
/// above the axis at `t_max`.
pub fn return_time<T: Real, F: PlanarField<T> + Clone>(
    field: &F,
    l: &Launch,
    t_max: f64,
    cfg: &IntegratorConfig<T>,
) -> Result<Option<(f64, bool, f64)>, VerifyError> {
    let s0 = PlanarState::new(c(l.x0), T::zero(), c(l.vx), c(l.vz));
    let until = Until::time(c(t_max)).watching(&[EventKind::ZCrossDown]);
    let mut until = until;
    until.stop = Some((EventKind::ZCrossDown, 1));
    let tr = integrate_planar(field, s0, &until, cfg).map_err(|e| VerifyError::Precondition(e.to_string()))?;
    let hit = match tr.termination {
        Termination::Event(EventKind::ZCrossDown) => Some((tr.end().t.as_f64(), false)),
        Termination::Collision => Some((tr.end().t.as_f64(), true)),
        _ => None,
    };
    // smallest −z̈/z on the arc, the stiffness the bound relies on
    let mut stiff = f64::INFINITY;
    for (_, y) in tr.dense_points(4) {
        let z = y[1].as_f64();
        if z.abs() > 1e-6 {
            if let Ok(a) = field.accel_xz([y[0], y[1]]) {
                stiff = stiff.min(-a[1].as_f64() / z);
            }
        }
    }
    Ok(hit.map(|(t, coll)| (t, coll, stiff)))
}

/// Integrates every launch until it returns to the axis (or collides) and
/// compares the time with T_δ; also checks the vertical stiffness against A
/// along each arc.
pub fn check_return_time<T: Real, F: PlanarField<T> + Clone>(
    field: &F,
    delta: T,
    n: usize,
    seed: u64,
    cfg: &IntegratorConfig<T>,
) -> Result<Report, VerifyError> {
    let hill = hill_radius(field, delta)?;
    let launches = random_launches(field, &hill, n, seed);
    if launches.len() < n {
        return Err(VerifyError::Precondition(format!("only {} admissible launches found", launches.len())));
    }
    let t_max = 2.0 * hill.t_delta;
    let results: Vec<_> = launches.par_iter().map(|l| return_time(field, l, t_max, cfg)).collect();
    let mut rep = Report::new("return-time");
    let (mut max_ratio, mut collisions, mut min_stiff) = (0.0f64, 0usize, f64::INFINITY);
    for (k, (l, r)) in launches.iter().zip(results).enumerate() {
        match r? {
            Some((t, coll, stiff)) => {
                let ratio = t / hill.t_delta;
                max_ratio = max_ratio.max(ratio);
                collisions += coll as usize;
                min_stiff = min_stiff.min(stiff / hill.a_coef);
                if ratio > 1.0 {
                    rep.violate(Violation {
                        index: k,
                        t: Some(t),
                        at: vec![l.x0, l.vx, l.vz],
                        detail: format!("returned after {ratio} T_delta"),
                    });
                }
                if stiff < hill.a_coef * (1.0 - 1e-9) {
                    rep.violate(Violation {
                        index: k,
                        t: None,
                        at: vec![l.x0, l.vx, l.vz],
                        detail: format!("vertical stiffness {stiff} below A = {}", hill.a_coef),
                    });
                }
            }
            None => rep.violate(Violation {
                index: k,
                t: None,
                at: vec![l.x0, l.vx, l.vz],
                detail: format!("no return within {t_max}"),
            }),
        }
    }
    Ok(rep
        .stat("delta", hill.delta)
        .stat("r_delta", hill.r_delta)
        .stat("a_coef", hill.a_coef)
        .stat("t_delta", hill.t_delta)
        .stat("launches", n as f64)
        .stat("collisions", collisions as f64)
        .stat("max_ratio", max_ratio)
        .stat("min_stiffness_over_a", min_stiff)
        .stat("seed", seed as f64))
}
