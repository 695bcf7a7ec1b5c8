//! Constructive searches for symmetric, figure-eight and spiral periodic
//! orbits. Each search shoots from a perpendicular launch and root-finds the
//! launch data; the result is re-integrated in the target system.

mod eight;
mod orbit;
mod rational;
mod spiral;
mod symmetric;

pub use eight::{
    apex_height, assemble_eight, assembled_state, eight_family, euler_path, family_eps, find_eight, line_crossing_x,
    ring_path, AssembledEight, EightEssential, EightOptions, SearchPathA, ASSEMBLY_TOL,
};
pub use orbit::{OrbitClass, OrbitMeta, PeriodicOrbit, Symmetry};
pub use rational::{convergents, simplest_between};
pub use spiral::{
    find_spiral, spiral_closure_at, winding_grid, ReducedOrbit, SpiralOptions, SpiralOrbit, WindingTarget,
    SPIRAL_CLOSURE_TOL,
};
pub use symmetric::{
    find_far_orbit, find_near_orbit, find_near_orbit_from, reflection_defect, SymmetricOrbit, NEAR_LAUNCH,
};

use thiserror::Error;

use crate::dynamics::{
    integrate, Event, EventKind, IntegrateError, IntegratorConfig, Model, Planar, PlanarTrace, Until,
};
use crate::potential::{FieldError, PlanarField};
use crate::roots::{brent, RootError};
use crate::scalar::{c, Real};
use crate::verify::hill_radius;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("no sign change of the shooting residual; scan: {scan:?}")]
    Bracket { scan: Vec<(f64, f64)> },
    #[error("no return to the axis within the bound {bound}")]
    Anomaly { bound: f64 },
    #[error("shot collided with the source")]
    Collided,
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("closure {closure:e} above tolerance {tol:e}")]
    Closure { closure: f64, tol: f64 },
    #[error("invalid search path: {0}")]
    InvalidPath(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("assembly inconsistent: {0}")]
    Assembly(String),
    #[error("no rational with denominator <= {qmax} in ({lo}, {hi}); raise qmax or widen the range")]
    NoRational { lo: f64, hi: f64, qmax: i64 },
    #[error("{0}")]
    Parameter(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig<T> {
    pub integrator: IntegratorConfig<T>,
    /// Largest accepted state-space closure error of a returned orbit.
    pub closure_tol: T,
    /// Absolute tolerance of the launch-speed root.
    pub xtol: T,
    /// Subintervals per side when bracketing around a guess.
    pub scan: usize,
    /// Relative half-width of the bracketing window.
    pub window: T,
    /// Time cap for launches with non-negative energy.
    pub t_cap: T,
}

impl<T: Real> Default for SearchConfig<T> {
    fn default() -> Self {
        let rel = c::<T>(T::REL_TOL * 1e-2);
        let abs = c::<T>(T::ABS_TOL * 1e-2);
        Self {
            integrator: IntegratorConfig::default().with_tol(rel, abs),
            closure_tol: c(1e-8f64.max(T::epsilon().as_f64() * 1e4)),
            xtol: T::epsilon() * c(4.0),
            scan: 16,
            window: c(0.05),
            t_cap: c(1e4),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Z,
}

/// Result of one shooting integration.
#[derive(Clone, Debug)]
pub struct Shot<T> {
    /// ẋ at the first descending x-axis crossing (axis x) or ż at the first
    /// z-axis crossing (axis z); NaN after a collision.
    pub residual: T,
    pub crossing: Option<Event<T, 4>>,
    pub half: PlanarTrace<T>,
    pub collided: bool,
}

impl<T: Real> Shot<T> {
    pub fn value(&self) -> Result<T, SearchError> {
        if self.collided {
            Err(SearchError::Collided)
        } else {
            Ok(self.residual)
        }
    }
}

/// Shoots in any planar model. Axis x launches from `(x0, 0)` with velocity
/// `(0, v0)`; axis z from `(0, x0)` with velocity `(-v0, 0)`.
pub fn shoot_model<T: Real, M: Model<T, 4>>(
    model: &M,
    x0: T,
    v0: T,
    axis: Axis,
    t_max: T,
    cfg: &IntegratorConfig<T>,
) -> Result<Shot<T>, SearchError> {
    let (y0, stop) = match axis {
        Axis::X => ([x0, T::zero(), T::zero(), v0], EventKind::ZCrossDown),
        Axis::Z => ([T::zero(), x0, -v0, T::zero()], EventKind::ZAxisCross),
    };
    let half = match integrate(model, T::zero(), y0, &Until::event(stop, t_max), cfg) {
        Ok(tr) => tr,
        Err(IntegrateError::Timeout { t_max }) => return Err(SearchError::Anomaly { bound: t_max }),
        Err(e) => return Err(e.into()),
    };
    if half.collided() {
        return Ok(Shot { residual: T::nan(), crossing: None, half, collided: true });
    }
    let ev = half.events.last().cloned().filter(|e| e.kind == stop);
    let residual = match (&ev, axis) {
        (Some(e), Axis::X) => e.state[2],
        (Some(e), Axis::Z) => e.state[3],
        (None, _) => return Err(SearchError::Anomaly { bound: t_max.as_f64() }),
    };
    Ok(Shot { residual, crossing: ev, half, collided: false })
}

/// Return-time cap for a launch of energy `e`: the bound T_δ when the energy
/// is negative, the configured cap otherwise.
pub fn launch_time_cap<T: Real, F: PlanarField<T>>(field: &F, e: T, cfg: &SearchConfig<T>) -> T {
    if e < T::zero() {
        if let Ok(h) = hill_radius(field, e) {
            return T::lit(h.t_delta) * c(1.0 + 1e-9);
        }
    }
    cfg.t_cap
}

pub fn shoot_symmetric<T: Real, F: PlanarField<T> + Clone>(
    field: &F,
    x0: T,
    v0: T,
    axis: Axis,
    cfg: &SearchConfig<T>,
) -> Result<Shot<T>, SearchError> {
    let p = match axis {
        Axis::X => [x0, T::zero()],
        Axis::Z => [T::zero(), x0],
    };
    let e = c::<T>(0.5) * v0 * v0 + field.potential_xz(p)?;
    let t_max = launch_time_cap(field, e, cfg);
    shoot_model(&Planar(field.clone()), x0, v0, axis, t_max, &cfg.integrator)
}

/// Looks for a sign change of `f` moving outward from `guess` in steps of
/// `half_width / n`, alternating sides. Failed evaluations are skipped.
pub fn bracket_near<T: Real>(
    mut f: impl FnMut(T) -> Result<T, SearchError>,
    guess: T,
    half_width: T,
    n: usize,
    scan: &mut Vec<(f64, f64)>,
) -> Option<(T, T)> {
    let step = half_width / T::from_usize(n).unwrap();
    let mut eval = |x: T, scan: &mut Vec<(f64, f64)>| {
        let r = f(x).ok();
        scan.push((x.as_f64(), r.map_or(f64::NAN, |v| v.as_f64())));
        r
    };
    let f0 = eval(guess, scan);
    if f0 == Some(T::zero()) {
        return Some((guess, guess));
    }
    let mut left = (guess, f0);
    let mut right = (guess, f0);
    for k in 1..=n {
        let kk = T::from_usize(k).unwrap();
        for side in [1, -1] {
            let x = if side > 0 { guess + step * kk } else { guess - step * kk };
            let fx = eval(x, scan);
            let prev = if side > 0 { &mut right } else { &mut left };
            if let (Some(a), Some(b)) = (prev.1, fx) {
                if (a > T::zero()) != (b > T::zero()) || b == T::zero() {
                    return Some(if side > 0 { (prev.0, x) } else { (x, prev.0) });
                }
            }
            if fx.is_some() {
                *prev = (x, fx);
            }
        }
    }
    None
}

/// Root of `f` near `guess`: bracket, then Brent.
pub fn root_near<T: Real>(
    mut f: impl FnMut(T) -> Result<T, SearchError>,
    guess: T,
    half_width: T,
    n: usize,
    xtol: T,
) -> Result<T, SearchError> {
    let mut scan = Vec::new();
    let (a, b) = bracket_near(&mut f, guess, half_width, n, &mut scan).ok_or(SearchError::Bracket { scan })?;
    if a == b {
        return Ok(a);
    }
    Ok(brent(&mut f, a, b, xtol)?)
}

/// Continuation in a parameter from `from` (where the root is `start`) to
/// `target > from`: `solve(p, guess)` returns the root at `p` given the
/// previous one. The step halves on failure.
pub fn continuation<T: Real>(
    from: T,
    target: T,
    start: T,
    first_step: T,
    mut solve: impl FnMut(T, T) -> Result<T, SearchError>,
) -> Result<T, SearchError> {
    let mut cur = from;
    let mut guess = start;
    let mut step = first_step.min(target - from);
    let min_step = (target - from) * c(1e-4);
    let mut last_err = None;
    while cur < target {
        let p = (cur + step).min(target);
        match solve(p, guess) {
            Ok(v) => {
                cur = p;
                guess = v;
                step = step + step;
            }
            Err(e) => {
                step = step * c(0.5);
                if step < min_step {
                    return Err(last_err.unwrap_or(e));
                }
                last_err = Some(e);
            }
        }
    }
    Ok(guess)
}

/// Euclidean distance between two states.
pub fn state_distance<T: Real, const N: usize>(a: &[T; N], b: &[T; N]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y) * (*x - *y)).sum::<T>().sqrt()
}

#[cfg(test)]
mod tests;
