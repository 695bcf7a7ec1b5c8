use thiserror::Error;

use super::events::{Event, EventKind};
use super::model::Model;
use super::rk::{accept, attempt, DenseSegment, Method};
use super::trace::{OrbitTrace, Sample, Termination};
use crate::potential::FieldError;
use crate::scalar::{c, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    /// Time tolerance for event location.
    pub event_tol: T,
    /// Overrides the model's collision radius when set.
    pub collision_radius: Option<T>,
    pub method: Method,
    pub max_steps: usize,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: c(T::REL_TOL),
            abs_tol: c(T::ABS_TOL),
            max_step: T::infinity(),
            event_tol: c(1e-12f64.max(T::epsilon().as_f64() * 16.0)),
            collision_radius: None,
            method: Method::Dop853,
            max_steps: 5_000_000,
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn with_tol(mut self, rel: T, abs: T) -> Self {
        self.rel_tol = rel;
        self.abs_tol = abs;
        self
    }

    pub fn with_method(mut self, m: Method) -> Self {
        self.method = m;
        self
    }

    pub fn validate(&self) -> Result<(), IntegrateError> {
        let ok = self.rel_tol > T::zero()
            && self.abs_tol > T::zero()
            && self.max_step > T::zero()
            && self.event_tol > T::zero()
            && self.collision_radius.map_or(true, |r| r > T::zero());
        if ok {
            Ok(())
        } else {
            Err(IntegrateError::Config("tolerances and radii must be positive"))
        }
    }
}

/// Stop condition: final time, optionally an earlier n-th occurrence of an
/// event; `watch` lists further events to record.
#[derive(Clone, Debug, PartialEq)]
pub struct Until<T> {
    pub t_max: T,
    pub stop: Option<(EventKind<T>, usize)>,
    pub watch: Vec<EventKind<T>>,
}

impl<T: Real> Until<T> {
    pub fn time(t: T) -> Self {
        Self { t_max: t, stop: None, watch: Vec::new() }
    }

    pub fn event(kind: EventKind<T>, t_max: T) -> Self {
        Self::nth(kind, 1, t_max)
    }

    pub fn nth(kind: EventKind<T>, n: usize, t_max: T) -> Self {
        Self { t_max, stop: Some((kind, n)), watch: Vec::new() }
    }

    pub fn watching(mut self, kinds: &[EventKind<T>]) -> Self {
        self.watch.extend_from_slice(kinds);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("initial state: {0}")]
    Field(#[from] FieldError),
    #[error("stop condition not met before t = {t_max}")]
    Timeout { t_max: f64 },
    #[error("step limit exceeded at t = {t}")]
    StepLimit { t: f64 },
    #[error("invalid configuration: {0}")]
    Config(&'static str),
}

fn rms<T: Real, const N: usize>(v: &[T; N], sk: &[T; N]) -> T {
    let mut s = T::zero();
    for i in 0..N {
        s += (v[i] / sk[i]) * (v[i] / sk[i]);
    }
    (s / T::from_usize(N).unwrap()).sqrt()
}

fn initial_step<T: Real, const N: usize, M: Model<T, N>>(
    model: &M,
    t: T,
    y: &[T; N],
    f0: &[T; N],
    cfg: &IntegratorConfig<T>,
    sgn: T,
) -> T {
    let mut sk = [T::zero(); N];
    for i in 0..N {
        sk[i] = cfg.abs_tol + cfg.rel_tol * y[i].abs();
    }
    let d0 = rms(y, &sk);
    let d1 = rms(f0, &sk);
    let tiny = c::<T>(1e-10);
    let mut h0 = if d0 < tiny || d1 < tiny { c::<T>(1e-6) } else { c::<T>(0.01) * d0 / d1 };
    h0 = h0.min(cfg.max_step);
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += sgn * h0 * f0[i];
    }
    let d2 = match model.rhs(t + sgn * h0, &y1) {
        Ok(f1) => {
            let mut d = [T::zero(); N];
            for i in 0..N {
                d[i] = f1[i] - f0[i];
            }
            rms(&d, &sk) / h0
        }
        Err(_) => return h0 * c(0.01),
    };
    let m = d1.max(d2);
    let h1 = if m <= c(1e-15) {
        (h0 * c(1e-3)).max(c(1e-6))
    } else {
        (c::<T>(0.01) / m).powf(T::one() / c(cfg.method.order()))
    };
    (c::<T>(100.0) * h0).min(h1).min(cfg.max_step)
}

fn locate<T: Real, const N: usize, M: Model<T, N>>(
    kind: &EventKind<T>,
    model: &M,
    coll: T,
    seg: &DenseSegment<T, N>,
    mut ta: T,
    mut tb: T,
    mut ga: T,
    tol: T,
) -> T {
    let g = |t: T| kind.g(model, coll, &seg.eval(t));
    let scale = tol * T::one().max(ta.abs()).max(tb.abs());
    let width0 = (tb - ta).abs();
    // bisection to shrink the bracket, then safeguarded Newton
    for _ in 0..60 {
        if (tb - ta).abs() <= width0 * c(1e-3) || (tb - ta).abs() <= scale {
            break;
        }
        let tm = (ta + tb) * c(0.5);
        let gm = g(tm);
        if gm == T::zero() {
            return tm;
        }
        if (gm > T::zero()) == (ga > T::zero()) {
            ta = tm;
            ga = gm;
        } else {
            tb = tm;
        }
    }
    let mut t = (ta + tb) * c(0.5);
    for _ in 0..50 {
        let gt = g(t);
        if gt == T::zero() {
            return t;
        }
        if (gt > T::zero()) == (ga > T::zero()) {
            ta = t;
            ga = gt;
        } else {
            tb = t;
        }
        let d = (tb - ta).abs() * c(1e-4) + scale;
        let slope = (g(t + d) - g(t - d)) / (d + d);
        let mut tn = if slope != T::zero() { t - gt / slope } else { (ta + tb) * c(0.5) };
        let (lo, hi) = (ta.min(tb), ta.max(tb));
        if !(tn > lo && tn < hi) {
            tn = (ta + tb) * c(0.5);
        }
        let step = (tn - t).abs();
        t = tn;
        if step <= scale || (tb - ta).abs() <= scale {
            break;
        }
    }
    t
}

/// Adaptive Simpson quadrature of φ̇ along one interpolant piece.
fn simpson_angle<T: Real, const N: usize, M: Model<T, N>>(model: &M, seg: &DenseSegment<T, N>, a: T, b: T) -> T {
    let f = |t: T| model.angular_rate(&seg.eval(t)).unwrap_or(T::zero());
    fn rec<T: Real>(f: &dyn Fn(T) -> T, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> T {
        let m = (a + b) * c(0.5);
        let lm = (a + m) * c(0.5);
        let rm = (m + b) * c(0.5);
        let flm = f(lm);
        let frm = f(rm);
        let six = c::<T>(6.0);
        let left = (m - a) / six * (fa + c::<T>(4.0) * flm + fm);
        let right = (b - m) / six * (fm + c::<T>(4.0) * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= c::<T>(15.0) * tol {
            return left + right + delta / c(15.0);
        }
        rec(f, a, m, fa, flm, fm, left, tol * c(0.5), depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol * c(0.5), depth - 1)
    }
    if a == b {
        return T::zero();
    }
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) * c(0.5);
    let fm = f(m);
    let whole = (b - a) / c(6.0) * (fa + c::<T>(4.0) * fm + fb);
    let tol = (whole.abs() * c(1e-15)).max(T::min_positive_value());
    rec(&f, a, b, fa, fm, fb, whole, tol, 30)
}

struct Found<T, const N: usize> {
    t: T,
    kind_idx: usize,
    state: [T; N],
}

const SUBSAMPLES: usize = 8;

/// Integrates `model` from `(t0, y0)` until the stop condition.
///
/// Collisions (entering twice the collision radius, or step-size underflow
/// next to the source) end the trace with a `Collision` event rather than an
/// error. Backward integration is selected by `until.t_max < t0`.
pub fn integrate<T: Real, const N: usize, M: Model<T, N>>(
    model: &M,
    t0: T,
    y0: [T; N],
    until: &Until<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<OrbitTrace<T, N>, IntegrateError> {
    cfg.validate()?;
    let e0 = model.energy(&y0)?;
    let mut k1 = model.rhs(t0, &y0)?;
    let coll = cfg.collision_radius.unwrap_or_else(|| model.collision_radius());
    let sgn = if until.t_max >= t0 { T::one() } else { -T::one() };

    let mut kinds: Vec<EventKind<T>> = vec![EventKind::Collision];
    if let Some((k, _)) = until.stop {
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    for k in &until.watch {
        if !kinds.contains(k) {
            kinds.push(*k);
        }
    }
    let mut counts = vec![0usize; kinds.len()];
    let mut gprev: Vec<T> = kinds.iter().map(|k| k.g(model, coll, &y0)).collect();

    let escale = if e0 != T::zero() { e0.abs() } else { T::one() };
    let mut trace = OrbitTrace {
        kind: model.kind(),
        samples: vec![Sample { t: t0, y: y0, energy: e0, phi: T::zero() }],
        events: Vec::new(),
        energy_drift: T::zero(),
        termination: Termination::Time,
        segments: Vec::new(),
    };

    let mut t = t0;
    let mut y = y0;
    let mut phi = T::zero();
    let mut h = initial_step(model, t, &y, &k1, cfg, sgn);
    let order = cfg.method.order();
    let (fac_min, fac_max) = match cfg.method {
        Method::Dop853 => (c::<T>(1.0 / 6.0), c::<T>(3.0)),
        Method::Dopri5 => (c::<T>(0.1), c::<T>(5.0)),
    };
    let mut rejected_last = false;

    for _ in 0..cfg.max_steps {
        let remaining = (until.t_max - t) * sgn;
        if remaining <= T::zero() {
            if until.stop.is_some() {
                return Err(IntegrateError::Timeout { t_max: until.t_max.as_f64() });
            }
            trace.termination = Termination::Time;
            return Ok(trace);
        }
        let hmin = c::<T>(64.0) * T::epsilon() * T::one().max(t.abs());
        let mut habs = h.abs().min(cfg.max_step);
        let last = habs >= remaining;
        if last {
            habs = remaining;
        }
        let hs = habs * sgn;

        let trial = match attempt(cfg.method, model, t, &y, &k1, hs, cfg.abs_tol, cfg.rel_tol) {
            Ok(tr) => tr,
            Err(e @ FieldError::Parameter(_)) => return Err(e.into()),
            Err(_) => {
                h = habs * c(0.25);
                if h < hmin {
                    return Ok(finish_collision(trace, model, t, y, phi, e0, escale));
                }
                rejected_last = true;
                continue;
            }
        };
        let err = trial.err;
        if !(err <= T::one()) {
            let fac =
                if err.is_finite() { (c::<T>(0.9) * err.powf(-T::one() / c(order))).max(fac_min) } else { c(0.1) };
            h = habs * fac.min(T::one());
            if h < hmin {
                return Ok(finish_collision(trace, model, t, y, phi, e0, escale));
            }
            rejected_last = true;
            continue;
        }
        let acc = match accept(cfg.method, model, t, &y, hs, &trial) {
            Ok(a) => a,
            Err(e @ FieldError::Parameter(_)) => return Err(e.into()),
            Err(_) => {
                h = habs * c(0.5);
                if h < hmin {
                    return Ok(finish_collision(trace, model, t, y, phi, e0, escale));
                }
                rejected_last = true;
                continue;
            }
        };
        let t1 = if last { until.t_max } else { t + hs };
        let seg = acc.dense;

        // event scan
        let mut found: Vec<Found<T, N>> = Vec::new();
        let mut gend = gprev.clone();
        for (j, kind) in kinds.iter().enumerate() {
            let mut ga = gprev[j];
            let mut ta = t;
            let dir = kind.direction();
            for s in 1..=SUBSAMPLES {
                let tb = if s == SUBSAMPLES {
                    t1
                } else {
                    t + hs * T::from_usize(s).unwrap() / T::from_usize(SUBSAMPLES).unwrap()
                };
                let yb = if s == SUBSAMPLES { trial.y1 } else { seg.eval(tb) };
                let gb = kind.g(model, coll, &yb);
                if ga != T::zero() && (ga * gb < T::zero() || gb == T::zero()) {
                    let rising = ga < T::zero();
                    let ok = dir == 0 || (dir > 0) == rising;
                    if ok {
                        let te = if gb == T::zero() {
                            tb
                        } else {
                            locate(kind, model, coll, &seg, ta, tb, ga, cfg.event_tol)
                        };
                        found.push(Found { t: te, kind_idx: j, state: seg.eval(te) });
                    }
                }
                if gb != T::zero() {
                    ga = gb;
                } else {
                    // landed exactly on the surface: count it once
                    ga = -ga;
                }
                ta = tb;
            }
            gend[j] = ga;
        }
        found.sort_by(|a, b| ((a.t - t) * sgn).partial_cmp(&((b.t - t) * sgn)).unwrap());

        let mut stop_at: Option<(T, [T; N], Termination<T>)> = None;
        for f in found {
            let kind = kinds[f.kind_idx];
            counts[f.kind_idx] += 1;
            let phi_e = if model.angular_rate(&f.state).is_some() {
                Some(phi + simpson_angle(model, &seg, t, f.t))
            } else {
                None
            };
            trace.events.push(Event { t: f.t, kind, state: f.state, phi: phi_e });
            if matches!(kind, EventKind::Collision) {
                stop_at = Some((f.t, f.state, Termination::Collision));
                break;
            }
            if let Some((sk, n)) = until.stop {
                if sk == kind && counts[f.kind_idx] >= n {
                    stop_at = Some((f.t, f.state, Termination::Event(kind)));
                    break;
                }
            }
        }

        if let Some((te, ye, term)) = stop_at {
            let mut seg = seg;
            seg.t_end = te;
            phi += simpson_angle(model, &seg, t, te);
            let energy = model.energy(&ye).unwrap_or(T::nan());
            trace.energy_drift = trace.energy_drift.max((energy - e0).abs() / escale);
            trace.samples.push(Sample { t: te, y: ye, energy, phi });
            trace.segments.push(seg);
            trace.termination = term;
            return Ok(trace);
        }

        phi += simpson_angle(model, &seg, t, t1);
        let energy = model.energy(&trial.y1).unwrap_or(T::nan());
        trace.energy_drift = trace.energy_drift.max((energy - e0).abs() / escale);
        trace.samples.push(Sample { t: t1, y: trial.y1, energy, phi });
        let mut seg = seg;
        seg.t_end = t1;
        trace.segments.push(seg);
        gprev = gend;
        t = t1;
        y = trial.y1;
        k1 = acc.k_last;

        let mut fac = if err > T::zero() { c::<T>(0.9) * err.powf(-T::one() / c(order)) } else { fac_max };
        fac = fac.min(fac_max).max(fac_min);
        if rejected_last {
            fac = fac.min(T::one());
        }
        rejected_last = false;
        h = habs * fac;
    }
    Err(IntegrateError::StepLimit { t: t.as_f64() })
}

fn finish_collision<T: Real, const N: usize, M: Model<T, N>>(
    mut trace: OrbitTrace<T, N>,
    model: &M,
    t: T,
    y: [T; N],
    phi: T,
    e0: T,
    escale: T,
) -> OrbitTrace<T, N> {
    trace.events.push(Event { t, kind: EventKind::Collision, state: y, phi: model.angular_rate(&y).map(|_| phi) });
    if let Ok(e) = model.energy(&y) {
        trace.energy_drift = trace.energy_drift.max((e - e0).abs() / escale);
    }
    trace.termination = Termination::Collision;
    trace
}
