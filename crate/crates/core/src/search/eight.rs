use super::{
    find_far_orbit, find_near_orbit, launch_time_cap, reflection_defect, state_distance, Axis, OrbitClass, OrbitMeta,
    PeriodicOrbit, SearchConfig, SearchError, Symmetry,
};
use crate::dynamics::{integrate_planar, EventKind, PlanarState, PlanarTrace, Until};
use crate::potential::{EulerSystem, PlanarField, RingSystem};
use crate::roots::brent;
use crate::scalar::{c, Real};
use crate::verify::check_injective;

/// Closure accepted for an assembled eight after four quarter periods.
pub const ASSEMBLY_TOL: f64 = 1e-7;

/// The L-shaped path `[x̃1, x̃0] × {ṽ0} ∪ {x̃1} × [ṽ0, ṽ1]` in launch space,
/// parametrized by arc length scaled to `s ∈ [0, 1]` with `s = 0` at the far
/// endpoint `(x̃0, ṽ0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchPathA<T> {
    pub far: (T, T),
    pub near: (T, T),
    /// Energies of the two endpoints.
    pub h0: T,
    pub h1: T,
}

impl<T: Real> SearchPathA<T> {
    pub fn new<F: PlanarField<T>>(field: &F, far: (T, T), near: (T, T)) -> Result<Self, SearchError> {
        let e = |(x, v): (T, T)| -> Result<T, SearchError> {
            Ok(c::<T>(0.5) * v * v + field.potential_xz([x, T::zero()])?)
        };
        let (h0, h1) = (e(far)?, e(near)?);
        let outer = field.axis_sources().into_iter().fold(T::zero(), T::max);
        if !(far.0 > near.0 && near.0 > outer) {
            return Err(SearchError::InvalidPath(format!(
                "need x0 > x1 > {}: x0 = {}, x1 = {}",
                outer.as_f64(),
                far.0.as_f64(),
                near.0.as_f64()
            )));
        }
        if !(far.1 < near.1) {
            return Err(SearchError::InvalidPath(format!(
                "need v0 < v1: v0 = {}, v1 = {}",
                far.1.as_f64(),
                near.1.as_f64()
            )));
        }
        if !(h1 < h0 && h0 < T::zero()) {
            return Err(SearchError::InvalidPath(format!(
                "need h1 < h0 < 0: h0 = {}, h1 = {}",
                h0.as_f64(),
                h1.as_f64()
            )));
        }
        Ok(Self { far, near, h0, h1 })
    }

    fn legs(&self) -> (T, T) {
        (self.far.0 - self.near.0, self.near.1 - self.far.1)
    }

    /// Launch `(x, v)` at parameter `s`.
    pub fn point(&self, s: T) -> (T, T) {
        let (lh, lv) = self.legs();
        let d = s.max(T::zero()).min(T::one()) * (lh + lv);
        if d <= lh {
            (self.far.0 - d, self.far.1)
        } else {
            (self.near.0, (self.far.1 + (d - lh)).min(self.near.1))
        }
    }

    /// Whether two paths share a point (both legs are axis-parallel).
    pub fn intersects(&self, other: &Self) -> bool {
        let segs = |p: &Self| [((p.near.0, p.far.1), (p.far.0, p.far.1)), ((p.near.0, p.far.1), (p.near.0, p.near.1))];
        for (a0, a1) in segs(self) {
            for (b0, b1) in segs(other) {
                let ox = a0.0.min(a1.0) <= b0.0.max(b1.0) && b0.0.min(b1.0) <= a0.0.max(a1.0);
                let oy = a0.1.min(a1.1) <= b0.1.max(b1.1) && b0.1.min(b1.1) <= a0.1.max(a1.1);
                if ox && oy {
                    return true;
                }
            }
        }
        false
    }
}

/// Launch from `(x, 0)` with velocity `(0, v)` until the `n`-th occurrence of
/// `stop`.
fn launch<T: Real, F: PlanarField<T> + Clone>(
    field: &F,
    (x, v): (T, T),
    stop: EventKind<T>,
    n: usize,
    watch: &[EventKind<T>],
    cfg: &SearchConfig<T>,
) -> Result<PlanarTrace<T>, SearchError> {
    let e = c::<T>(0.5) * v * v + field.potential_xz([x, T::zero()])?;
    let t_max = launch_time_cap(field, e, cfg);
    let s0 = PlanarState::new(x, T::zero(), T::zero(), v);
    let tr = integrate_planar(field, s0, &Until::nth(stop, n, t_max).watching(watch), &cfg.integrator).map_err(
        |e| match e {
            crate::dynamics::IntegrateError::Timeout { t_max } => SearchError::Anomaly { bound: t_max },
            e => e.into(),
        },
    )?;
    if tr.collided() {
        return Err(SearchError::Collided);
    }
    Ok(tr)
}

/// x-coordinate of the second crossing of the line `z = h` (the descending
/// one); for `h = 0` the first descending crossing of the axis.
pub fn line_crossing_x<T: Real, F: PlanarField<T> + Clone>(
    field: &F,
    launch_data: (T, T),
    h: T,
    cfg: &SearchConfig<T>,
) -> Result<T, SearchError> {
    let tr = if h == T::zero() {
        launch(field, launch_data, EventKind::ZCrossDown, 1, &[], cfg)?
    } else {
        launch(field, launch_data, EventKind::LineCross(h), 2, &[], cfg)?
    };
    Ok(tr.end().y[0])
}

/// Height of the first apex after launch.
pub fn apex_height<T: Real, F: PlanarField<T> + Clone>(
    field: &F,
    launch_data: (T, T),
    cfg: &SearchConfig<T>,
) -> Result<T, SearchError> {
    let tr = launch(field, launch_data, EventKind::VzZero, 1, &[], cfg)?;
    Ok(tr.end().y[1])
}

/// Quarter orbit from a perpendicular launch on the x-axis to the origin.
#[derive(Clone, Debug)]
pub struct EightEssential<T> {
    pub x0: T,
    pub v0: T,
    pub tau: T,
    pub endpoint: [T; 2],
    pub trace: PlanarTrace<T>,
    pub path: SearchPathA<T>,
    /// Path parameter of the solution.
    pub s: T,
    /// `(h, s, x, v)` for each height of the schedule.
    pub schedule: Vec<(T, T, T, T)>,
    /// Bisection bracket widths at the first height.
    pub widths: Vec<T>,
    /// Estimated lower bound of the apex height along the path.
    pub xi: T,
}

/// Options of the figure-eight search.
#[derive(Clone, Debug, PartialEq)]
pub struct EightOptions<T> {
    /// Explicit heights; when empty, ξ̂/2^k until the launch data settles.
    pub heights: Vec<T>,
    /// Number of path samples used to estimate ξ.
    pub samples: usize,
    /// Successive launch data closer than this end the schedule.
    pub settle: T,
    pub max_heights: usize,
    /// Largest accepted distance of the endpoint from the origin.
    pub endpoint_tol: T,
}

impl<T: Real> Default for EightOptions<T> {
    fn default() -> Self {
        Self { heights: Vec::new(), samples: 64, settle: c(1e-10), max_heights: 60, endpoint_tol: c(1e-8) }
    }
}

/// Bisection in `s` on `[a, b]` for a sign change of `f`; `fa < 0 < fb`
/// orientation is not assumed. Failed evaluations are nudged toward the
/// near endpoint.
fn bisect<T: Real>(
    mut f: impl FnMut(T) -> Result<T, SearchError>,
    mut a: T,
    mut b: T,
    mut fa: T,
    widths: &mut Vec<T>,
) -> Result<T, SearchError> {
    for _ in 0..200 {
        widths.push(b - a);
        let mut m = (a + b) * c(0.5);
        if !(m > a && m < b) {
            break;
        }
        let mut fm = f(m);
        let mut tries = 0;
        while fm.is_err() && tries < 8 {
            tries += 1;
            m = m + (b - m) * c(0.125);
            fm = f(m);
        }
        let fm = fm?;
        // ties go to the near side
        if fm == T::zero() || (fm > T::zero()) != (fa > T::zero()) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok((a + b) * c(0.5))
}

/// Bracket of a sign change of `f` around `s`, widening geometrically up to
/// the whole path.
fn local_bracket<T: Real>(f: &mut impl FnMut(T) -> Result<T, SearchError>, s: T, mut w: T) -> Option<(T, T, T)> {
    loop {
        let a = (s - w).max(T::zero());
        let b = (s + w).min(T::one());
        if let (Ok(fa), Ok(fb)) = (f(a), f(b)) {
            if (fa > T::zero()) != (fb > T::zero()) {
                return Some((a, b, fa));
            }
        }
        if a == T::zero() && b == T::one() {
            return None;
        }
        w = w * c(8.0);
    }
}

pub fn find_eight<T: Real, F: PlanarField<T> + Clone>(
    field: &F,
    path: &SearchPathA<T>,
    opts: &EightOptions<T>,
    cfg: &SearchConfig<T>,
) -> Result<EightEssential<T>, SearchError> {
    // minimum rise along the path
    let n = opts.samples.max(2);
    let mut zmin = T::infinity();
    for k in 0..n {
        let s = T::from_usize(k).unwrap() / T::from_usize(n - 1).unwrap();
        if let Ok(z) = apex_height(field, path.point(s), cfg) {
            zmin = zmin.min(z);
        }
    }
    if !zmin.is_finite() || !(zmin > T::zero()) {
        return Err(SearchError::InvalidPath("no apex found along the path".into()));
    }
    let xi = zmin * c(0.5);

    let mut heights = opts.heights.clone();
    let explicit = !heights.is_empty();
    if !explicit {
        heights = (1..=opts.max_heights).map(|k| xi / c::<T>(2f64.powi(k as i32))).collect();
    }

    let h = heights[0];
    let mut f = |s: T| line_crossing_x(field, path.point(s), h, cfg);
    let f_far = f(T::zero())?;
    let f_near = f(T::one())?;
    if !(f_far < T::zero() && f_near > T::zero()) {
        return Err(SearchError::InvalidPath(format!(
            "crossing at height {} is {} at the far end and {} at the near end",
            h.as_f64(),
            f_far.as_f64(),
            f_near.as_f64()
        )));
    }
    let mut widths = Vec::new();
    let mut s = bisect(&mut f, T::zero(), T::one(), f_far, &mut widths)?;
    let (x, v) = path.point(s);
    let mut schedule = vec![(h, s, x, v)];

    for &h in heights.iter().skip(1) {
        let mut f = |s: T| line_crossing_x(field, path.point(s), h, cfg);
        let (a, b, fa) = local_bracket(&mut f, s, c(1e-6))
            .ok_or_else(|| SearchError::InvalidPath(format!("no sign change at height {}", h.as_f64())))?;
        s = bisect(&mut f, a, b, fa, &mut Vec::new())?;
        let (x, v) = path.point(s);
        let prev = schedule.last().unwrap();
        let step = (x - prev.2).hypot(v - prev.3);
        schedule.push((h, s, x, v));
        if !explicit && step < opts.settle {
            break;
        }
    }

    // landing on the axis itself
    let mut f0 = |s: T| line_crossing_x(field, path.point(s), T::zero(), cfg);
    let (a, b, _) = local_bracket(&mut f0, s, c(1e-9))
        .ok_or_else(|| SearchError::NoConvergence("no sign change of the landing point".into()))?;
    let s = brent(&mut f0, a, b, T::epsilon())?;
    let (x0, v0) = path.point(s);
    let trace = launch(field, (x0, v0), EventKind::ZCrossDown, 1, &[], cfg)?;
    let end = trace.end();
    let endpoint = [end.y[0], end.y[1]];
    if !(endpoint[0].hypot(endpoint[1]) <= opts.endpoint_tol) {
        return Err(SearchError::NoConvergence(format!(
            "endpoint ({:e}, {:e}) after {} heights",
            endpoint[0].as_f64(),
            endpoint[1].as_f64(),
            schedule.len()
        )));
    }
    Ok(EightEssential { x0, v0, tau: end.t, endpoint, trace, path: *path, s, schedule, widths, xi })
}

impl<T: Real> EightEssential<T> {
    /// Conditions of an essential part: launch on the axis right of the
    /// source with perpendicular velocity, z > 0 inside, endpoint at the
    /// origin. Returns the smallest interior height on the dense grid.
    pub fn interior_min_height(&self, per_segment: usize) -> T {
        let (t0, t1) = (self.trace.start().t, self.trace.end().t);
        let edge = (t1 - t0) * c(1e-9);
        self.trace
            .dense_points(per_segment)
            .into_iter()
            .filter(|(t, _)| *t > t0 + edge && *t < t1 - edge)
            .map(|(_, y)| y[1])
            .fold(T::infinity(), T::min)
    }
}

/// State of the assembled eight at time `t ∈ [0, 4τ]`.
pub fn assembled_state<T: Real>(e: &EightEssential<T>, t: T) -> Option<[T; 4]> {
    let tau = e.tau;
    let two = tau + tau;
    let q = |s: T| e.trace.state_at(s.max(T::zero()).min(tau));
    if t <= tau {
        q(t)
    } else if t <= two {
        let y = q(two - t)?;
        Some([-y[0], -y[1], y[2], y[3]])
    } else if t <= two + tau {
        let y = q(t - two)?;
        Some([-y[0], y[1], -y[2], y[3]])
    } else {
        let y = q(two + two - t)?;
        Some([y[0], -y[1], -y[2], y[3]])
    }
}

/// A figure eight: the essential part, the orbit integrated over 4τ and the
/// consistency numbers of the assembly.
#[derive(Clone, Debug)]
pub struct AssembledEight<T> {
    pub orbit: PeriodicOrbit,
    pub essential: EightEssential<T>,
    pub trace: PlanarTrace<T>,
    /// Position jump of the reflected branches at the origin.
    pub joint_mismatch: T,
    /// Largest distance between the assembled curve and the integrated orbit.
    pub assembly_defect: T,
    /// Largest energy spread over the four branches.
    pub energy_spread: T,
}

pub fn assemble_eight<T: Real, F: PlanarField<T> + Clone>(
    field: &F,
    e: &EightEssential<T>,
    class: OrbitClass,
    meta: OrbitMeta,
    cfg: &SearchConfig<T>,
) -> Result<AssembledEight<T>, SearchError> {
    let joint = c::<T>(2.0) * e.endpoint[0].hypot(e.endpoint[1]);
    if !(joint <= cfg.closure_tol) {
        return Err(SearchError::Assembly(format!("joint mismatch {:e}", joint.as_f64())));
    }
    let period = c::<T>(4.0) * e.tau;
    let s0 = PlanarState::new(e.x0, T::zero(), T::zero(), e.v0);
    let until = Until::time(period).watching(&[EventKind::ZAxisCross, EventKind::ZCrossUp, EventKind::ZCrossDown]);
    let trace = integrate_planar(field, s0, &until, &cfg.integrator)?;
    if trace.collided() {
        return Err(SearchError::Collided);
    }
    let closure = state_distance(&trace.end().y, &s0.to_array());
    if !(closure <= c(ASSEMBLY_TOL)) {
        return Err(SearchError::Closure { closure: closure.as_f64(), tol: ASSEMBLY_TOL });
    }
    let mut defect = T::zero();
    let mut emin = T::infinity();
    let mut emax = T::neg_infinity();
    let n = 400;
    for k in 0..=n {
        let t = period * T::from_usize(k).unwrap() / T::from_usize(n).unwrap();
        let (Some(a), Some(b)) = (assembled_state(e, t), trace.state_at(t)) else { continue };
        defect = defect.max(state_distance(&a, &b));
        if let Ok(v) = field.potential_xz([a[0], a[1]]) {
            let en = c::<T>(0.5) * (a[2] * a[2] + a[3] * a[3]) + v;
            emin = emin.min(en);
            emax = emax.max(en);
        }
    }
    if !(defect <= c(ASSEMBLY_TOL)) {
        return Err(SearchError::Assembly(format!("assembled curve differs by {:e}", defect.as_f64())));
    }
    let sx = reflection_defect(&trace, T::zero(), Axis::X, 128).min(reflection_defect(&trace, period, Axis::X, 128));
    let symmetries = if sx <= c(ASSEMBLY_TOL) { vec![Symmetry::Both] } else { vec![] };
    let orbit = PeriodicOrbit {
        class,
        system: field.descriptor(),
        initial_state: vec![e.x0.as_f64(), 0.0, 0.0, e.v0.as_f64()],
        period: period.as_f64(),
        closure_error: closure.as_f64(),
        symmetries,
        metadata: OrbitMeta { tau: Some(e.tau.as_f64()), energy: Some(trace.start().energy.as_f64()), ..meta },
    };
    Ok(AssembledEight {
        orbit,
        essential: e.clone(),
        trace,
        joint_mismatch: joint,
        assembly_defect: defect,
        energy_spread: emax - emin,
    })
}

/// Scale parameter of family `m`: the far and near endpoints are built at
/// ε = 0.1 / 2^m, which makes the paths of different families disjoint.
pub fn family_eps<T: Real>(family: usize) -> T {
    c(0.1 / 2f64.powi(family as i32))
}

/// Search path of family `m` for the circle.
pub fn ring_path<T: Real>(
    sys: &RingSystem<T>,
    family: usize,
    cfg: &SearchConfig<T>,
) -> Result<SearchPathA<T>, SearchError> {
    let eps = family_eps::<T>(family);
    let far = find_far_orbit(sys, eps, cfg)?;
    let near = find_near_orbit(sys, eps, cfg)?;
    SearchPathA::new(sys, (far.x0, far.v0), (near.x0, near.v0))
}

/// Search path of family `m` for two centers: a far orbit from the search
/// and the explicit near launch `(ρ + ε, √(M/ε))` around one center.
pub fn euler_path<T: Real>(
    sys: &EulerSystem<T>,
    family: usize,
    cfg: &SearchConfig<T>,
) -> Result<SearchPathA<T>, SearchError> {
    let eps = family_eps::<T>(family);
    let far = find_far_orbit(sys, eps, cfg)?;
    let near = (sys.separation() * (T::one() + eps), (sys.mass() / (eps * sys.separation())).sqrt());
    SearchPathA::new(sys, (far.x0, far.v0), near)
}

/// Search, essential part and assembly of the eight of a given family.
pub fn eight_family<T: Real, F: PlanarField<T> + Clone>(
    field: &F,
    path: &SearchPathA<T>,
    class: OrbitClass,
    family: usize,
    opts: &EightOptions<T>,
    cfg: &SearchConfig<T>,
) -> Result<AssembledEight<T>, SearchError> {
    let e = find_eight(field, path, opts, cfg)?;
    let meta = OrbitMeta { family: Some(family), eps: Some(family_eps::<f64>(family)), ..Default::default() };
    let mut a = assemble_eight(field, &e, class, meta, cfg)?;
    if check_injective(&e.trace, c(0.05)).map(|r| r.injective) != Ok(true) {
        return Err(SearchError::Assembly("essential part is not injective".into()));
    }
    a.orbit.metadata.family = Some(family);
    Ok(a)
}
