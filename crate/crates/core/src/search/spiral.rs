use num_rational::Ratio;

use super::rational::simplest_between;
use super::{
    continuation, launch_time_cap, root_near, shoot_model, state_distance, Axis, OrbitClass, OrbitMeta, PeriodicOrbit,
    SearchConfig, SearchError,
};
use crate::dynamics::{
    angular_momentum, integrate, integrate_spatial, lift_state, PlanarTrace, Reduced, ReducedWithAngle, SpatialTrace,
    Until,
};
use crate::potential::{PlanarField, RingSystem};
use crate::roots::brent;
use crate::scalar::{c, Real};

/// Closure accepted for the lifted three-dimensional orbit after q periods.
pub const SPIRAL_CLOSURE_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WindingTarget {
    Auto,
    Ratio(i64, i64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpiralOptions<T> {
    pub eps_range: (T, T),
    /// Points of the ε grid used to bracket the winding ratio.
    pub grid: usize,
    pub target: WindingTarget,
    pub qmax: i64,
    /// Launch distance from the circle, in units of the projected problem.
    pub launch_dist: T,
}

impl<T: Real> Default for SpiralOptions<T> {
    fn default() -> Self {
        Self { eps_range: (c(0.02), c(0.4)), grid: 20, target: WindingTarget::Auto, qmax: 20, launch_dist: c(0.36) }
    }
}

/// Symmetric periodic orbit of the projected system at one ε, in the
/// coordinates of the circle of radius ρ/ε.
#[derive(Clone, Debug)]
pub struct ReducedOrbit<T> {
    pub eps: T,
    pub v: T,
    pub tau: T,
    /// φ(τ)/2π from the accumulated angle of the half period.
    pub theta: T,
    /// Range of the distance to the circle over the half period.
    pub dist: (T, T),
}

impl<T: Real> ReducedOrbit<T> {
    /// Stays in the annulus 1/3 < dist < 1 around the circle point.
    pub fn in_annulus(&self) -> bool {
        self.dist.0 > c(1.0 / 3.0) && self.dist.1 < T::one()
    }
}

/// Spiral periodic orbit: the projected orbit, its winding ratio and the
/// lifted three-dimensional orbit in the unit system.
#[derive(Clone, Debug)]
pub struct SpiralOrbit<T> {
    pub orbit: PeriodicOrbit,
    pub eps: T,
    pub keff: T,
    pub p: i64,
    pub q: i64,
    /// Winding ratio from the quadrature of Keff/r².
    pub theta: T,
    /// Winding ratio from φ carried as a state component.
    pub theta_state: T,
    /// Period of the projected orbit in the unit system.
    pub tau: T,
    /// Projected orbit over one period, unit system.
    pub reduced_trace: PlanarTrace<T>,
    /// Lifted orbit over q periods.
    pub lifted_trace: SpatialTrace<T>,
    pub closure: T,
    /// Largest relative deviation of x ẏ - y ẋ from K on the lifted trace.
    pub momentum_drift: T,
    /// Range of the distance to the circle over the projected orbit.
    pub dist_range: (T, T),
    /// (ε, Θ) grid used to choose the target.
    pub grid: Vec<(T, T)>,
}

struct Setup<T> {
    rho: T,
    lambda: T,
    k: T,
    center_z: T,
    d0: T,
}

impl<T: Real> Setup<T> {
    fn model(&self, eps: T) -> Result<Reduced<T>, SearchError> {
        let ring =
            RingSystem::from_density(self.rho / eps, self.lambda)?.translate([T::zero(), T::zero(), self.center_z]);
        Ok(Reduced::new(ring, self.k / eps)?)
    }

    fn launch_x(&self, eps: T) -> T {
        self.rho / eps + self.d0
    }

    fn shot(&self, eps: T, v: T, cfg: &SearchConfig<T>) -> Result<super::Shot<T>, SearchError> {
        let model = self.model(eps)?;
        let x = self.launch_x(eps);
        let e = c::<T>(0.5) * v * v + model.effective_potential(x, self.center_z)?;
        // the projected sublevel set lies inside the one of the bare circle
        let t_max = launch_time_cap(model.ring(), e, cfg);
        shoot_model(&model, x, v, Axis::X, t_max, &cfg.integrator)
    }

    fn orbit(&self, eps: T, guess: T, cfg: &SearchConfig<T>) -> Result<ReducedOrbit<T>, SearchError> {
        let v = root_near(|v| self.shot(eps, v, cfg)?.value(), guess, guess * cfg.window, cfg.scan, cfg.xtol)?;
        let shot = self.shot(eps, v, cfg)?;
        let ev = shot.crossing.clone().ok_or(SearchError::Collided)?;
        let phi = ev.phi.unwrap_or(T::nan());
        let r = self.rho / eps;
        let (mut dmin, mut dmax) = (T::infinity(), T::zero());
        for (_, y) in shot.half.dense_points(8) {
            let d = (y[0] - r).hypot(y[1] - self.center_z);
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
        Ok(ReducedOrbit { eps, v, tau: ev.t + ev.t, theta: (phi + phi) / T::TAU(), dist: (dmin, dmax) })
    }
}

/// Θ(ε) on a grid over `range`, continued from the wire limit.
pub fn winding_grid<T: Real>(
    sys: &RingSystem<T>,
    k: T,
    opts: &SpiralOptions<T>,
    cfg: &SearchConfig<T>,
) -> Result<Vec<ReducedOrbit<T>>, SearchError> {
    let (range, n) = (opts.eps_range, opts.grid);
    let setup = Setup { rho: sys.radius(), lambda: sys.density(), k, center_z: sys.center()[2], d0: opts.launch_dist };
    let v_wire = (c::<T>(2.0) * setup.lambda).sqrt();
    let (lo, hi) = range;
    let solve = |e: T, g: T| Ok(setup.orbit(e, g, cfg)?.v);
    let mut guess = continuation(T::zero(), lo, v_wire, lo * c(0.5), solve)?;
    let n = n.max(2);
    let mut out = Vec::with_capacity(n);
    let mut prev = lo;
    for i in 0..n {
        let e = lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap();
        if e > prev {
            guess = continuation(prev, e, guess, e - prev, solve)?;
        }
        prev = e;
        let o = setup.orbit(e, guess, cfg)?;
        guess = o.v;
        out.push(o);
    }
    Ok(out)
}

/// Solves Θ(ε) = target on the grid interval that brackets it.
fn solve_eps<T: Real>(
    setup: &Setup<T>,
    grid: &[ReducedOrbit<T>],
    target: T,
    cfg: &SearchConfig<T>,
) -> Result<ReducedOrbit<T>, SearchError> {
    let i =
        grid.windows(2).position(|w| (w[0].theta - target) * (w[1].theta - target) <= T::zero()).ok_or_else(|| {
            SearchError::NoRational { lo: grid[0].theta.as_f64(), hi: grid[grid.len() - 1].theta.as_f64(), qmax: 0 }
        })?;
    let (a, b) = (&grid[i], &grid[i + 1]);
    let guess = |e: T| a.v + (b.v - a.v) * (e - a.eps) / (b.eps - a.eps);
    let g = |e: T| Ok::<T, SearchError>(setup.orbit(e, guess(e), cfg)?.theta - target);
    let eps = brent(g, a.eps, b.eps, T::epsilon() * c(4.0))?;
    setup.orbit(eps, guess(eps), cfg)
}

/// Lifts the projected orbit at `ro` to the unit system and integrates q
/// periods in three dimensions.
fn lift_and_close<T: Real>(
    sys: &RingSystem<T>,
    setup: &Setup<T>,
    ro: &ReducedOrbit<T>,
    q: i64,
    cfg: &SearchConfig<T>,
) -> Result<(PlanarTrace<T>, T, [T; 6], T, SpatialTrace<T>, T, T), SearchError> {
    let eps = ro.eps;
    // the projected system scales with ε in length and mass: t ↦ εt, v ↦ v
    let unit = Reduced::new(*sys, setup.k)?;
    let y0 = [sys.radius() + eps * setup.d0, sys.center()[2], T::zero(), ro.v];
    let tau = ro.tau * eps;
    let reduced = integrate(&unit, T::zero(), y0, &Until::time(tau), &cfg.integrator)?;
    let with_angle = ReducedWithAngle(unit);
    let aug =
        integrate(&with_angle, T::zero(), [y0[0], y0[1], y0[2], y0[3], T::zero()], &Until::time(tau), &cfg.integrator)?;
    let theta_state = aug.end().y[4] / T::TAU();
    let lifted0 = lift_state(&y0, T::zero(), setup.k);
    let period = tau * T::from_i64(q).unwrap();
    let lifted = integrate_spatial(sys, lifted0, &Until::time(period), &cfg.integrator)?;
    if lifted.collided() || reduced.collided() {
        return Err(SearchError::Collided);
    }
    let closure = state_distance(&lifted.end().y, &lifted0);
    let drift =
        lifted.samples.iter().map(|s| ((angular_momentum(&s.y) - setup.k) / setup.k).abs()).fold(T::zero(), T::max);
    Ok((reduced, theta_state, lifted0, period, lifted, closure, drift))
}

pub fn find_spiral<T: Real>(
    sys: &RingSystem<T>,
    k: T,
    opts: &SpiralOptions<T>,
    cfg: &SearchConfig<T>,
) -> Result<SpiralOrbit<T>, SearchError> {
    if k == T::zero() {
        return Err(SearchError::Parameter("K must be nonzero"));
    }
    if sys.center()[0] != T::zero() || sys.center()[1] != T::zero() {
        return Err(SearchError::Parameter("the circle must be centered on the z-axis"));
    }
    let (lo, hi) = opts.eps_range;
    if !(lo > T::zero() && hi > lo) {
        return Err(SearchError::Parameter("epsilon range must satisfy 0 < lo < hi"));
    }
    let setup = Setup { rho: sys.radius(), lambda: sys.density(), k, center_z: sys.center()[2], d0: opts.launch_dist };
    let mut grid = winding_grid(sys, k, opts, cfg)?;
    // keep the part of the range where the orbit stays in the annulus
    let keep = grid.iter().take_while(|o| o.in_annulus()).count();
    if keep < 2 {
        return Err(SearchError::Parameter("projected orbits leave the annulus on the epsilon range"));
    }
    grid.truncate(keep);
    let tmin = grid.iter().map(|o| o.theta).fold(T::infinity(), T::min);
    let tmax = grid.iter().map(|o| o.theta).fold(T::neg_infinity(), T::max);
    let ratio = match opts.target {
        WindingTarget::Ratio(p, q) => {
            if q <= 0 {
                return Err(SearchError::Parameter("q must be positive"));
            }
            Ratio::new(p, q)
        }
        WindingTarget::Auto => simplest_between(tmin.as_f64(), tmax.as_f64(), opts.qmax)
            .ok_or(SearchError::NoRational { lo: tmin.as_f64(), hi: tmax.as_f64(), qmax: opts.qmax })?,
    };
    let (p, q) = (*ratio.numer(), *ratio.denom());
    let target = T::from_i64(p).unwrap() / T::from_i64(q).unwrap();
    let ro = solve_eps(&setup, &grid, target, cfg).map_err(|_| SearchError::NoRational {
        lo: tmin.as_f64(),
        hi: tmax.as_f64(),
        qmax: opts.qmax,
    })?;
    let (reduced, theta_state, lifted0, period, lifted, closure, drift) = lift_and_close(sys, &setup, &ro, q, cfg)?;
    let theta = reduced.end().phi / T::TAU();
    let (mut dmin, mut dmax) = (T::infinity(), T::zero());
    for (_, y) in reduced.dense_points(8) {
        let d = (y[0] - sys.radius()).hypot(y[1] - sys.center()[2]);
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    if !(closure <= c(SPIRAL_CLOSURE_TOL)) {
        return Err(SearchError::Closure { closure: closure.as_f64(), tol: SPIRAL_CLOSURE_TOL });
    }
    let tau = reduced.end().t;
    let orbit = PeriodicOrbit {
        class: OrbitClass::Spiral,
        system: sys.descriptor(),
        initial_state: lifted0.iter().map(|v| v.as_f64()).collect(),
        period: period.as_f64(),
        closure_error: closure.as_f64(),
        symmetries: vec![super::Symmetry::XAxis],
        metadata: OrbitMeta {
            theta: Some(theta.as_f64()),
            p: Some(p),
            q: Some(q),
            eps: Some(ro.eps.as_f64()),
            angular_momentum: Some(k.as_f64()),
            tau: Some(tau.as_f64()),
            energy: Some(lifted.start().energy.as_f64()),
            convention: Some("density".into()),
            ..Default::default()
        },
    };
    Ok(SpiralOrbit {
        orbit,
        eps: ro.eps,
        keff: k / ro.eps,
        p,
        q,
        theta,
        theta_state,
        tau,
        reduced_trace: reduced,
        lifted_trace: lifted,
        closure,
        momentum_drift: drift,
        dist_range: (dmin, dmax),
        grid: grid.iter().map(|o| (o.eps, o.theta)).collect(),
    })
}

/// Negative control: the orbit whose winding ratio is `theta`, lifted and
/// integrated for `q` periods anyway. Returns the closure error.
pub fn spiral_closure_at<T: Real>(
    sys: &RingSystem<T>,
    k: T,
    theta: T,
    q: i64,
    opts: &SpiralOptions<T>,
    cfg: &SearchConfig<T>,
) -> Result<T, SearchError> {
    let setup = Setup { rho: sys.radius(), lambda: sys.density(), k, center_z: sys.center()[2], d0: opts.launch_dist };
    let grid = winding_grid(sys, k, opts, cfg)?;
    let ro = solve_eps(&setup, &grid, theta, cfg)?;
    Ok(lift_and_close(sys, &setup, &ro, q, cfg)?.5)
}
