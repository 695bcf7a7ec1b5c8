use serde::{Deserialize, Serialize};

use super::report::{Report, Violation};
use super::VerifyError;
use crate::dynamics::PlanarTrace;
use crate::potential::PlanarField;
use crate::scalar::Real;

/// Closed interval of the x-axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Interval {
    Bounded {
        a: f64,
        b: f64,
    },
    /// (−∞, a]
    LeftInfinite {
        a: f64,
    },
    /// [a, ∞)
    RightInfinite {
        a: f64,
    },
}

/// Half-line of an interval; pointing to an interval is pointing to each of
/// its half-lines.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Half {
    Below(f64),
    Above(f64),
}

impl Half {
    /// Pointing margin `h` in the frame where the half-line is (−∞, 0]:
    /// non-negative (with `v_z < 0`) exactly when `v` points to it from `p`.
    fn margin(self, p: [f64; 2], v: [f64; 2]) -> f64 {
        match self {
            Half::Below(b) => (p[0] - b) * v[1] - p[1] * v[0],
            Half::Above(a) => (a - p[0]) * v[1] + p[1] * v[0],
        }
    }
}

impl Interval {
    pub fn bounded(a: f64, b: f64) -> Result<Self, VerifyError> {
        if a <= b {
            Ok(Interval::Bounded { a, b })
        } else {
            Err(VerifyError::Precondition(format!("empty interval [{a}, {b}]")))
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Interval::Bounded { a, b } => a <= x && x <= b,
            Interval::LeftInfinite { a } => x <= a,
            Interval::RightInfinite { a } => x >= a,
        }
    }

    pub fn translate(&self, d: f64) -> Self {
        match *self {
            Interval::Bounded { a, b } => Interval::Bounded { a: a + d, b: b + d },
            Interval::LeftInfinite { a } => Interval::LeftInfinite { a: a + d },
            Interval::RightInfinite { a } => Interval::RightInfinite { a: a + d },
        }
    }

    /// Image under x ↦ −x.
    pub fn reflect(&self) -> Self {
        match *self {
            Interval::Bounded { a, b } => Interval::Bounded { a: -b, b: -a },
            Interval::LeftInfinite { a } => Interval::RightInfinite { a: -a },
            Interval::RightInfinite { a } => Interval::LeftInfinite { a: -a },
        }
    }

    fn halves(&self) -> Vec<Half> {
        match *self {
            Interval::Bounded { a, b } => vec![Half::Below(b), Half::Above(a)],
            Interval::LeftInfinite { a } => vec![Half::Below(a)],
            Interval::RightInfinite { a } => vec![Half::Above(a)],
        }
    }

    /// Whether the axis ray from `x0` in direction `sign` meets the interval.
    fn meets_axis_ray(&self, x0: f64, sign: f64) -> bool {
        let (lo, hi) = match *self {
            Interval::Bounded { a, b } => (a, b),
            Interval::LeftInfinite { a } => (f64::NEG_INFINITY, a),
            Interval::RightInfinite { a } => (a, f64::INFINITY),
        };
        if sign > 0.0 {
            hi >= x0
        } else {
            lo <= x0
        }
    }
}

/// Whether `v` points to `i` at `x` (x in the closed upper half-plane): either
/// `v = 0` or the ray from `x` along `v` meets `i`.
pub fn points_to(x: [f64; 2], v: [f64; 2], i: &Interval) -> bool {
    if v[0] == 0.0 && v[1] == 0.0 {
        return true;
    }
    if x[1] == 0.0 {
        if v[1] == 0.0 {
            return i.meets_axis_ray(x[0], v[0]);
        }
        return i.contains(x[0]);
    }
    v[1] < 0.0 && i.halves().into_iter().all(|h| h.margin(x, v) >= 0.0)
}

/// Per-sample outcome of a pointing check.
#[derive(Clone, Debug, PartialEq)]
pub struct PointingReport {
    pub flags: Vec<bool>,
    /// Pointing margins per half-line of the interval, one entry per sample.
    pub h: Vec<Vec<f64>>,
    pub first_violation: Option<(f64, Vec<f64>)>,
    pub landing: Option<f64>,
    pub report: Report,
}

impl PointingReport {
    pub fn pass(&self) -> bool {
        self.report.pass
    }
}

/// Rectangular sample grid, cell-centred so that no sample lies on its edges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub x: (f64, f64),
    pub z: (f64, f64),
    pub nx: usize,
    pub nz: usize,
}

impl Grid {
    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        let dx = (self.x.1 - self.x.0) / self.nx as f64;
        let dz = (self.z.1 - self.z.0) / self.nz as f64;
        (0..self.nz).flat_map(move |j| {
            (0..self.nx).map(move |i| [self.x.0 + (i as f64 + 0.5) * dx, self.z.0 + (j as f64 + 0.5) * dz])
        })
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self { x: (-5.0, 5.0), z: (0.0, 5.0), nx: 50, nz: 50 }
    }
}

/// Checks that the acceleration field points to `i` on every grid sample.
/// Samples on the source are skipped and counted.
pub fn check_field_pointing<T: Real, F: PlanarField<T>>(field: &F, i: &Interval, grid: &Grid) -> PointingReport {
    field_pointing(|p| field.accel_xz(p.map(crate::scalar::c::<T>)).ok().map(|a| a.map(|v| v.as_f64())), i, grid)
}

/// Same check on an arbitrary vector field, `None` marking skipped samples.
pub fn field_pointing(f: impl Fn([f64; 2]) -> Option<[f64; 2]>, i: &Interval, grid: &Grid) -> PointingReport {
    let halves = i.halves();
    let mut rep = Report::new("field-pointing");
    let mut flags = Vec::new();
    let mut h = Vec::new();
    let mut first = None;
    let mut skipped = 0usize;
    let mut worst = f64::INFINITY;
    for (k, p) in grid.points().enumerate() {
        let Some(a) = f(p) else {
            skipped += 1;
            continue;
        };
        let m: Vec<f64> = halves.iter().map(|hh| hh.margin(p, a)).collect();
        let ok = (a[0] != 0.0 || a[1] != 0.0) && points_to(p, a, i);
        worst = m.iter().copied().fold(worst, f64::min);
        if !ok {
            first.get_or_insert((f64::NAN, p.to_vec()));
            rep.violate(Violation {
                index: k,
                t: None,
                at: vec![p[0], p[1], a[0], a[1]],
                detail: "field does not point to the interval".into(),
            });
        }
        flags.push(ok);
        h.push(m);
    }
    let n = flags.len();
    rep = rep.stat("samples", n as f64).stat("skipped", skipped as f64).stat("min_margin", worst);
    PointingReport { flags, h, first_violation: first, landing: None, report: rep }
}

/// Pointing along a trace in the closed upper half-plane: every sample points
/// to `i`, the margins never decrease (relative tolerance 1e-9), and a trace
/// that ends on the axis lands in `i`.
pub fn check_trajectory_pointing<T: Real>(
    tr: &PlanarTrace<T>,
    i: &Interval,
    per_segment: usize,
) -> Result<PointingReport, VerifyError> {
    let pts: Vec<(f64, [f64; 4])> =
        tr.dense_points(per_segment).into_iter().map(|(t, y)| (t.as_f64(), y.map(|v| v.as_f64()))).collect();
    let Some(&(_, y0)) = pts.first() else {
        return Err(VerifyError::Precondition("empty trace".into()));
    };
    if !points_to([y0[0], y0[1]], [y0[2], y0[3]], i) {
        return Err(VerifyError::Precondition("initial velocity does not point to the interval".into()));
    }
    let halves = i.halves();
    let scale = pts.iter().map(|(_, y)| y[0].hypot(y[1])).fold(0.0, f64::max).max(1.0);
    let ztol = 1e-9 * scale;
    let hs: Vec<Vec<f64>> =
        pts.iter().map(|(_, y)| halves.iter().map(|h| h.margin([y[0], y[1]], [y[2], y[3]])).collect()).collect();
    let hmax = hs.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let htol = 1e-9 * hmax;

    let mut rep = Report::new("trajectory-pointing");
    let mut flags = Vec::with_capacity(pts.len());
    let mut first = None;
    let mut min_step = f64::INFINITY;
    for (k, ((t, y), m)) in pts.iter().zip(&hs).enumerate() {
        let at_rest = y[2] == 0.0 && y[3] == 0.0;
        let on_axis = y[1].abs() <= ztol;
        let ok = if y[1] < -ztol {
            false
        } else if at_rest {
            true
        } else if on_axis {
            points_to([y[0], 0.0], [y[2], y[3]], i) || i.contains(y[0])
        } else {
            y[3] < 0.0 && m.iter().all(|v| *v >= -htol)
        };
        if !ok {
            first.get_or_insert((*t, y.to_vec()));
            rep.violate(Violation { index: k, t: Some(*t), at: y.to_vec(), detail: "velocity does not point".into() });
        }
        flags.push(ok);
        if k > 0 {
            for (a, b) in hs[k - 1].iter().zip(m) {
                let d = b - a;
                min_step = min_step.min(d);
                if d < -htol {
                    rep.violate(Violation {
                        index: k,
                        t: Some(*t),
                        at: y.to_vec(),
                        detail: format!("pointing margin decreased by {d:e}"),
                    });
                }
            }
        }
    }
    let &(_, y_end) = pts.last().unwrap();
    let landing = (pts.len() > 1 && y_end[1].abs() <= ztol).then_some(y_end[0]);
    if let Some(x) = landing {
        let inside = i.contains(x) || i.translate(ztol).contains(x) || i.translate(-ztol).contains(x);
        if !inside {
            rep.violate(Violation {
                index: pts.len() - 1,
                t: Some(pts.last().unwrap().0),
                at: y_end.to_vec(),
                detail: "landed outside the interval".into(),
            });
        }
    }
    rep = rep.stat("samples", pts.len() as f64).stat("min_margin_step", min_step).stat("max_margin", hmax);
    if let Some(x) = landing {
        rep = rep.stat("landing", x);
    }
    Ok(PointingReport { flags, h: hs, first_violation: first, landing, report: rep })
}

/// Time of the first dense sample whose velocity points to `i`.
pub fn first_pointing_time<T: Real>(tr: &PlanarTrace<T>, i: &Interval, per_segment: usize) -> Option<T> {
    tr.dense_points(per_segment).into_iter().find_map(|(t, y)| {
        let y = y.map(|v| v.as_f64());
        (y[1] > 0.0 && points_to([y[0], y[1]], [y[2], y[3]], i)).then_some(t)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::RingSystem;

    const DOWN: Interval = Interval::LeftInfinite { a: 0.0 };

    #[test]
    fn ray_examples() {
        assert!(points_to([1.0, 1.0], [0.0, 0.0], &DOWN));
        assert!(points_to([1.0, 1.0], [-1.0, -1.0], &DOWN));
        assert!(!points_to([1.0, 1.0], [1.0, -1.0], &DOWN));
        assert!(!points_to([1.0, 1.0], [-1.0, 1.0], &DOWN));
        // on the axis outside I only a horizontal velocity can point
        assert!(points_to([1.0, 0.0], [-1.0, 0.0], &DOWN));
        assert!(!points_to([1.0, 0.0], [-1.0, -1.0], &DOWN));
        assert!(points_to([-1.0, 0.0], [3.0, 2.0], &DOWN));
    }

    #[test]
    fn matches_landing_point() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let i = Interval::Bounded { a: -1.0, b: 0.5 };
        for _ in 0..5000 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(0.01..3.0)];
            let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let land = x[0] - x[1] * v[0] / v[1];
            let expect = v[1] < 0.0 && i.contains(land);
            if (land - -1.0).abs() > 1e-9 && (land - 0.5).abs() > 1e-9 {
                assert_eq!(points_to(x, v, &i), expect, "{x:?} {v:?}");
            }
        }
    }

    #[test]
    fn translation_and_reflection_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let intervals = [
            Interval::Bounded { a: -0.5, b: 1.0 },
            Interval::LeftInfinite { a: 0.3 },
            Interval::RightInfinite { a: -0.2 },
        ];
        for _ in 0..2000 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(0.01..3.0)];
            let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let d = 0.25 * rng.gen_range(-8..8) as f64;
            for i in &intervals {
                let p = points_to(x, v, i);
                assert_eq!(p, points_to([x[0] + d, x[1]], v, &i.translate(d)));
                assert_eq!(p, points_to([-x[0], x[1]], [-v[0], v[1]], &i.reflect()));
            }
        }
    }

    #[test]
    fn ring_attraction_points_to_diameter() {
        let ring = RingSystem::<f64>::new(1.0, 1.0).unwrap();
        let i = Interval::Bounded { a: -1.0, b: 1.0 };
        let rep = check_field_pointing(&ring, &i, &Grid::default());
        assert!(rep.pass(), "{:?}", rep.report.violations.first());
        assert_eq!(rep.flags.len(), 2500);
    }

    #[test]
    fn shrunk_interval_and_gradient_fail() {
        let ring = RingSystem::<f64>::new(1.0, 1.0).unwrap();
        let small = Interval::Bounded { a: -0.5, b: 0.5 };
        let rep = check_field_pointing(&ring, &small, &Grid::default());
        assert!(!rep.pass());
        let (x, z) = (rep.first_violation.as_ref().unwrap().1[0], rep.first_violation.as_ref().unwrap().1[1]);
        assert!(x.abs() > 0.5 && z < 5.0);
        // the gradient itself points away from the axis
        let i = Interval::Bounded { a: -1.0, b: 1.0 };
        let grad = field_pointing(|p| ring.accel_xz(p).ok().map(|a| [-a[0], -a[1]]), &i, &Grid::default());
        assert_eq!(grad.report.violations.len(), 2500);
    }

    #[test]
    fn on_axis_force_is_vertical() {
        let ring = RingSystem::<f64>::new(1.0, 1.0).unwrap();
        let i = Interval::Bounded { a: -1.0, b: 1.0 };
        for z in [0.1, 1.0, 4.0] {
            let a = ring.accel_xz([0.0, z]).unwrap();
            assert!(a[0].abs() < 1e-15 && a[1] < 0.0);
            assert!(points_to([0.0, z], a, &i));
        }
    }
}
