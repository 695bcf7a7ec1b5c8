use serde::Serialize;

use super::VerifyError;
use crate::dynamics::PlanarTrace;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InjectivityReport {
    pub injective: bool,
    /// Vertices of the refined polyline.
    pub points: usize,
    /// First pair of crossing segments and the crossing point.
    pub crossing: Option<(usize, usize, [f64; 2])>,
}

fn angle_between(a: [f64; 2], b: [f64; 2]) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    cross.atan2(dot).abs()
}

/// Polyline of the trace refined until the velocity turns by less than
/// `max_turn` between neighbours.
pub fn refined_polyline<T: Real>(tr: &PlanarTrace<T>, max_turn: f64) -> Result<Vec<[f64; 2]>, VerifyError> {
    let f = |y: &[T; 4]| ([y[0].as_f64(), y[1].as_f64()], [y[2].as_f64(), y[3].as_f64()]);
    if tr.segments.is_empty() {
        // no interpolant: the samples must already be fine enough
        let pts: Vec<_> = tr.samples.iter().map(|s| [s.y[0].as_f64(), s.y[1].as_f64()]).collect();
        for i in 1..pts.len().saturating_sub(1) {
            let d0 = [pts[i][0] - pts[i - 1][0], pts[i][1] - pts[i - 1][1]];
            let d1 = [pts[i + 1][0] - pts[i][0], pts[i + 1][1] - pts[i][1]];
            let a = angle_between(d0, d1);
            if a > max_turn {
                return Err(VerifyError::Resolution { angle: a, index: i });
            }
        }
        return Ok(pts);
    }
    let mut pts = vec![f(&tr.start().y).0];
    for seg in &tr.segments {
        let (a, b) = (seg.t0, seg.t_end);
        let mut stack = vec![(a, b, 0u32)];
        // depth-first, right half pushed first so points come out in order
        while let Some((ta, tb, depth)) = stack.pop() {
            let (_, va) = f(&seg.eval(ta));
            let (pb, vb) = f(&seg.eval(tb));
            if depth < 40 && angle_between(va, vb) > max_turn {
                let tm = (ta + tb) * T::lit(0.5);
                stack.push((tm, tb, depth + 1));
                stack.push((ta, tm, depth + 1));
            } else {
                pts.push(pb);
            }
        }
    }
    Ok(pts)
}

fn orient(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Intersection point of segments `pq` and `rs`, if any (touching counts).
pub fn segment_intersection(p: [f64; 2], q: [f64; 2], r: [f64; 2], s: [f64; 2]) -> Option<[f64; 2]> {
    let d1 = orient(r, s, p);
    let d2 = orient(r, s, q);
    let d3 = orient(p, q, r);
    let d4 = orient(p, q, s);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        let t = d1 / (d1 - d2);
        return Some([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
    }
    for (o, a, b, x) in [(d1, r, s, p), (d2, r, s, q), (d3, p, q, r), (d4, p, q, s)] {
        if o == 0.0 && on_segment(a, b, x) {
            return Some(x);
        }
    }
    None
}

/// First self-intersection of an open polyline, neighbours excluded. Sweep
/// over x with an active list of segments whose x-range is still open.
pub fn polyline_self_intersection(pts: &[[f64; 2]]) -> Option<(usize, usize, [f64; 2])> {
    let n = pts.len().saturating_sub(1);
    let mut order: Vec<usize> = (0..n).collect();
    let lo = |i: usize| pts[i][0].min(pts[i + 1][0]);
    let hi = |i: usize| pts[i][0].max(pts[i + 1][0]);
    order.sort_by(|&a, &b| lo(a).total_cmp(&lo(b)).then(a.cmp(&b)));
    let mut active: Vec<usize> = Vec::new();
    let mut best: Option<(usize, usize, [f64; 2])> = None;
    for &i in &order {
        let x = lo(i);
        active.retain(|&j| hi(j) >= x);
        for &j in &active {
            if i.abs_diff(j) <= 1 {
                continue;
            }
            if let Some(p) = segment_intersection(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                let pair = (i.min(j), i.max(j), p);
                if best.map_or(true, |b| (pair.0, pair.1) < (b.0, b.1)) {
                    best = Some(pair);
                }
            }
        }
        active.push(i);
    }
    best
}

pub fn check_injective<T: Real>(tr: &PlanarTrace<T>, max_turn: f64) -> Result<InjectivityReport, VerifyError> {
    let pts = refined_polyline(tr, max_turn)?;
    let crossing = polyline_self_intersection(&pts);
    Ok(InjectivityReport { injective: crossing.is_none(), points: pts.len(), crossing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_segment_is_simple() {
        let pts: Vec<_> = (0..50).map(|k| [1.0, k as f64 * 0.1]).collect();
        assert_eq!(polyline_self_intersection(&pts), None);
    }

    #[test]
    fn crossing_detected_with_pair() {
        // a loop: right, up, left, then down through the first edge
        let pts = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, -1.0]];
        let (i, j, p) = polyline_self_intersection(&pts).unwrap();
        assert_eq!((i, j), (0, 3));
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
    }

    #[test]
    fn touching_counts() {
        let pts = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        assert!(polyline_self_intersection(&pts).is_some());
    }

    #[test]
    fn brute_force_agrees() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let pts: Vec<[f64; 2]> = (0..12).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
            let mut brute = None;
            'outer: for i in 0..pts.len() - 1 {
                for j in i + 2..pts.len() - 1 {
                    if let Some(p) = segment_intersection(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                        brute = Some((i, j, p));
                        break 'outer;
                    }
                }
            }
            let sweep = polyline_self_intersection(&pts);
            assert_eq!(brute.is_some(), sweep.is_some());
            if let (Some(b), Some(s)) = (brute, sweep) {
                assert_eq!((b.0, b.1), (s.0, s.1));
            }
        }
    }
}
