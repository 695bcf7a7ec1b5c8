use num_rational::Ratio;

/// Simplest fraction strictly inside `(lo, hi)` (smallest denominator, then
/// smallest numerator), found by descending the Stern-Brocot tree. `None` if
/// every such fraction has denominator above `qmax`.
pub fn simplest_between(lo: f64, hi: f64, qmax: i64) -> Option<Ratio<i64>> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return None;
    }
    if lo < 0.0 && hi > 0.0 {
        return Some(Ratio::from_integer(0));
    }
    if hi <= 0.0 {
        return simplest_between(-hi, -lo, qmax).map(|r| -r);
    }
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, 0i64);
    loop {
        let (p, q) = (a + c, b + d);
        if q > qmax {
            return None;
        }
        let m = p as f64 / q as f64;
        if m <= lo {
            a = p;
            b = q;
        } else if m >= hi {
            c = p;
            d = q;
        } else {
            return Some(Ratio::new(p, q));
        }
    }
}

/// Continued-fraction convergents of `x` with denominators up to `qmax`.
pub fn convergents(x: f64, qmax: i64) -> Vec<Ratio<i64>> {
    let mut out = Vec::new();
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > qmax {
            break;
        }
        out.push(Ratio::new(h2, k2));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let f = r - a;
        if f.abs() < 1e-15 {
            break;
        }
        r = 1.0 / f;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(lo: f64, hi: f64, qmax: i64) -> Option<Ratio<i64>> {
        for q in 1..=qmax {
            let p0 = (lo * q as f64).floor() as i64 - 1;
            for p in p0..p0 + 3 + (hi - lo).ceil() as i64 * q {
                let v = p as f64 / q as f64;
                if v > lo && v < hi {
                    return Some(Ratio::new(p, q));
                }
            }
        }
        None
    }

    #[test]
    fn examples() {
        assert_eq!(simplest_between(0.3, 0.35, 20), Some(Ratio::new(1, 3)));
        assert_eq!(simplest_between(0.013, 0.106, 20), Some(Ratio::new(1, 10)));
        assert_eq!(simplest_between(0.013, 0.099, 20), Some(Ratio::new(1, 11)));
        assert_eq!(simplest_between(0.4, 0.45, 3), None);
        assert_eq!(simplest_between(-0.35, -0.3, 20), Some(Ratio::new(-1, 3)));
        assert_eq!(simplest_between(2.5, 2.6, 20), Some(Ratio::new(18, 7)));
        assert_eq!(simplest_between(2.5, 2.61, 20), Some(Ratio::new(13, 5)));
    }

    #[test]
    fn matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let a: f64 = rng.gen_range(0.0..3.0);
            let b = a + rng.gen_range(1e-4..0.3);
            assert_eq!(simplest_between(a, b, 50), brute(a, b, 50), "{a} {b}");
        }
    }

    #[test]
    fn convergents_of_pi() {
        let c = convergents(std::f64::consts::PI, 200);
        assert_eq!(c, vec![Ratio::new(3, 1), Ratio::new(22, 7), Ratio::new(333, 106), Ratio::new(355, 113)]);
    }
}
