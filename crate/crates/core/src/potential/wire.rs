//! The straight-wire limit of a large circle seen from close by.

use serde::{Deserialize, Serialize};

use super::{FieldError, PlanarField, RingSystem};
use crate::scalar::{c, Real};

/// Constant in the stated limit `∇W(p; 0) = C λ p/‖p‖²`.
pub const WIRE_CONSTANT_CLAIMED: f64 = 64.0;

/// Stated limit field `C λ p/‖p‖²` with `C = WIRE_CONSTANT_CLAIMED`.
/// This is the gradient, so the acceleration is its negative.
pub fn wire_force<T: Real>(density: T, p: [T; 2]) -> Result<[T; 2], FieldError> {
    let r2 = p[0] * p[0] + p[1] * p[1];
    if r2 == T::zero() {
        return Err(FieldError::Singular);
    }
    let k = c::<T>(WIRE_CONSTANT_CLAIMED) * density / r2;
    Ok([k * p[0], k * p[1]])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WireLimit {
    /// (ε, measured constant) pairs.
    pub samples: Vec<(f64, f64)>,
    /// Estimated convergence order of the raw sequence.
    pub order: f64,
    pub extrapolated: f64,
    pub claimed: f64,
    pub agrees: bool,
}

impl WireLimit {
    /// Four significant digits.
    pub fn formatted(&self) -> String {
        sig4(self.extrapolated)
    }

    pub fn statement(&self) -> String {
        let verdict = if self.agrees { "agrees with" } else { "DISAGREES with" };
        format!(
            "measured limit constant {} (lambda units) {} the stated value {}",
            self.formatted(),
            verdict,
            self.claimed
        )
    }
}

fn sig4(x: f64) -> String {
    if x == 0.0 {
        return "0.000".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (3 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// Measured constant `<∇W(p;ε), p>/λ` averaged over four points at distance
/// `dist` from the circle point (0,0), for the circle of radius 1/ε centered at
/// (1/ε, 0, 0) with density λ.
pub fn wire_constant_at(density: f64, eps: f64, dist: f64) -> Result<f64, FieldError> {
    let big = 1.0 / eps;
    let sys = RingSystem::from_density(big, density)?.translate([big, 0.0, 0.0]);
    let mut acc = 0.0;
    for k in 0..4 {
        let th = std::f64::consts::FRAC_PI_2 * k as f64;
        let p = [dist * th.cos(), dist * th.sin()];
        let a = sys.accel_xz(p)?;
        acc += -(a[0] * p[0] + a[1] * p[1]) / density;
    }
    Ok(acc / 4.0)
}

/// Richardson extrapolation of the measured constant over `eps` (decreasing).
pub fn measure_wire_constant(density: f64, eps: &[f64], dist: f64) -> Result<WireLimit, FieldError> {
    let samples: Vec<(f64, f64)> =
        eps.iter().map(|&e| wire_constant_at(density, e, dist).map(|v| (e, v))).collect::<Result<_, _>>()?;
    let n = samples.len();
    let (order, extrapolated) = if n >= 3 {
        let (e1, c1) = samples[n - 3];
        let (e2, c2) = samples[n - 2];
        let (e3, c3) = samples[n - 1];
        let d1 = c2 - c1;
        let d2 = c3 - c2;
        let ratio = e2 / e3;
        let p = if d1 != 0.0 && d2 != 0.0 && (d1 / d2) > 0.0 { (d1 / d2).ln() / (e1 / e2).ln() } else { 1.0 };
        let f = ratio.powf(p);
        (p, c3 + (c3 - c2) / (f - 1.0))
    } else {
        (f64::NAN, samples.last().map(|s| s.1).unwrap_or(f64::NAN))
    };
    let agrees = (extrapolated - WIRE_CONSTANT_CLAIMED).abs() < 5e-4 * WIRE_CONSTANT_CLAIMED;
    Ok(WireLimit { samples, order, extrapolated, claimed: WIRE_CONSTANT_CLAIMED, agrees })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stated_formula() {
        assert_eq!(wire_force(1.0, [1.0, 0.0]).unwrap(), [64.0, 0.0]);
        assert_eq!(wire_force(1.0, [0.0, 2.0]).unwrap(), [0.0, 32.0]);
        assert!(wire_force(1.0f64, [0.0, 0.0]).is_err());
    }

    #[test]
    fn four_digits() {
        assert_eq!(sig4(2.000013), "2.000");
        assert_eq!(sig4(64.0), "64.00");
        assert_eq!(sig4(0.12345), "0.1235");
    }

    #[test]
    fn infinite_line_oracle() {
        // Independent oracle: an infinite straight line of density λ pulls
        // with 2λ/d. The measured sequence must approach it.
        let c = wire_constant_at(0.3, 1e-4, 0.5).unwrap();
        assert!((c - 2.0).abs() < 1e-3, "{c}");
    }
}
