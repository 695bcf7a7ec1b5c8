use super::hill::return_time_bound;
use super::report::{Report, Violation};
use crate::dynamics::{integrate, EventKind, IntegratorConfig, Model, Observable, TraceKind, Until};
use crate::potential::FieldError;

/// z̈ = −A z − c z³ carried in the z slots of a planar state.
#[derive(Clone, Copy, Debug)]
pub struct Comparison {
    pub a: f64,
    pub cubic: f64,
}

impl Model<f64, 4> for Comparison {
    fn rhs(&self, _t: f64, y: &[f64; 4]) -> Result<[f64; 4], FieldError> {
        Ok([0.0, y[3], 0.0, -self.a * y[1] - self.cubic * y[1].powi(3)])
    }

    fn energy(&self, y: &[f64; 4]) -> Result<f64, FieldError> {
        Ok(0.5 * y[3] * y[3] + 0.5 * self.a * y[1] * y[1] + 0.25 * self.cubic * y[1].powi(4))
    }

    fn observe(&self, obs: Observable, y: &[f64; 4]) -> f64 {
        match obs {
            Observable::X => y[0],
            Observable::Z => y[1],
            Observable::Vx => y[2],
            Observable::Vz => y[3],
            Observable::Radius => y[1].abs(),
            Observable::SourceDistance => f64::INFINITY,
        }
    }

    fn collision_radius(&self) -> f64 {
        0.0
    }

    fn kind(&self) -> TraceKind {
        TraceKind::Planar
    }
}

/// Time of the first `kind` event from `y0`.
pub fn first_event(m: &Comparison, y0: [f64; 4], kind: EventKind<f64>, cfg: &IntegratorConfig<f64>) -> Option<f64> {
    let t_max = 100.0 / m.a.sqrt();
    let tr = integrate(m, 0.0, y0, &Until::event(kind, t_max), cfg).ok()?;
    tr.events.iter().find(|e| e.kind == kind).map(|e| e.t)
}

pub const LEMMA_STIFFNESS: [f64; 7] = [0.01, 0.04, 0.1, 0.5, 1.0, 10.0, 100.0];

/// Comparison-lemma checks on z̈ = −A z: the closed-form quarter period
/// (π/2)/√A against Λ_A, the integrator against the closed form, and the
/// hardening nonlinear system z̈ = −A z − z³ reaching zero no later.
pub fn scalar_ode_lemmas(stiffness: &[f64]) -> Report {
    let cfg = IntegratorConfig::<f64>::default().with_tol(1e-12, 1e-14);
    let mut rep = Report::new("lemmas");
    let mut worst_ratio = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let fail = |rep: &mut Report, k: usize, a: f64, detail: String| {
        rep.violate(Violation { index: k, t: None, at: vec![a], detail });
    };
    for (k, &a) in stiffness.iter().enumerate() {
        if !(a > 0.0) {
            fail(&mut rep, k, a, "stiffness must be positive".into());
            continue;
        }
        let quarter = std::f64::consts::FRAC_PI_2 / a.sqrt();
        let (lambda, _) = return_time_bound(a);
        worst_ratio = worst_ratio.max(quarter / lambda);
        if quarter > lambda {
            fail(&mut rep, k, a, format!("first zero {quarter} beyond bound {lambda}"));
        }
        let lin = Comparison { a, cubic: 0.0 };
        let hard = Comparison { a, cubic: 1.0 };
        // from rest at height 1: first zero
        let drop = [0.0, 1.0, 0.0, 0.0];
        // from the axis moving up: turning time
        let rise = [0.0, 0.0, 0.0, 1.0];
        match (
            first_event(&lin, drop, EventKind::ZCrossDown, &cfg),
            first_event(&lin, rise, EventKind::VzZero, &cfg),
            first_event(&hard, drop, EventKind::ZCrossDown, &cfg),
        ) {
            (Some(t_drop), Some(t_turn), Some(t_hard)) => {
                for (name, t) in [("zero", t_drop), ("turn", t_turn)] {
                    let err = (t / quarter - 1.0).abs();
                    worst_oracle = worst_oracle.max(err);
                    if err > 1e-9 {
                        fail(&mut rep, k, a, format!("{name} time {t} differs from (pi/2)/sqrt(A) = {quarter}"));
                    }
                }
                if t_hard > t_drop * (1.0 + 1e-10) {
                    fail(&mut rep, k, a, format!("nonlinear zero {t_hard} later than harmonic {t_drop}"));
                }
            }
            _ => fail(&mut rep, k, a, "comparison system did not reach its event".into()),
        }
    }
    rep.stat("cases", stiffness.len() as f64)
        .stat("max_quarter_over_lambda", worst_ratio)
        .stat("max_oracle_rel_error", worst_oracle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        assert_eq!(return_time_bound(1.0).0, 3.0);
        assert_eq!(return_time_bound(0.04).0, 51.0);
        let q = std::f64::consts::FRAC_PI_2 / 0.04f64.sqrt();
        assert!((q - 7.853981633974483).abs() < 1e-14);
    }

    #[test]
    fn lemmas_hold() {
        let rep = scalar_ode_lemmas(&LEMMA_STIFFNESS);
        assert!(rep.pass, "{:?}", rep.violations);
        assert!(rep.stats["max_oracle_rel_error"] < 1e-9);
    }

    #[test]
    fn bad_stiffness_reported() {
        assert!(!scalar_ode_lemmas(&[0.0]).pass);
    }
}
