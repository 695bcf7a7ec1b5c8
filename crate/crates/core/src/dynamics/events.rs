use serde::{Deserialize, Serialize};

use super::model::{Model, Observable};
use crate::scalar::{c, Real};

/// Event kinds recognised by the integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EventKind<T> {
    /// z crosses 0 upward.
    ZCrossUp,
    /// z crosses 0 downward.
    ZCrossDown,
    /// ż = 0 (turning point in height).
    VzZero,
    /// ẋ = 0: velocity perpendicular to the x-axis.
    XAxisPerp,
    /// x crosses 0.
    ZAxisCross,
    /// z crosses the horizontal line z = h, either direction.
    LineCross(T),
    /// Within twice the collision radius of the source.
    Collision,
    /// ‖position‖ exceeds the given radius.
    HillExit(T),
}

impl<T: Real> EventKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::ZCrossUp => "z-cross-up",
            EventKind::ZCrossDown => "z-cross-down",
            EventKind::VzZero => "vz-zero",
            EventKind::XAxisPerp => "x-axis-perp",
            EventKind::ZAxisCross => "z-axis-cross",
            EventKind::LineCross(_) => "line-En-cross",
            EventKind::Collision => "collision",
            EventKind::HillExit(_) => "hill-exit",
        }
    }

    pub fn level(&self) -> Option<T> {
        match self {
            EventKind::LineCross(h) | EventKind::HillExit(h) => Some(*h),
            _ => None,
        }
    }

    pub fn parse(name: &str, level: Option<T>) -> Option<Self> {
        Some(match name {
            "z-cross-up" => EventKind::ZCrossUp,
            "z-cross-down" => EventKind::ZCrossDown,
            "vz-zero" => EventKind::VzZero,
            "x-axis-perp" => EventKind::XAxisPerp,
            "z-axis-cross" => EventKind::ZAxisCross,
            "line-En-cross" => EventKind::LineCross(level?),
            "collision" => EventKind::Collision,
            "hill-exit" => EventKind::HillExit(level?),
            _ => return None,
        })
    }

    /// Same variant, ignoring payloads.
    pub fn same_kind(&self, other: &Self) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }

    /// +1 / -1 for one-sided events, 0 for both directions.
    pub(crate) fn direction(&self) -> i8 {
        match self {
            EventKind::ZCrossUp | EventKind::HillExit(_) => 1,
            EventKind::ZCrossDown | EventKind::Collision => -1,
            _ => 0,
        }
    }

    pub(crate) fn g<const N: usize, M: Model<T, N>>(&self, model: &M, coll: T, y: &[T; N]) -> T {
        match self {
            EventKind::ZCrossUp | EventKind::ZCrossDown => model.observe(Observable::Z, y),
            EventKind::VzZero => model.observe(Observable::Vz, y),
            EventKind::XAxisPerp => model.observe(Observable::Vx, y),
            EventKind::ZAxisCross => model.observe(Observable::X, y),
            EventKind::LineCross(h) => model.observe(Observable::Z, y) - *h,
            EventKind::Collision => model.observe(Observable::SourceDistance, y) - c::<T>(2.0) * coll,
            EventKind::HillExit(r) => model.observe(Observable::Radius, y) - *r,
        }
    }
}

/// A located event.
#[derive(Clone, Debug, PartialEq)]
pub struct Event<T, const N: usize> {
    pub t: T,
    pub kind: EventKind<T>,
    pub state: [T; N],
    /// Accumulated angle at the event, reduced traces only.
    pub phi: Option<T>,
}

/// Serialized form of an event in the sidecar file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    #[serde(serialize_with = "crate::io::sig17")]
    pub t: f64,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default, serialize_with = "crate::io::sig17_opt")]
    pub level: Option<f64>,
    #[serde(serialize_with = "crate::io::sig17_vec")]
    pub state: Vec<f64>,
}

impl<T: Real, const N: usize> Event<T, N> {
    pub fn record(&self) -> EventRecord {
        let mut state: Vec<f64> = self.state.iter().map(|v| v.as_f64()).collect();
        if let Some(p) = self.phi {
            state.push(p.as_f64());
        }
        EventRecord {
            t: self.t.as_f64(),
            kind: self.kind.name().to_string(),
            level: self.kind.level().map(|l| l.as_f64()),
            state,
        }
    }

    pub fn from_record(r: &EventRecord) -> Option<Self> {
        let kind = EventKind::parse(&r.kind, r.level.map(T::lit))?;
        if r.state.len() < N {
            return None;
        }
        let mut state = [T::zero(); N];
        for i in 0..N {
            state[i] = T::lit(r.state[i]);
        }
        let phi = r.state.get(N).map(|&p| T::lit(p));
        Some(Self { t: T::lit(r.t), kind, state, phi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for k in [
            EventKind::ZCrossUp,
            EventKind::ZCrossDown,
            EventKind::VzZero,
            EventKind::XAxisPerp,
            EventKind::ZAxisCross,
            EventKind::LineCross(0.5),
            EventKind::Collision,
            EventKind::HillExit(3.0),
        ] {
            assert_eq!(EventKind::<f64>::parse(k.name(), k.level()), Some(k));
        }
        assert!(EventKind::<f64>::parse("nope", None).is_none());
    }
}
