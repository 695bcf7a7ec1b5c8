use serde::{Deserialize, Serialize};

use super::{state_distance, SearchError};
use crate::dynamics::{integrate, integrate_planar, integrate_spatial, IntegratorConfig, Planar, PlanarState, Until};
use crate::potential::{EulerSystem, PointMass, RingSystem, SystemDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitClass {
    Far,
    Near,
    Eight,
    EulerEight,
    Spiral,
}

impl OrbitClass {
    pub fn name(self) -> &'static str {
        match self {
            OrbitClass::Far => "far",
            OrbitClass::Near => "near",
            OrbitClass::Eight => "eight",
            OrbitClass::EulerEight => "euler-eight",
            OrbitClass::Spiral => "spiral",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    XAxis,
    ZAxis,
    Both,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OrbitMeta {
    #[serde(skip_serializing_if = "Option::is_none", default, serialize_with = "crate::io::sig17_opt")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default, serialize_with = "crate::io::sig17_opt")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub family: Option<usize>,
    /// Angular momentum of the three-dimensional orbit.
    #[serde(skip_serializing_if = "Option::is_none", default, serialize_with = "crate::io::sig17_opt")]
    pub angular_momentum: Option<f64>,
    /// Period of the projected orbit when it differs from `period`.
    #[serde(skip_serializing_if = "Option::is_none", default, serialize_with = "crate::io::sig17_opt")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default, serialize_with = "crate::io::sig17_opt")]
    pub energy: Option<f64>,
    /// "mass" or "density": the quantity held fixed while ε varied.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub convention: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

/// Serializable record of a periodic orbit in the target system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub class: OrbitClass,
    pub system: SystemDescriptor,
    /// (x, z, ẋ, ż) for planar orbits, (x, y, z, ẋ, ẏ, ż) for spatial ones.
    #[serde(serialize_with = "crate::io::sig17_vec")]
    pub initial_state: Vec<f64>,
    #[serde(serialize_with = "crate::io::sig17")]
    pub period: f64,
    #[serde(serialize_with = "crate::io::sig17")]
    pub closure_error: f64,
    pub symmetries: Vec<Symmetry>,
    pub metadata: OrbitMeta,
}

enum Field {
    Ring(RingSystem<f64>),
    Euler(EulerSystem<f64>),
    Point(PointMass<f64>),
}

impl PeriodicOrbit {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("orbit serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    fn field(&self) -> Result<Field, SearchError> {
        let d = &self.system;
        Ok(match d.kind.as_str() {
            "ring" => Field::Ring(RingSystem::new(d.radius, d.mass)?.translate(d.center)),
            "euler" => Field::Euler(EulerSystem::new(d.mass, d.radius)?),
            "point" => Field::Point(PointMass { mass: d.mass }),
            _ => return Err(SearchError::Parameter("unknown system kind")),
        })
    }

    /// Integrates the stored initial state for the stored period and returns
    /// the closure error and the relative energy drift.
    pub fn reintegrate(&self, cfg: &IntegratorConfig<f64>) -> Result<(f64, f64), SearchError> {
        let until = Until::time(self.period);
        match (self.field()?, self.initial_state.len()) {
            (field, 4) => {
                let mut y0 = [0.0; 4];
                y0.copy_from_slice(&self.initial_state);
                let s0 = PlanarState::from_array(y0);
                let tr = match field {
                    Field::Ring(f) => integrate_planar(&f, s0, &until, cfg)?,
                    Field::Euler(f) => integrate_planar(&f, s0, &until, cfg)?,
                    Field::Point(f) => integrate(&Planar(f), 0.0, y0, &until, cfg)?,
                };
                Ok((state_distance(&tr.end().y, &y0), tr.energy_drift))
            }
            (Field::Ring(f), 6) => {
                let mut y0 = [0.0; 6];
                y0.copy_from_slice(&self.initial_state);
                let tr = integrate_spatial(&f, y0, &until, cfg)?;
                Ok((state_distance(&tr.end().y, &y0), tr.energy_drift))
            }
            _ => Err(SearchError::Parameter("state dimension does not match the system")),
        }
    }
}
