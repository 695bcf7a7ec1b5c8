//! Run configuration: a flat `section.key = value` file, `#` comments,
//! overridden by command-line flags.

use std::path::{Path, PathBuf};

use ring_dynamics::dynamics::{IntegratorConfig, Method};
use ring_dynamics::potential::{FieldError, RingSystem};
use ring_dynamics::search::{SearchConfig, WindingTarget};
use ring_dynamics::{Euler, Ring};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    Ring,
    Euler,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub system: SystemKind,
    /// Ring radius, or the half-distance between the Euler centers.
    pub rho: f64,
    pub mass: f64,
    /// When set the ring is built from its linear density and `mass` is ignored.
    pub density: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub method: Method,
    pub max_steps: Option<usize>,
    pub eps: Option<f64>,
    pub k: Option<f64>,
    pub family: usize,
    pub qmax: i64,
    pub target: WindingTarget,
    pub heights: Option<Vec<f64>>,
    pub eps_range: Option<(f64, f64)>,
    pub grid: Option<usize>,
    pub closure_tol: Option<f64>,
    pub delta: Option<f64>,
    pub n: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub formats: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: SystemKind::Ring,
            rho: 1.0,
            mass: 1.0,
            density: None,
            rel_tol: None,
            abs_tol: None,
            method: Method::Dop853,
            max_steps: None,
            eps: None,
            k: None,
            family: 0,
            qmax: 20,
            target: WindingTarget::Auto,
            heights: None,
            eps_range: None,
            grid: None,
            closure_tol: None,
            delta: None,
            n: 100,
            seed: 1,
            out_dir: PathBuf::from("."),
            formats: vec!["json".into(), "csv".into(), "dat".into()],
        }
    }
}

pub const KEYS: &[&str] = &[
    "system.kind",
    "system.rho",
    "system.mass",
    "system.density",
    "integrator.rel_tol",
    "integrator.abs_tol",
    "integrator.method",
    "integrator.max_steps",
    "search.eps",
    "search.k",
    "search.family",
    "search.qmax",
    "search.target",
    "search.heights",
    "search.eps_min",
    "search.eps_max",
    "search.grid",
    "search.closure_tol",
    "verify.delta",
    "verify.n",
    "verify.seed",
    "output.dir",
    "output.formats",
];

fn num(key: &str, v: &str) -> Result<f64, CliError> {
    v.trim().parse::<f64>().map_err(|_| CliError::usage(format!("{key}: not a number: {v}")))
}

fn int<I: std::str::FromStr>(key: &str, v: &str) -> Result<I, CliError> {
    v.trim().parse::<I>().map_err(|_| CliError::usage(format!("{key}: not an integer: {v}")))
}

pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| num(key, s)).collect()
}

pub fn parse_target(v: &str) -> Result<WindingTarget, CliError> {
    let v = v.trim();
    if v == "auto" {
        return Ok(WindingTarget::Auto);
    }
    let (p, q) = v.split_once('/').ok_or_else(|| CliError::usage(format!("target must be auto or p/q: {v}")))?;
    let (p, q): (i64, i64) = (int("search.target", p)?, int("search.target", q)?);
    if q <= 0 {
        return Err(CliError::usage("target denominator must be positive"));
    }
    Ok(WindingTarget::Ratio(p, q))
}

pub fn parse_method(v: &str) -> Result<Method, CliError> {
    match v.trim() {
        "dop853" => Ok(Method::Dop853),
        "dopri5" => Ok(Method::Dopri5),
        other => Err(CliError::usage(format!("unknown integrator method {other}"))),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        let mut lo_hi = (None, None);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim().trim_matches('"'));
            match key {
                "system.kind" => {
                    self.system = match value {
                        "ring" => SystemKind::Ring,
                        "euler" => SystemKind::Euler,
                        _ => return Err(CliError::usage(format!("system.kind must be ring or euler: {value}"))),
                    }
                }
                "system.rho" => self.rho = num(key, value)?,
                "system.mass" => self.mass = num(key, value)?,
                "system.density" => self.density = Some(num(key, value)?),
                "integrator.rel_tol" => self.rel_tol = Some(num(key, value)?),
                "integrator.abs_tol" => self.abs_tol = Some(num(key, value)?),
                "integrator.method" => self.method = parse_method(value)?,
                "integrator.max_steps" => self.max_steps = Some(int(key, value)?),
                "search.eps" => self.eps = Some(num(key, value)?),
                "search.k" => self.k = Some(num(key, value)?),
                "search.family" => self.family = int(key, value)?,
                "search.qmax" => self.qmax = int(key, value)?,
                "search.target" => self.target = parse_target(value)?,
                "search.heights" => self.heights = Some(parse_list(key, value)?),
                "search.eps_min" => lo_hi.0 = Some(num(key, value)?),
                "search.eps_max" => lo_hi.1 = Some(num(key, value)?),
                "search.grid" => self.grid = Some(int(key, value)?),
                "search.closure_tol" => self.closure_tol = Some(num(key, value)?),
                "verify.delta" => self.delta = Some(num(key, value)?),
                "verify.n" => self.n = int(key, value)?,
                "verify.seed" => self.seed = int(key, value)?,
                "output.dir" => self.out_dir = PathBuf::from(value),
                "output.formats" => {
                    self.formats = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
                }
                _ => {
                    return Err(CliError::usage(format!(
                        "line {}: unknown key {key}; known keys: {}",
                        lineno + 1,
                        KEYS.join(", ")
                    )))
                }
            }
        }
        match lo_hi {
            (Some(a), Some(b)) => self.eps_range = Some((a, b)),
            (None, None) => {}
            _ => return Err(CliError::usage("search.eps_min and search.eps_max go together")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::usage(format!("{name} must be positive and finite")))
            }
        };
        positive("system.rho", self.rho)?;
        positive("system.mass", self.mass)?;
        if let Some(d) = self.density {
            positive("system.density", d)?;
        }
        for (name, t) in [("integrator.rel_tol", self.rel_tol), ("integrator.abs_tol", self.abs_tol)] {
            if let Some(t) = t {
                if !(t > 0.0 && t <= 1e-2) {
                    return Err(CliError::usage(format!("{name} must be in (0, 1e-2]")));
                }
            }
        }
        if let Some(e) = self.eps {
            if !(0.0..1.0).contains(&e) {
                return Err(CliError::usage("search.eps must be in [0, 1)"));
            }
        }
        if !(1..=10_000).contains(&self.qmax) {
            return Err(CliError::usage("search.qmax must be in 1..=10000"));
        }
        if self.family > 12 {
            return Err(CliError::usage("search.family must be at most 12"));
        }
        if let Some((a, b)) = self.eps_range {
            if !(0.0 < a && a < b && b < 1.0) {
                return Err(CliError::usage("search eps range must satisfy 0 < eps_min < eps_max < 1"));
            }
        }
        if let Some(g) = self.grid {
            if g < 3 {
                return Err(CliError::usage("search.grid must be at least 3"));
            }
        }
        if let Some(h) = &self.heights {
            if h.is_empty() || h.iter().any(|&x| !(x > 0.0)) {
                return Err(CliError::usage("search.heights must be positive"));
            }
        }
        if let Some(c) = self.closure_tol {
            positive("search.closure_tol", c)?;
        }
        if self.n == 0 {
            return Err(CliError::usage("verify.n must be positive"));
        }
        for f in &self.formats {
            if !["json", "csv", "dat"].contains(&f.as_str()) {
                return Err(CliError::usage(format!("unknown output format {f}")));
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> Result<Ring, CliError> {
        let r = match self.density {
            Some(l) => RingSystem::from_density(self.rho, l),
            None => RingSystem::new(self.rho, self.mass),
        };
        r.map_err(field_usage)
    }

    pub fn euler(&self) -> Result<Euler, CliError> {
        Euler::new(self.mass, self.rho).map_err(field_usage)
    }

    pub fn integrator(&self) -> IntegratorConfig<f64> {
        let mut c = IntegratorConfig::default().with_method(self.method);
        if let Some(r) = self.rel_tol {
            c.rel_tol = r;
        }
        if let Some(a) = self.abs_tol {
            c.abs_tol = a;
        }
        if let Some(m) = self.max_steps {
            c.max_steps = m;
        }
        c
    }

    pub fn search(&self) -> SearchConfig<f64> {
        let mut s = SearchConfig::default();
        if self.rel_tol.is_some() || self.abs_tol.is_some() || self.method != Method::Dop853 {
            s.integrator = self.integrator();
        }
        if let Some(m) = self.max_steps {
            s.integrator.max_steps = m;
        }
        if let Some(c) = self.closure_tol {
            s.closure_tol = c;
        }
        s
    }

    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f == format)
    }
}

fn field_usage(e: FieldError) -> CliError {
    CliError::usage(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let mut c = RunConfig::default();
        c.apply_text(
            "# ring setup\nsystem.kind = ring\nsystem.rho = 2   # radius\nsearch.target = 1/8\nsearch.heights = 0.1, 0.05\n\n",
        )
        .unwrap();
        assert_eq!(c.rho, 2.0);
        assert_eq!(c.target, WindingTarget::Ratio(1, 8));
        assert_eq!(c.heights, Some(vec![0.1, 0.05]));
        c.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("system.radius = 1").is_err());
        assert!(c.apply_text("system.rho").is_err());
        assert!(c.apply_text("system.rho = x").is_err());
        assert!(c.apply_text("search.eps_min = 0.1").is_err());
    }

    #[test]
    fn range_checks() {
        let mut c = RunConfig::default();
        c.apply_text("system.mass = -1").unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.apply_text("integrator.rel_tol = 0.5").unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.apply_text("output.formats = json, png").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn every_key_is_accepted() {
        for k in KEYS {
            let v = match *k {
                "system.kind" => "euler",
                "integrator.method" => "dopri5",
                "search.target" => "auto",
                "output.dir" => "out",
                "output.formats" => "json",
                "search.heights" => "0.1",
                "search.eps_min" | "search.eps_max" => continue,
                "integrator.max_steps"
                | "search.family"
                | "search.qmax"
                | "search.grid"
                | "verify.n"
                | "verify.seed" => "5",
                _ => "0.5",
            };
            let mut c = RunConfig::default();
            c.apply_text(&format!("{k} = {v}")).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }
}
