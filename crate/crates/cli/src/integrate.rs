use std::path::Path;

use ring_dynamics::dynamics::{integrate_planar, integrate_spatial, EventKind, OrbitTrace, PlanarState, Until};
use ring_dynamics::potential::PlanarField;

use crate::config::{RunConfig, SystemKind};
use crate::error::CliError;
use crate::eval::parse_vec;
use crate::output::{termination_name, write_events, write_trace};

pub fn parse_until(s: &str, t_max: f64) -> Result<Until<f64>, CliError> {
    let s = s.trim();
    let (what, rest) = s
        .split_once(|c: char| c == ':' || c.is_whitespace())
        .ok_or_else(|| CliError::usage(format!("--until: expected time:T or event:KIND, got {s}")))?;
    let rest = rest.trim();
    match what {
        "time" => {
            let t: f64 = rest.parse().map_err(|_| CliError::usage(format!("--until: bad time {rest}")))?;
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::usage("--until: time must be positive"));
            }
            Ok(Until::time(t))
        }
        "event" => {
            let (name, level) = match rest.split_once('@') {
                Some((n, l)) => {
                    let l: f64 = l.parse().map_err(|_| CliError::usage(format!("--until: bad level {l}")))?;
                    (n, Some(l))
                }
                None => (rest, None),
            };
            let kind = EventKind::parse(name, level)
                .ok_or_else(|| CliError::usage(format!("--until: unknown event {rest}")))?;
            Ok(Until::event(kind, t_max))
        }
        _ => Err(CliError::usage(format!("--until: expected time or event, got {what}"))),
    }
}

fn report<const N: usize>(tr: &OrbitTrace<f64, N>, out: Option<&Path>) -> Result<(), CliError> {
    let e = tr.start().energy;
    println!("termination = {}", termination_name(&tr.termination));
    println!("t_end = {}", tr.end().t);
    println!("samples = {}", tr.samples.len());
    println!("energy = {e}");
    println!("energy_drift = {:e}", tr.energy_drift);
    if e >= 0.0 {
        println!("note = energy is not negative; no Hill confinement");
    }
    for ev in &tr.events {
        println!("event = {} t={}", ev.kind.name(), ev.t);
    }
    if let Some(p) = out {
        write_trace(p, tr)?;
        let side = p.with_extension("events.json");
        write_events(&side, tr)?;
        println!("wrote = {}", p.display());
        println!("wrote = {}", side.display());
    }
    Ok(())
}

fn planar<F: PlanarField<f64> + Clone>(
    field: &F,
    y: &[f64],
    until: &Until<f64>,
    cfg: &RunConfig,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let s0 = PlanarState::new(y[0], y[1], y[2], y[3]);
    let tr = integrate_planar(field, s0, until, &cfg.integrator())?;
    report(&tr, out)
}

pub fn run(cfg: &RunConfig, init: &str, until: &str, t_max: f64, out: Option<&Path>) -> Result<(), CliError> {
    let y = parse_vec("--init", init, &[4, 6])?;
    let until = parse_until(until, t_max)?;
    match (cfg.system, y.len()) {
        (SystemKind::Ring, 4) => planar(&cfg.ring()?, &y, &until, cfg, out),
        (SystemKind::Euler, 4) => planar(&cfg.euler()?, &y, &until, cfg, out),
        (SystemKind::Ring, _) => {
            let y0 = [y[0], y[1], y[2], y[3], y[4], y[5]];
            let tr = integrate_spatial(&cfg.ring()?, y0, &until, &cfg.integrator())?;
            report(&tr, out)
        }
        (SystemKind::Euler, _) => Err(CliError::usage("the two-center system is planar: give x,z,vx,vz")),
    }
}
