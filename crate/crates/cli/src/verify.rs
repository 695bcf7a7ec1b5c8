use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ring_dynamics::dynamics::{integrate_planar, EventKind, PlanarState, Until};
use ring_dynamics::potential::{measure_wire_constant, PlanarField};
use ring_dynamics::verify::{
    check_field_pointing, check_return_time, check_trajectory_pointing, hill_radius, scalar_ode_lemmas, Grid, Interval,
    Report, Violation, LEMMA_STIFFNESS,
};
use ring_dynamics::Config;

use crate::config::{RunConfig, SystemKind};
use crate::error::CliError;
use crate::VerifyKind;

pub const DEFAULT_DELTA: f64 = -0.5;
const ARCS: usize = 20;
/// ε sequence and distance of the straight-wire measurement.
const WIRE_EPS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
const WIRE_DIST: f64 = 0.5;

fn note(detail: String) -> Violation {
    Violation { index: 0, t: None, at: Vec::new(), detail }
}

/// Field check on [-ρ, ρ], the shrunk interval as a negative control, and
/// arcs released from rest.
fn pointing<F: PlanarField<f64> + Clone>(field: &F, seed: u64, cfg: &Config) -> Result<Report, CliError> {
    let rho = field.extent();
    let interval = Interval::bounded(-rho, rho)?;
    let grid = Grid { x: (-5.0 * rho, 5.0 * rho), z: (0.0, 5.0 * rho), nx: 50, nz: 50 };
    let field_rep = check_field_pointing(field, &interval, &grid).report;

    let shrunk = Interval::bounded(-0.5 * rho, 0.5 * rho)?;
    let neg = check_field_pointing(field, &shrunk, &grid).report;
    let mut control = Report::new("negative-control").stat("violations", neg.violations.len() as f64);
    if neg.pass {
        control.violate(note("shrunk interval passed the field check".into()));
    }

    let mut arcs = Report::new("released-arcs");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut landed = 0usize;
    for k in 0..ARCS {
        let y = [rng.gen_range(-5.0..5.0) * rho, rng.gen_range(0.2..5.0) * rho, 0.0, 0.0];
        let tr = integrate_planar(field, PlanarState::from_array(y), &Until::event(EventKind::ZCrossDown, 1e4), cfg)?;
        match check_trajectory_pointing(&tr, &interval, 16) {
            Ok(r) if r.pass() => landed += r.landing.is_some() as usize,
            Ok(r) => {
                let d = r.report.violations.first().map(|v| v.detail.clone()).unwrap_or_default();
                arcs.violate(Violation { index: k, t: None, at: y.to_vec(), detail: d });
            }
            Err(e) => arcs.violate(Violation { index: k, t: None, at: y.to_vec(), detail: e.to_string() }),
        }
    }
    arcs = arcs.stat("arcs", ARCS as f64).stat("landed", landed as f64).stat("seed", seed as f64);
    Ok(Report::merge("pointing", &[field_rep, control, arcs]))
}

fn hill<F: PlanarField<f64>>(field: &F, delta: f64, euler: bool) -> Result<Report, CliError> {
    let h = hill_radius(field, delta)?;
    println!("R_delta = {}", h.r_delta);
    println!("A = {}", h.a_coef);
    println!("Lambda = {}", h.lambda);
    println!("T_delta = {}", h.t_delta);
    let mut rep = Report::new("hill")
        .stat("delta", delta)
        .stat("r_delta", h.r_delta)
        .stat("a_coef", h.a_coef)
        .stat("lambda", h.lambda)
        .stat("t_delta", h.t_delta);
    if !h.validated {
        rep.violate(note("sampled sublevel set leaves the ball".into()));
    }
    if euler {
        // V >= -M/(|p| - ρ) outside the centers, so R_δ <= M/(-δ) + ρ
        let bound = field.total_mass() / (-delta) + field.extent();
        println!("R_delta_bound = {bound}");
        rep = rep.stat("r_delta_bound", bound);
        if h.r_delta > bound {
            rep.violate(note(format!("R_delta {} above {bound}", h.r_delta)));
        }
    }
    Ok(rep)
}

fn wire(cfg: &RunConfig) -> Result<Report, CliError> {
    let density = cfg.ring()?.density();
    let w = measure_wire_constant(density, &WIRE_EPS, WIRE_DIST)?;
    println!("{}", w.statement());
    let mut rep =
        Report::new("wire").stat("measured", w.extrapolated).stat("claimed", w.claimed).stat("order", w.order);
    for (k, (e, v)) in w.samples.iter().enumerate() {
        rep = rep.stat(&format!("sample_{k}_eps"), *e).stat(&format!("sample_{k}_value"), *v);
    }
    Ok(rep)
}

fn suite<F: PlanarField<f64> + Clone>(cfg: &RunConfig, field: &F, kind: VerifyKind) -> Result<Report, CliError> {
    let icfg = cfg.integrator();
    let delta = cfg.delta.unwrap_or(DEFAULT_DELTA);
    let euler = cfg.system == SystemKind::Euler;
    Ok(match kind {
        VerifyKind::Pointing => pointing(field, cfg.seed, &icfg)?,
        VerifyKind::Hill => hill(field, delta, euler)?,
        VerifyKind::ReturnTime => check_return_time(field, delta, cfg.n, cfg.seed, &icfg)?,
        VerifyKind::Lemmas => scalar_ode_lemmas(&LEMMA_STIFFNESS),
        VerifyKind::Wire => wire(cfg)?,
        VerifyKind::All => {
            let mut parts = Vec::new();
            for k in [VerifyKind::Pointing, VerifyKind::Hill, VerifyKind::ReturnTime, VerifyKind::Lemmas] {
                parts.push(suite(cfg, field, k)?);
            }
            if !euler {
                parts.push(wire(cfg)?);
            }
            Report::merge("all", &parts)
        }
    })
}

pub fn run(cfg: &RunConfig, kind: VerifyKind, json: Option<&Path>) -> Result<(), CliError> {
    if kind == VerifyKind::Wire && cfg.system == SystemKind::Euler {
        return Err(CliError::usage("verify wire applies to the ring only"));
    }
    let rep = match cfg.system {
        SystemKind::Ring => suite(cfg, &cfg.ring()?, kind)?,
        SystemKind::Euler => suite(cfg, &cfg.euler()?, kind)?,
    };
    for (k, v) in &rep.stats {
        println!("{k} = {v}");
    }
    for v in rep.violations.iter().take(10) {
        println!("violation {}: {} at {:?}", v.index, v.detail, v.at);
    }
    println!("{} {}", rep.check, if rep.pass { "PASS" } else { "FAIL" });
    if let Some(p) = json {
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(p, rep.to_json() + "\n")?;
    }
    if rep.pass {
        Ok(())
    } else {
        Err(CliError::failure(format!("{}: {} violation(s)", rep.check, rep.violations.len())))
    }
}
