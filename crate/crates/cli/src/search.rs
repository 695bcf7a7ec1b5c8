use ring_dynamics::search::{
    eight_family, euler_path, find_far_orbit, find_near_orbit, find_spiral, ring_path, AssembledEight, EightOptions,
    OrbitClass, PeriodicOrbit, SpiralOptions, SymmetricOrbit,
};

use crate::config::{RunConfig, SystemKind};
use crate::error::CliError;
use crate::output::{write_bundle, write_trace};
use crate::SearchKind;

fn summary(o: &PeriodicOrbit) {
    println!("class = {}", o.class.name());
    let s: Vec<String> = o.initial_state.iter().map(|v| v.to_string()).collect();
    println!("initial_state = {}", s.join(", "));
    println!("period = {}", o.period);
    println!("closure = {:e}", o.closure_error);
    let sym: Vec<&str> = o
        .symmetries
        .iter()
        .map(|s| match s {
            ring_dynamics::search::Symmetry::XAxis => "x-axis",
            ring_dynamics::search::Symmetry::ZAxis => "z-axis",
            ring_dynamics::search::Symmetry::Both => "both",
        })
        .collect();
    println!("symmetries = {}", sym.join(", "));
}

fn written(paths: Vec<std::path::PathBuf>) {
    for p in paths {
        println!("wrote = {}", p.display());
    }
}

fn symmetric(cfg: &RunConfig, stem: &str, o: &SymmetricOrbit<f64>) -> Result<(), CliError> {
    summary(&o.orbit);
    println!("x0 = {}", o.x0);
    println!("v0 = {}", o.v0);
    println!("eps = {}", o.eps);
    let c: Vec<String> = o.crossings.iter().map(|v| v.to_string()).collect();
    println!("axis_crossings = {}", c.join(", "));
    println!("energy_drift = {:e}", o.trace.energy_drift);
    written(write_bundle(cfg, stem, &o.orbit, &o.trace, ("x", "z", 0, 1))?);
    Ok(())
}

fn eight(cfg: &RunConfig, stem: &str, e: &AssembledEight<f64>) -> Result<(), CliError> {
    summary(&e.orbit);
    if let Some(f) = e.orbit.metadata.family {
        println!("family = {f}");
    }
    println!("joint_mismatch = {:e}", e.joint_mismatch);
    println!("assembly_defect = {:e}", e.assembly_defect);
    println!("energy_spread = {:e}", e.energy_spread);
    println!("energy_drift = {:e}", e.trace.energy_drift);
    written(write_bundle(cfg, stem, &e.orbit, &e.trace, ("x", "z", 0, 1))?);
    Ok(())
}

fn eight_opts(cfg: &RunConfig) -> EightOptions<f64> {
    let mut o = EightOptions::default();
    if let Some(h) = &cfg.heights {
        o.heights = h.clone();
    }
    o
}

pub fn run(cfg: &RunConfig, kind: SearchKind) -> Result<(), CliError> {
    let scfg = cfg.search();
    let eps = cfg.eps.unwrap_or(0.05);
    match (kind, cfg.system) {
        (SearchKind::Far, SystemKind::Ring) => symmetric(cfg, "far", &find_far_orbit(&cfg.ring()?, eps, &scfg)?),
        (SearchKind::Far, SystemKind::Euler) => symmetric(cfg, "far", &find_far_orbit(&cfg.euler()?, eps, &scfg)?),
        (SearchKind::Near, SystemKind::Ring) => {
            let ring = cfg.ring()?;
            let o = find_near_orbit(&ring, eps, &scfg)?;
            let rho = ring.radius();
            let (lo, hi) = o.trace.samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| {
                let d = (s.y[0].abs() - rho).hypot(s.y[1]);
                (lo.min(d), hi.max(d))
            });
            println!("dist_range = {lo}, {hi}");
            symmetric(cfg, "near", &o)
        }
        (SearchKind::Eight, SystemKind::Ring) => {
            let ring = cfg.ring()?;
            let path = ring_path(&ring, cfg.family, &scfg)?;
            let e = eight_family(&ring, &path, OrbitClass::Eight, cfg.family, &eight_opts(cfg), &scfg)?;
            eight(cfg, &format!("eight-{}", cfg.family), &e)
        }
        (SearchKind::EulerEight, _) => {
            let sys = cfg.euler()?;
            let path = euler_path(&sys, cfg.family, &scfg)?;
            let e = eight_family(&sys, &path, OrbitClass::EulerEight, cfg.family, &eight_opts(cfg), &scfg)?;
            eight(cfg, &format!("euler-eight-{}", cfg.family), &e)
        }
        (SearchKind::Spiral, SystemKind::Ring) => {
            let k = cfg.k.ok_or_else(|| CliError::usage("search spiral needs --K"))?;
            let mut opts = SpiralOptions { target: cfg.target, qmax: cfg.qmax, ..SpiralOptions::default() };
            if let Some(r) = cfg.eps_range {
                opts.eps_range = r;
            }
            if let Some(g) = cfg.grid {
                opts.grid = g;
            }
            let s = find_spiral(&cfg.ring()?, k, &opts, &scfg)?;
            summary(&s.orbit);
            println!("p = {}", s.p);
            println!("q = {}", s.q);
            println!("theta = {}", s.theta);
            println!("theta_state = {}", s.theta_state);
            println!("eps = {}", s.eps);
            println!("momentum_drift = {:e}", s.momentum_drift);
            println!("dist_range = {}, {}", s.dist_range.0, s.dist_range.1);
            println!("energy_drift = {:e}", s.lifted_trace.energy_drift);
            let mut paths = write_bundle(cfg, "spiral", &s.orbit, &s.lifted_trace, ("x", "y", 0, 1))?;
            if cfg.wants("csv") {
                let p = cfg.out_dir.join("spiral-reduced.csv");
                write_trace(&p, &s.reduced_trace)?;
                paths.push(p);
            }
            written(paths);
            Ok(())
        }
        (k, SystemKind::Euler) => Err(CliError::usage(format!("search {k:?} applies to the ring only").to_lowercase())),
    }
}
