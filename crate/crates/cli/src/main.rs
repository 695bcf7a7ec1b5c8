mod config;
mod error;
mod eval;
mod integrate;
mod output;
mod search;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{parse_list, parse_method, parse_target, RunConfig, SystemKind};
use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "ring-dynamics",
    version,
    about = "Periodic orbits of a particle attracted by a fixed homogeneous circle"
)]
struct Cli {
    #[command(flatten)]
    system: SystemArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct SystemArgs {
    /// Configuration file (`section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Ring radius, or half the distance between the two centers.
    #[arg(long, global = true)]
    rho: Option<f64>,
    #[arg(long, global = true)]
    mass: Option<f64>,
    /// Linear density; overrides --mass for the ring.
    #[arg(long, global = true)]
    density: Option<f64>,
    /// Use the two-center system instead of the ring.
    #[arg(long, global = true)]
    euler: bool,
    #[arg(long = "rel-tol", global = true)]
    rel_tol: Option<f64>,
    #[arg(long = "abs-tol", global = true)]
    abs_tol: Option<f64>,
    /// dop853 or dopri5.
    #[arg(long, global = true)]
    method: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Potential and acceleration at a point.
    Eval {
        /// x,y,z
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Also evaluate by brute-force quadrature and report the difference.
        #[arg(long)]
        oracle: bool,
    },
    /// Integrate an initial state and write the trace.
    Integrate {
        /// x,z,vx,vz (vertical plane) or x,y,z,vx,vy,vz.
        #[arg(long, allow_hyphen_values = true)]
        init: String,
        /// `time:T` or `event:KIND[@LEVEL]`.
        #[arg(long, default_value = "time:100")]
        until: String,
        /// Time cap when stopping on an event.
        #[arg(long = "t-max", default_value_t = 1e4)]
        t_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a periodic orbit.
    Search(SearchArgs),
    /// Run verification suites; exits 1 on any violation.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SearchKind {
    Far,
    Near,
    Eight,
    Spiral,
    EulerEight,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(value_enum)]
    kind: SearchKind,
    #[arg(long)]
    eps: Option<f64>,
    /// Angular momentum of the spiral orbit.
    #[arg(long = "K", allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long)]
    family: Option<usize>,
    #[arg(long)]
    qmax: Option<i64>,
    /// `auto` or `p/q`.
    #[arg(long)]
    target: Option<String>,
    /// Height schedule for the eight search, comma separated.
    #[arg(long)]
    heights: Option<String>,
    #[arg(long = "eps-min")]
    eps_min: Option<f64>,
    #[arg(long = "eps-max")]
    eps_max: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long = "closure-tol")]
    closure_tol: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma separated subset of json,csv,dat.
    #[arg(long)]
    formats: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    All,
    Pointing,
    Hill,
    ReturnTime,
    Lemmas,
    Wire,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    kind: VerifyKind,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn configure(a: &SystemArgs) -> Result<RunConfig, CliError> {
    let mut c = match &a.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if a.euler {
        c.system = SystemKind::Euler;
    }
    if let Some(v) = a.rho {
        c.rho = v;
    }
    if let Some(v) = a.mass {
        c.mass = v;
        c.density = None;
    }
    if let Some(v) = a.density {
        c.density = Some(v);
    }
    if let Some(v) = a.rel_tol {
        c.rel_tol = Some(v);
    }
    if let Some(v) = a.abs_tol {
        c.abs_tol = Some(v);
    }
    if let Some(m) = &a.method {
        c.method = parse_method(m)?;
    }
    if let Some(s) = a.seed {
        c.seed = s;
    }
    Ok(c)
}

fn apply_search(c: &mut RunConfig, a: &SearchArgs) -> Result<(), CliError> {
    if let Some(v) = a.eps {
        c.eps = Some(v);
    }
    if let Some(v) = a.k {
        c.k = Some(v);
    }
    if let Some(v) = a.family {
        c.family = v;
    }
    if let Some(v) = a.qmax {
        c.qmax = v;
    }
    if let Some(t) = &a.target {
        c.target = parse_target(t)?;
    }
    if let Some(h) = &a.heights {
        c.heights = Some(parse_list("--heights", h)?);
    }
    match (a.eps_min, a.eps_max) {
        (Some(lo), Some(hi)) => c.eps_range = Some((lo, hi)),
        (None, None) => {}
        _ => return Err(CliError::usage("--eps-min and --eps-max go together")),
    }
    if let Some(g) = a.grid {
        c.grid = Some(g);
    }
    if let Some(t) = a.closure_tol {
        c.closure_tol = Some(t);
    }
    if let Some(o) = &a.out {
        c.out_dir = o.clone();
    }
    if let Some(f) = &a.formats {
        c.formats = f.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    }
    Ok(())
}

fn threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("RING_DYNAMICS_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| CliError::usage(format!("RING_DYNAMICS_THREADS: {v}")))?;
        if n > 0 {
            // a second initialization in the same process is harmless
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    threads()?;
    let mut cfg = configure(&cli.system)?;
    match cli.cmd {
        Cmd::Eval { at, oracle } => {
            cfg.validate()?;
            eval::run(&cfg, &at, oracle)
        }
        Cmd::Integrate { init, until, t_max, out } => {
            cfg.validate()?;
            integrate::run(&cfg, &init, &until, t_max, out.as_deref())
        }
        Cmd::Search(a) => {
            apply_search(&mut cfg, &a)?;
            cfg.validate()?;
            search::run(&cfg, a.kind)
        }
        Cmd::Verify(a) => {
            if let Some(d) = a.delta {
                cfg.delta = Some(d);
            }
            if let Some(n) = a.n {
                cfg.n = n;
            }
            cfg.validate()?;
            verify::run(&cfg, a.kind, a.json.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
