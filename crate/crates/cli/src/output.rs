use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ring_dynamics::dynamics::{OrbitTrace, Termination};
use ring_dynamics::io::fmt17;
use ring_dynamics::search::PeriodicOrbit;
use ring_dynamics::Real;

use crate::config::RunConfig;
use crate::error::CliError;

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_trace<T: Real, const N: usize>(path: &Path, tr: &OrbitTrace<T, N>) -> Result<(), CliError> {
    tr.write_csv(create(path)?).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))
}

pub fn write_events<T: Real, const N: usize>(path: &Path, tr: &OrbitTrace<T, N>) -> Result<(), CliError> {
    tr.write_events_json(create(path)?).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))
}

/// Two whitespace-separated columns, one point per line.
pub fn write_dat(path: &Path, labels: (&str, &str), pts: impl IntoIterator<Item = (f64, f64)>) -> Result<(), CliError> {
    let mut w = create(path)?;
    writeln!(w, "# {} {}", labels.0, labels.1)?;
    for (a, b) in pts {
        writeln!(w, "{} {}", fmt17(a), fmt17(b))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_orbit(path: &Path, o: &PeriodicOrbit) -> Result<(), CliError> {
    let mut w = create(path)?;
    w.write_all(o.to_json().as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes the requested formats for `stem` in the output directory and
/// returns the paths written.
pub fn write_bundle<T: Real, const N: usize>(
    cfg: &RunConfig,
    stem: &str,
    orbit: &PeriodicOrbit,
    trace: &OrbitTrace<T, N>,
    projection: (&str, &str, usize, usize),
) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let dir = &cfg.out_dir;
    if cfg.wants("json") {
        let p = dir.join(format!("{stem}.json"));
        write_orbit(&p, orbit)?;
        written.push(p);
    }
    if cfg.wants("csv") {
        let p = dir.join(format!("{stem}.csv"));
        write_trace(&p, trace)?;
        written.push(p);
    }
    if cfg.wants("dat") {
        let p = dir.join(format!("{stem}.dat"));
        let (la, lb, ia, ib) = projection;
        let pts = trace.dense_points(8).into_iter().map(|(_, y)| (y[ia].as_f64(), y[ib].as_f64()));
        write_dat(&p, (la, lb), pts)?;
        written.push(p);
    }
    Ok(written)
}

pub fn termination_name<T: Real>(t: &Termination<T>) -> String {
    match t {
        Termination::Time => "time".into(),
        Termination::Event(k) => format!("event {}", k.name()),
        Termination::Collision => "collision".into(),
        Termination::Imported => "imported".into(),
    }
}
