use ring_dynamics::potential::{oracle_force, oracle_nodes, oracle_potential};

use crate::config::{RunConfig, SystemKind};
use crate::error::CliError;

pub fn parse_vec(what: &str, s: &str, lens: &[usize]) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::usage(format!("{what}: not a number: {x}"))))
        .collect::<Result<_, _>>()?;
    if !lens.contains(&v.len()) || v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::usage(format!("{what}: expected {lens:?} finite components, got {s}")));
    }
    Ok(v)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn run(cfg: &RunConfig, at: &str, oracle: bool) -> Result<(), CliError> {
    let p = parse_vec("--at", at, &[3])?;
    let p = [p[0], p[1], p[2]];
    let (v, f) = match cfg.system {
        SystemKind::Ring => {
            let ring = cfg.ring()?;
            (ring.potential(p)?, ring.force(p)?)
        }
        SystemKind::Euler => {
            if oracle {
                return Err(CliError::usage("--oracle applies to the ring only"));
            }
            // two centers on the x-axis: axisymmetric about it
            let e = cfg.euler()?;
            let s = p[1].hypot(p[2]);
            let v = e.potential([p[0], s])?;
            let a = e.force([p[0], s])?;
            let (uy, uz) = if s > 0.0 { (p[1] / s, p[2] / s) } else { (0.0, 0.0) };
            (v, [a[0], a[1] * uy, a[1] * uz])
        }
    };
    println!("V = {v}");
    println!("F = {}, {}, {}", f[0], f[1], f[2]);
    if oracle {
        let ring = cfg.ring()?;
        let n = oracle_nodes(&ring, p);
        let vq = oracle_potential(&ring, p, n);
        let fq = oracle_force(&ring, p, n);
        let fnorm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        let df = f.iter().zip(&fq).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let dv = rel(v, vq);
        let dfr = if fnorm > 0.0 { df / fnorm } else { df };
        println!("V_quadrature = {vq}");
        println!("F_quadrature = {}, {}, {}", fq[0], fq[1], fq[2]);
        println!("nodes = {n}");
        println!("rel_diff_V = {dv:e}");
        println!("rel_diff_F = {dfr:e}");
        if dv > 1e-10 || dfr > 1e-10 {
            return Err(CliError::failure(format!("oracle disagreement {dv:e} / {dfr:e} above 1e-10")));
        }
    }
    Ok(())
}
