use std::io::{Read, Write};

use super::events::{Event, EventKind, EventRecord};
use super::model::TraceKind;
use super::rk::DenseSegment;
use crate::io::fmt17;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
    pub energy: T,
    /// Accumulated angle; zero for traces without one.
    pub phi: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination<T> {
    Time,
    Event(EventKind<T>),
    Collision,
    /// Read back from a file.
    Imported,
}

/// Samples at accepted steps, located events and the piecewise interpolant.
#[derive(Clone, Debug)]
pub struct OrbitTrace<T, const N: usize> {
    pub kind: TraceKind,
    pub samples: Vec<Sample<T, N>>,
    pub events: Vec<Event<T, N>>,
    /// max |E(t) - E(0)| / |E(0)| over the samples.
    pub energy_drift: T,
    pub termination: Termination<T>,
    pub segments: Vec<DenseSegment<T, N>>,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceIoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("format: {0}")]
    Format(String),
}

impl<T: Real, const N: usize> OrbitTrace<T, N> {
    pub fn start(&self) -> &Sample<T, N> {
        &self.samples[0]
    }

    pub fn end(&self) -> &Sample<T, N> {
        self.samples.last().expect("trace has samples")
    }

    pub fn duration(&self) -> T {
        self.end().t - self.start().t
    }

    pub fn collided(&self) -> bool {
        matches!(self.termination, Termination::Collision)
    }

    pub fn events_of(&self, kind: EventKind<T>) -> impl Iterator<Item = &Event<T, N>> {
        self.events.iter().filter(move |e| e.kind.same_kind(&kind))
    }

    /// Interpolated state; `None` outside the covered interval or for
    /// imported traces.
    pub fn state_at(&self, t: T) -> Option<[T; N]> {
        if self.segments.is_empty() {
            return None;
        }
        let forward = self.segments[0].h > T::zero();
        let idx = if forward {
            self.segments.partition_point(|s| s.t_end < t)
        } else {
            self.segments.partition_point(|s| s.t_end > t)
        };
        let seg = self.segments.get(idx)?;
        if seg.contains(t) {
            Some(seg.eval(t))
        } else {
            None
        }
    }

    /// Points of the interpolant, `per_segment` equally spaced in each step
    /// plus the final point.
    pub fn dense_points(&self, per_segment: usize) -> Vec<(T, [T; N])> {
        let mut out = Vec::with_capacity(self.segments.len() * per_segment + 1);
        let n = T::from_usize(per_segment.max(1)).unwrap();
        for seg in &self.segments {
            let span = seg.t_end - seg.t0;
            for j in 0..per_segment.max(1) {
                let t = seg.t0 + span * T::from_usize(j).unwrap() / n;
                out.push((t, seg.eval(t)));
            }
        }
        let last = self.end();
        out.push((last.t, last.y));
        out
    }

    pub fn recompute_drift(&mut self) {
        let e0 = self.samples[0].energy;
        let scale = if e0 != T::zero() { e0.abs() } else { T::one() };
        self.energy_drift = self.samples.iter().fold(T::zero(), |m, s| m.max((s.energy - e0).abs() / scale));
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), TraceIoError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(self.kind.header())?;
        let reduced = self.kind == TraceKind::Reduced;
        for s in &self.samples {
            let mut row = Vec::with_capacity(N + 3);
            row.push(fmt17(s.t.as_f64()));
            row.extend(s.y.iter().map(|v| fmt17(v.as_f64())));
            if reduced {
                row.push(fmt17(s.phi.as_f64()));
            }
            row.push(fmt17(s.energy.as_f64()));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(kind: TraceKind, r: R) -> Result<Self, TraceIoError> {
        let mut rd = csv::Reader::from_reader(r);
        let header: Vec<String> = rd.headers()?.iter().map(|s| s.to_string()).collect();
        if header != kind.header() {
            return Err(TraceIoError::Format(format!("unexpected header {header:?}")));
        }
        let reduced = kind == TraceKind::Reduced;
        let mut samples = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| TraceIoError::Format(e.to_string())))
                .collect::<Result<_, _>>()?;
            if vals.len() != header.len() {
                return Err(TraceIoError::Format("row width".into()));
            }
            let mut y = [T::zero(); N];
            for i in 0..N {
                y[i] = T::lit(vals[1 + i]);
            }
            let phi = if reduced { T::lit(vals[1 + N]) } else { T::zero() };
            samples.push(Sample { t: T::lit(vals[0]), y, energy: T::lit(*vals.last().unwrap()), phi });
        }
        if samples.is_empty() {
            return Err(TraceIoError::Format("empty trace".into()));
        }
        let mut tr = OrbitTrace {
            kind,
            samples,
            events: Vec::new(),
            energy_drift: T::zero(),
            termination: Termination::Imported,
            segments: Vec::new(),
        };
        tr.recompute_drift();
        Ok(tr)
    }

    pub fn write_events_json<W: Write>(&self, w: W) -> Result<(), TraceIoError> {
        let recs: Vec<EventRecord> = self.events.iter().map(|e| e.record()).collect();
        serde_json::to_writer_pretty(w, &recs)?;
        Ok(())
    }

    pub fn read_events_json<R: Read>(r: R) -> Result<Vec<Event<T, N>>, TraceIoError> {
        let recs: Vec<EventRecord> = serde_json::from_reader(r)?;
        recs.iter()
            .map(|r| Event::from_record(r).ok_or_else(|| TraceIoError::Format(format!("bad event {}", r.kind))))
            .collect()
    }
}
