//! CSV output of the per-iteration statistics.
//!
//! Floats are written in Rust's shortest round-trip form, so a value read
//! back parses to the same `f64`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use qapswarm_core::IterationStats;
use thiserror::Error;

pub const STATS_HEADER: [&str; 8] = ["iter", "p5", "p25", "p50", "p75", "best", "global_best", "time_ms"];
pub const PMF_HEADER: [&str; 4] = ["iter", "bin_lo", "bin_hi", "freq"];
pub const SWARMS_HEADER: [&str; 7] = ["iter", "swarm", "best", "p5", "p25", "p50", "p75"];

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("nothing to export: the statistics series is empty")]
    Empty,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn csv_io(err: csv::Error) -> io::Error {
    match err.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn write_stats<W: Write>(series: &[IterationStats], out: W) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(STATS_HEADER).map_err(csv_io)?;
    for s in series {
        let row = [
            s.iteration.to_string(),
            s.p5().to_string(),
            s.p25().to_string(),
            s.p50().to_string(),
            s.p75().to_string(),
            s.best.to_string(),
            s.global_best.to_string(),
            s.time_ms.to_string(),
        ];
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()
}

pub fn write_pmf<W: Write>(series: &[IterationStats], out: W) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(PMF_HEADER).map_err(csv_io)?;
    for s in series {
        for (i, freq) in s.pmf.freqs.iter().enumerate() {
            let (lo, hi) = s.pmf.edges(i);
            w.write_record([s.iteration.to_string(), lo.to_string(), hi.to_string(), freq.to_string()])
                .map_err(csv_io)?;
        }
    }
    w.flush()
}

/// Per-swarm best costs, with percentiles for the swarms that have them
/// recorded and empty fields otherwise.
pub fn write_swarms<W: Write>(series: &[IterationStats], out: W) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(SWARMS_HEADER).map_err(csv_io)?;
    for s in series {
        for (swarm, best) in s.swarm_bests.iter().enumerate() {
            let mut row = vec![s.iteration.to_string(), swarm.to_string(), best.to_string()];
            match s.swarm_percentiles.iter().find(|p| p.swarm == swarm) {
                Some(p) => row.extend(p.values.iter().map(f64::to_string)),
                None => row.extend(std::iter::repeat_n(String::new(), 4)),
            }
            w.write_record(&row).map_err(csv_io)?;
        }
    }
    w.flush()
}

fn write_file(path: PathBuf, f: impl FnOnce(BufWriter<File>) -> io::Result<()>) -> Result<(), ExportError> {
    File::create(&path)
        .and_then(|file| f(BufWriter::new(file)))
        .map_err(|source| ExportError::Io { path, source })
}

/// Writes `stats.csv` and `pmf.csv` into `dir`.
pub fn export_csv(series: &[IterationStats], dir: impl AsRef<Path>) -> Result<(), ExportError> {
    if series.is_empty() {
        return Err(ExportError::Empty);
    }
    let dir = dir.as_ref();
    write_file(dir.join("stats.csv"), |w| write_stats(series, w))?;
    write_file(dir.join("pmf.csv"), |w| write_pmf(series, w))
}

/// Writes `swarms.csv` into `dir`.
pub fn export_swarm_csv(series: &[IterationStats], dir: impl AsRef<Path>) -> Result<(), ExportError> {
    if series.is_empty() {
        return Err(ExportError::Empty);
    }
    write_file(dir.as_ref().join("swarms.csv"), |w| write_swarms(series, w))
}
