//! CSV rows, one per timed run.
//!
//! Columns: `engine,particles,dims,iters,seed,run_idx,seconds,final_gbest_fit,trace_checksum`.
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces the records exactly.

use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{trimmed_mean, BenchRecord};
use crate::BenchError;

pub const COLUMNS: [&str; 9] = [
    "engine",
    "particles",
    "dims",
    "iters",
    "seed",
    "run_idx",
    "seconds",
    "final_gbest_fit",
    "trace_checksum",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub engine: String,
    pub particles: usize,
    pub dims: usize,
    pub iters: usize,
    pub seed: u64,
    pub run_idx: usize,
    pub seconds: f64,
    pub final_gbest_fit: f64,
    pub trace_checksum: String,
}

impl Row {
    fn from_record(record: &BenchRecord) -> impl Iterator<Item = Row> + '_ {
        record.seconds.iter().enumerate().map(|(run_idx, &seconds)| Row {
            engine: record.engine.name().into(),
            particles: record.particles,
            dims: record.dims,
            iters: record.iters,
            seed: record.seed,
            run_idx,
            seconds,
            final_gbest_fit: record.final_gbest_fit,
            trace_checksum: record.trace_checksum.clone(),
        })
    }
}

/// Appends rows to a file, writing the header only when the file is empty.
#[derive(Debug)]
pub struct CsvSink {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl CsvSink {
    pub fn open(path: &Path) -> Result<Self, BenchError> {
        let io = |source| BenchError::Io {
            path: path.to_owned(),
            source,
        };
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        let empty = file.metadata().map_err(io)?.len() == 0;
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if empty {
            writer.write_record(COLUMNS)?;
            writer.flush().map_err(io)?;
        }
        Ok(Self {
            path: path.to_owned(),
            writer,
        })
    }

    pub fn write_row(&mut self, row: &Row) -> Result<(), BenchError> {
        self.writer.serialize(row)?;
        self.writer.flush().map_err(|source| BenchError::Io {
            path: self.path.clone(),
            source,
        })
    }
}

/// Writes `records` with a header.
pub fn write_records<W: Write>(out: W, records: &[BenchRecord]) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_writer(out);
    for record in records {
        for row in Row::from_record(record) {
            writer.serialize(row)?;
        }
    }
    if records.is_empty() {
        writer.write_record(COLUMNS)?;
    }
    writer.flush().map_err(|source| BenchError::Io {
        path: PathBuf::from("<writer>"),
        source,
    })
}

/// Regroups rows into records. Consecutive runs `0, 1, ..` of the same
/// configuration and seed form one record; a run index of 0 starts a new one.
pub fn read_records<R: Read>(input: R) -> Result<Vec<BenchRecord>, BenchError> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?;
    if headers.iter().ne(COLUMNS) {
        return Err(BenchError::Malformed(format!("unexpected header {headers:?}")));
    }
    let mut records: Vec<BenchRecord> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for row in reader.deserialize::<Row>() {
        let row = row?;
        let engine = row
            .engine
            .parse()
            .map_err(|_| BenchError::Malformed(format!("unknown engine {:?}", row.engine)))?;
        let same = |r: &BenchRecord| {
            r.engine == engine
                && r.particles == row.particles
                && r.dims == row.dims
                && r.iters == row.iters
                && r.seed == row.seed
        };
        let existing = open.iter().position(|&i| same(&records[i]));
        if row.run_idx == 0 {
            if let Some(k) = existing {
                open.swap_remove(k);
            }
            open.push(records.len());
            records.push(BenchRecord {
                engine,
                particles: row.particles,
                dims: row.dims,
                iters: row.iters,
                seed: row.seed,
                seconds: vec![row.seconds],
                trimmed_mean: None,
                final_gbest_fit: row.final_gbest_fit,
                trace_checksum: row.trace_checksum,
            });
            continue;
        }
        let record = existing
            .map(|k| &mut records[open[k]])
            .filter(|r| r.seconds.len() == row.run_idx)
            .ok_or_else(|| BenchError::Malformed(format!("run {} of {} seed {} out of order", row.run_idx, row.engine, row.seed)))?;
        if record.final_gbest_fit.to_bits() != row.final_gbest_fit.to_bits()
            || record.trace_checksum != row.trace_checksum
        {
            return Err(BenchError::Malformed(format!(
                "run {} of {} seed {} disagrees with run 0",
                row.run_idx, row.engine, row.seed
            )));
        }
        record.seconds.push(row.seconds);
    }
    for record in &mut records {
        record.trimmed_mean = trimmed_mean(&record.seconds);
    }
    Ok(records)
}

pub fn read_records_from_path(path: &Path) -> Result<Vec<BenchRecord>, BenchError> {
    let file = File::open(path).map_err(|source| BenchError::Io {
        path: path.to_owned(),
        source,
    })?;
    read_records(file)
}
