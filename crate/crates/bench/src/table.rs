//! Speedup tables and engine ranking.

use std::collections::BTreeMap;
use std::fmt::Write;

use pso_core::EngineKind;

use crate::bench::BenchRecord;
use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Markdown,
    Csv,
}

/// `serial / engine`, truncated to two decimals.
pub fn speedup_ratio(serial_seconds: f64, engine_seconds: f64) -> f64 {
    // The epsilon keeps exact quotients like 1.75 from landing on 1.74.
    ((serial_seconds / engine_seconds) * 100.0 + 1e-9).floor() / 100.0
}

/// (particles, dims, iters)
type Cell = (usize, usize, usize);

/// Mean over seeds of each record's summary time, per engine and cell.
fn cell_times(records: &[BenchRecord]) -> BTreeMap<(usize, Cell), f64> {
    let mut sums: BTreeMap<(usize, Cell), (f64, usize)> = BTreeMap::new();
    for r in records {
        let rank = EngineKind::ALL.iter().position(|&k| k == r.engine).unwrap_or(usize::MAX);
        let e = sums.entry((rank, (r.particles, r.dims, r.iters))).or_default();
        e.0 += r.summary_seconds();
        e.1 += 1;
    }
    sums.into_iter().map(|(k, (sum, n))| (k, sum / n as f64)).collect()
}

/// One section per parallel engine and dimension count, with columns
/// particles, iteration, serial seconds, engine seconds and speedup ratio.
/// Every engine cell needs a serial record with the same particles, dims and
/// iterations.
pub fn emit_table(records: &[BenchRecord], format: TableFormat) -> Result<String, BenchError> {
    let times = cell_times(records);
    let serial: BTreeMap<Cell, f64> = times
        .iter()
        .filter(|((rank, _), _)| *rank == 0)
        .map(|((_, cell), &t)| (*cell, t))
        .collect();
    let mut out = String::new();
    if format == TableFormat::Csv {
        out.push_str("engine,dims,particles,iteration,serial_seconds,engine_seconds,speedup_ratio\n");
    }
    let mut section = None;
    for (&(rank, cell), &t) in &times {
        if rank == 0 {
            continue;
        }
        let engine = EngineKind::ALL[rank];
        let (particles, dims, iters) = cell;
        let base = *serial
            .get(&cell)
            .ok_or(BenchError::MissingBaseline { particles, dims, iters })?;
        let ratio = speedup_ratio(base, t);
        match format {
            TableFormat::Csv => {
                writeln!(out, "{engine},{dims},{particles},{iters},{base},{t},{ratio:.2}").unwrap();
            }
            TableFormat::Markdown => {
                if section != Some((engine, dims)) {
                    if section.is_some() {
                        out.push('\n');
                    }
                    section = Some((engine, dims));
                    writeln!(out, "### {engine}, {dims}D\n").unwrap();
                    writeln!(out, "| Particles | Iteration | Serial (s) | {engine} (s) | Speedup Ratio |").unwrap();
                    out.push_str("|---:|---:|---:|---:|---:|\n");
                }
                writeln!(out, "| {particles} | {iters} | {base:.3} | {t:.3} | {ratio:.2} |").unwrap();
            }
        }
    }
    Ok(out)
}

/// Engines of one cell ordered from fastest to slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRanking {
    pub particles: usize,
    pub dims: usize,
    pub iters: usize,
    pub seconds: Vec<(EngineKind, f64)>,
}

impl CellRanking {
    pub fn seconds_of(&self, engine: EngineKind) -> Option<f64> {
        self.seconds.iter().find(|(k, _)| *k == engine).map(|&(_, t)| t)
    }
}

pub fn rank_engines(records: &[BenchRecord]) -> Vec<CellRanking> {
    let mut cells: BTreeMap<Cell, Vec<(EngineKind, f64)>> = BTreeMap::new();
    for ((rank, cell), t) in cell_times(records) {
        cells.entry(cell).or_default().push((EngineKind::ALL[rank], t));
    }
    cells
        .into_iter()
        .map(|((particles, dims, iters), mut seconds)| {
            seconds.sort_by(|a, b| a.1.total_cmp(&b.1));
            CellRanking {
                particles,
                dims,
                iters,
                seconds,
            }
        })
        .collect()
}

/// Plain-text ranking: time, slowdown against the fastest engine and, when a
/// serial record exists, the speedup over it.
pub fn emit_ranking(records: &[BenchRecord]) -> String {
    let mut out = String::new();
    for cell in rank_engines(records) {
        writeln!(out, "{} particles, {}D, {} iterations", cell.particles, cell.dims, cell.iters).unwrap();
        let fastest = cell.seconds[0].1;
        let serial = cell.seconds_of(EngineKind::Serial);
        for (i, &(engine, t)) in cell.seconds.iter().enumerate() {
            write!(out, "  {}. {:<10} {:>10.4} s  {:>6.2}x fastest", i + 1, engine.name(), t, t / fastest).unwrap();
            if let Some(s) = serial {
                write!(out, "  speedup {:.2}", speedup_ratio(s, t)).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_examples() {
        assert_eq!(speedup_ratio(0.385, 0.220), 1.75);
        assert_eq!(speedup_ratio(2.5, 2.5), 1.0);
    }
}
