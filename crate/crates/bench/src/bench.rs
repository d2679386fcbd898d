//! Timed repeated runs of one engine configuration.

use std::path::PathBuf;
use std::time::Instant;

use pso_core::fitness::{self, FitnessFn};
use pso_core::runtime::Executor;
use pso_core::{EngineKind, IterationReport, PsoParams, RngKey, Run};
use sha2::{Digest, Sha256};

use crate::record::{CsvSink, Row};
use crate::BenchError;

pub const DEFAULT_REPEAT: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub engine: EngineKind,
    pub particles: usize,
    pub dims: usize,
    pub iters: usize,
    pub seeds: Vec<u64>,
    /// Runs per seed. The trimmed mean needs at least 3.
    pub repeat: usize,
    pub fitness: String,
    pub group_size: usize,
    /// CSV file the rows are appended to.
    pub out: Option<PathBuf>,
}

impl BenchConfig {
    /// Seed 1, ten repeats, cubic fitness, groups of 128, no output file.
    pub fn new(engine: EngineKind, particles: usize, dims: usize, iters: usize) -> Self {
        Self {
            engine,
            particles,
            dims,
            iters,
            seeds: vec![1],
            repeat: DEFAULT_REPEAT,
            fitness: "cubic".into(),
            group_size: pso_core::DEFAULT_GROUP_SIZE,
            out: None,
        }
    }
}

/// Timings and outcome of `repeat` runs of one configuration with one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub engine: EngineKind,
    pub particles: usize,
    pub dims: usize,
    pub iters: usize,
    pub seed: u64,
    /// Wall time of the iteration loop of each run, in run order.
    pub seconds: Vec<f64>,
    /// `None` with fewer than three runs.
    pub trimmed_mean: Option<f64>,
    pub final_gbest_fit: f64,
    pub trace_checksum: String,
}

impl BenchRecord {
    /// The trimmed mean, or the plain mean when too few runs were made.
    pub fn summary_seconds(&self) -> f64 {
        self.trimmed_mean
            .unwrap_or_else(|| self.seconds.iter().sum::<f64>() / self.seconds.len() as f64)
    }
}

/// Mean after discarding one minimum and one maximum.
pub fn trimmed_mean(times: &[f64]) -> Option<f64> {
    if times.len() < 3 {
        return None;
    }
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    let kept = &sorted[1..sorted.len() - 1];
    Some(kept.iter().sum::<f64>() / kept.len() as f64)
}

/// First 8 bytes of SHA-256 over the little-endian bits of the trace, in hex.
pub fn trace_checksum(trace: &[f64]) -> String {
    let mut hasher = Sha256::new();
    for f in trace {
        hasher.update(f.to_bits().to_le_bytes());
    }
    hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Standard settings (w = 1, c1 = c2 = 2) with the position box taken from the
/// fitness function's domain.
pub fn bench_params(config: &BenchConfig) -> Result<(PsoParams, FitnessFn), BenchError> {
    let fitness =
        fitness::lookup(&config.fitness).ok_or_else(|| BenchError::UnknownFitness(config.fitness.clone()))?;
    let params = PsoParams::builder()
        .inertia(1.0)
        .cognitive(2.0)
        .social(2.0)
        .position_bounds(fitness.lower(), fitness.upper())
        .particles(config.particles)
        .dims(config.dims)
        .iterations(config.iters)
        .group_size(config.group_size)
        .build()
        .map_err(pso_core::PsoError::from)?;
    Ok((params, fitness))
}

/// Runs every seed `repeat` times and returns one record per seed.
///
/// Only [`Run::finish`] is timed. Rows are appended to `config.out` as each run
/// completes; the file is opened before the first run. Repeats of a seed must
/// reproduce the same trace.
pub fn run_bench<E: Executor>(config: &BenchConfig, exec: &E) -> Result<Vec<BenchRecord>, BenchError> {
    if config.repeat == 0 {
        return Err(BenchError::NoRepeats);
    }
    let (params, fitness) = bench_params(config)?;
    let mut sink = config.out.as_deref().map(CsvSink::open).transpose()?;
    let mut records = Vec::with_capacity(config.seeds.len());
    for &seed in &config.seeds {
        let mut seconds = Vec::with_capacity(config.repeat);
        let mut outcome: Option<(f64, String)> = None;
        for run_idx in 0..config.repeat {
            let run = Run::new(config.engine, &params, &fitness, RngKey::new(seed))?;
            let start = Instant::now();
            let result = run.finish(exec, |_: &IterationReport<'_>| {})?;
            let elapsed = start.elapsed().as_secs_f64();
            let checksum = trace_checksum(&result.trace);
            match &outcome {
                Some((_, expected)) if *expected != checksum => {
                    return Err(BenchError::Nondeterministic {
                        engine: config.engine,
                        seed,
                        run_idx,
                        expected: expected.clone(),
                        got: checksum,
                    })
                }
                Some(_) => {}
                None => outcome = Some((result.best.fit, checksum)),
            }
            seconds.push(elapsed);
            if let (Some(sink), Some((fit, checksum))) = (sink.as_mut(), &outcome) {
                sink.write_row(&Row {
                    engine: config.engine.name().into(),
                    particles: config.particles,
                    dims: config.dims,
                    iters: config.iters,
                    seed,
                    run_idx,
                    seconds: elapsed,
                    final_gbest_fit: *fit,
                    trace_checksum: checksum.clone(),
                })?;
            }
        }
        let (final_gbest_fit, trace_checksum) = outcome.expect("repeat is nonzero");
        records.push(BenchRecord {
            engine: config.engine,
            particles: config.particles,
            dims: config.dims,
            iters: config.iters,
            seed,
            trimmed_mean: trimmed_mean(&seconds),
            seconds,
            final_gbest_fit,
            trace_checksum,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trimmed_mean_drops_extremes() {
        assert_eq!(trimmed_mean(&[1.0, 2.0, 3.0]), Some(2.0));
        assert_eq!(trimmed_mean(&[3.0, 100.0, 1.0, 2.0, 0.0]), Some(2.0));
        assert_eq!(trimmed_mean(&[1.0, 2.0]), None);
    }

    #[test]
    fn trimmed_mean_of_ten_keeps_eight() {
        let times: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(trimmed_mean(&times), Some(44.0 / 8.0));
    }

    #[test]
    fn checksum_depends_on_every_bit() {
        let a = trace_checksum(&[1.0, 2.0]);
        assert_eq!(a.len(), 16);
        assert_eq!(a, trace_checksum(&[1.0, 2.0]));
        assert_ne!(a, trace_checksum(&[1.0, f64::from_bits(2.0f64.to_bits() + 1)]));
        assert_ne!(a, trace_checksum(&[2.0, 1.0]));
    }
}
