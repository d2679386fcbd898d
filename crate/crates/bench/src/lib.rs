//! Std companion to `pso-core`: a multithreaded executor, the benchmark
//! harness behind the `pso-bench` binary, its CSV format and speedup tables.

pub mod bench;
pub mod executor;
pub mod record;
pub mod stress;
pub mod sweep;
pub mod table;

pub use bench::{bench_params, run_bench, trace_checksum, trimmed_mean, BenchConfig, BenchRecord};
pub use executor::{available_contexts, LaneMode, Perturbation, ThreadedExecutor};
pub use sweep::Sweep;
pub use table::{emit_ranking, emit_table, rank_engines, speedup_ratio, CellRanking, TableFormat};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("unknown fitness function {0:?}")]
    UnknownFitness(String),
    #[error("repeat must be at least 1")]
    NoRepeats,
    #[error(transparent)]
    Pso(#[from] pso_core::PsoError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed csv: {0}")]
    Malformed(String),
    #[error("{engine} seed {seed}: run {run_idx} produced checksum {got}, run 0 produced {expected}")]
    Nondeterministic {
        engine: pso_core::EngineKind,
        seed: u64,
        run_idx: usize,
        expected: String,
        got: String,
    },
    #[error("no serial baseline for {particles} particles, {dims} dims, {iters} iterations")]
    MissingBaseline { particles: usize, dims: usize, iters: usize },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}
