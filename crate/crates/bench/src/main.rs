use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::Parser;
use pso_bench::record::write_records;
use pso_bench::{emit_ranking, emit_table, run_bench, BenchConfig, BenchError, Sweep, TableFormat, ThreadedExecutor};
use pso_core::EngineKind;

/// Times the swarm engines and writes one CSV row per run.
///
/// Without --out the rows go to stdout. --markdown prints speedup tables and
/// an engine ranking instead.
#[derive(Debug, Parser)]
#[command(name = "pso-bench", version)]
struct Cli {
    /// serial, reduction, unrolled, queue or queue-lock; repeatable, all by default.
    #[arg(long = "engine", value_name = "NAME")]
    engines: Vec<EngineKind>,
    /// Swarm size; repeatable.
    #[arg(long = "particles", value_name = "N", default_value = "1024")]
    particles: Vec<usize>,
    #[arg(long, value_name = "D", default_value_t = 1)]
    dims: usize,
    /// Iterations per run [default: 1000, or 100000 with --paper-scale].
    #[arg(long, value_name = "T")]
    iters: Option<usize>,
    /// Repeatable.
    #[arg(long = "seed", value_name = "S", default_value = "1")]
    seeds: Vec<u64>,
    #[arg(long, value_name = "R", default_value_t = pso_bench::bench::DEFAULT_REPEAT)]
    repeat: usize,
    #[arg(long, value_name = "NAME", default_value = "cubic",
          value_parser = PossibleValuesParser::new(pso_core::fitness::NAMES))]
    fitness: String,
    #[arg(long, value_name = "G", default_value_t = pso_core::DEFAULT_GROUP_SIZE)]
    group_size: usize,
    /// Append rows to this CSV file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Full-size iteration counts.
    #[arg(long)]
    paper_scale: bool,
    /// Particle counts 128..131072 for the 1d or 120d problem; replaces
    /// --particles and --dims.
    #[arg(long, value_name = "1d|120d", conflicts_with_all = ["particles", "dims"])]
    sweep: Option<Sweep>,
    /// Worker threads [default: available parallelism].
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    #[arg(long)]
    markdown: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pso-bench: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), BenchError> {
    let exec = match cli.threads {
        Some(n) => ThreadedExecutor::new(n)?,
        None => ThreadedExecutor::with_available_parallelism()?,
    };
    let mut engines = if cli.engines.is_empty() {
        EngineKind::ALL.to_vec()
    } else {
        cli.engines.clone()
    };
    engines.sort_by_key(|k| EngineKind::ALL.iter().position(|e| e == k));
    engines.dedup();

    let (dims, cells) = match cli.sweep {
        Some(sweep) => {
            let mut cells = sweep.cells(cli.paper_scale);
            if let Some(t) = cli.iters {
                cells.iter_mut().for_each(|c| c.1 = t);
            }
            (sweep.dims(), cells)
        }
        None => {
            let default = if cli.paper_scale {
                pso_bench::sweep::FULL_1D_ITERATIONS
            } else {
                pso_bench::sweep::DESK_ITERATIONS
            };
            let iters = cli.iters.unwrap_or(default);
            (cli.dims, cli.particles.iter().map(|&n| (n, iters)).collect())
        }
    };

    let mut records = Vec::new();
    for &(particles, iters) in &cells {
        for &engine in &engines {
            let config = BenchConfig {
                seeds: cli.seeds.clone(),
                repeat: cli.repeat,
                fitness: cli.fitness.clone(),
                group_size: cli.group_size,
                out: cli.out.clone(),
                ..BenchConfig::new(engine, particles, dims, iters)
            };
            for r in run_bench(&config, &exec)? {
                eprintln!(
                    "{:<10} {:>7} x {:>3}D x {:>6} it  seed {:<4} {:.4} s  best {}  trace {}",
                    r.engine.name(),
                    r.particles,
                    r.dims,
                    r.iters,
                    r.seed,
                    r.summary_seconds(),
                    r.final_gbest_fit,
                    r.trace_checksum
                );
                records.push(r);
            }
        }
    }

    if cli.markdown {
        if engines.iter().any(|k| k.is_parallel()) {
            println!("{}", emit_table(&records, TableFormat::Markdown)?);
        }
        print!("{}", emit_ranking(&records));
    } else if cli.out.is_none() {
        write_records(std::io::stdout().lock(), &records)?;
    }
    Ok(())
}
