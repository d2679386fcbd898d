//! Concurrency self-checks shared by the test suites. Each returns the number
//! of violations it observed.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Barrier;
use std::thread;

use pso_core::runtime::{
    Executor, GroupBarrier, GroupKernel, GroupLayout, Lane, Scratchpad, SequentialExecutor, SpinLock,
};
use pso_core::{run_engine, EngineKind, FitnessFn, IterationReport, PsoError, PsoParams, RngKey};

use crate::executor::{LaneMode, Perturbation, ThreadedExecutor};

/// Group sizes cycled through by [`append_uniqueness`].
pub const APPEND_GROUP_SIZES: [usize; 10] = [1, 2, 7, 32, 33, 64, 100, 128, 255, 256];

/// `workers` threads append to one group queue concurrently, filling it
/// exactly, for `trials` rounds. A violation is a duplicated or out-of-range
/// slot, a wrong final count, or an entry not found where its append put it.
pub fn append_uniqueness(trials: usize, workers: usize) -> usize {
    let workers = workers.max(1);
    let max = *APPEND_GROUP_SIZES.iter().max().unwrap();
    let pads: Vec<Scratchpad> = APPEND_GROUP_SIZES.iter().map(|&g| Scratchpad::new(1, g)).collect();
    let claimed: Vec<AtomicUsize> = (0..max).map(|_| AtomicUsize::new(usize::MAX)).collect();
    let start = Barrier::new(workers + 1);
    let done = Barrier::new(workers + 1);
    let mut violations = 0;
    thread::scope(|s| {
        for w in 0..workers {
            let (pads, claimed, start, done) = (&pads, &claimed, &start, &done);
            s.spawn(move || {
                for t in 0..trials {
                    start.wait();
                    let pad = &pads[t % pads.len()];
                    let queue = pad.group(0);
                    let mut entry = w;
                    while entry < pad.group_size() {
                        let slot = queue.atomic_append(entry as f64, entry);
                        claimed[entry].store(slot, Ordering::Relaxed);
                        entry += workers;
                        if entry % 16 == 0 {
                            thread::yield_now();
                        }
                    }
                    done.wait();
                }
            });
        }
        for t in 0..trials {
            let pad = &pads[t % pads.len()];
            let size = pad.group_size();
            start.wait();
            done.wait();
            let queue = pad.group(0);
            if queue.len() != size {
                violations += 1;
            }
            let mut seen = vec![false; size];
            for (entry, c) in claimed[..size].iter().enumerate() {
                let slot = c.swap(usize::MAX, Ordering::Relaxed);
                if slot >= size || std::mem::replace(&mut seen[slot], true) {
                    violations += 1;
                    continue;
                }
                let stored = queue.get(slot);
                if stored.particle != entry || stored.fit != entry as f64 {
                    violations += 1;
                }
            }
            queue.reset();
        }
    });
    violations
}

/// Result of [`lock_counter`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LockCounter {
    pub count: u64,
    pub expected: u64,
    /// Times a worker entered the critical section while another was inside.
    pub overlaps: usize,
    /// Lock word after all workers finished.
    pub final_word: u32,
}

/// `workers` threads each perform `increments` non-atomic read-yield-write
/// increments under a [`SpinLock`].
pub fn lock_counter(workers: usize, increments: u64) -> LockCounter {
    let lock = SpinLock::new(0u64);
    let inside = AtomicUsize::new(0);
    let overlaps = AtomicUsize::new(0);
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| {
                for i in 0..increments {
                    let mut guard = lock.lock(thread::yield_now);
                    if inside.fetch_add(1, Ordering::SeqCst) != 0 {
                        overlaps.fetch_add(1, Ordering::Relaxed);
                    }
                    let v = *guard;
                    if i % 97 == 0 {
                        thread::yield_now();
                    }
                    *guard = v + 1;
                    inside.fetch_sub(1, Ordering::SeqCst);
                }
            });
        }
    });
    let final_word = lock.word().value();
    LockCounter {
        count: lock.into_inner(),
        expected: workers as u64 * increments,
        overlaps: overlaps.into_inner(),
        final_word,
    }
}

/// Alternating write and verify phases: in round `r` each lane stores `r` in
/// its cell, and after the barrier every lane checks all cells of its group.
struct Litmus {
    rounds: usize,
    cells: Vec<AtomicU64>,
    violations: AtomicUsize,
    group_size: usize,
}

impl GroupKernel for Litmus {
    type Local = ();

    fn phases(&self) -> usize {
        2 * self.rounds
    }

    fn new_local(&self) {}

    fn run_lane(&self, phase: usize, lane: &Lane, _: &mut ()) {
        let round = (phase / 2 + 1) as u64;
        if phase % 2 == 0 {
            self.cells[lane.global].store(round, Ordering::Relaxed);
            return;
        }
        let base = lane.group * self.group_size;
        let stale = self.cells[base..base + self.group_size]
            .iter()
            .filter(|c| c.load(Ordering::Relaxed) != round)
            .count();
        if stale > 0 {
            self.violations.fetch_add(stale, Ordering::Relaxed);
        }
    }
}

/// Runs [`Litmus`] with one thread per lane; returns (violations, rounds checked).
pub fn barrier_litmus(groups: usize, group_size: usize, rounds: usize) -> Result<(usize, usize), PsoError> {
    let exec = ThreadedExecutor::new(1)
        .expect("thread pool")
        .lane_mode(LaneMode::PerThread);
    let kernel = Litmus {
        rounds,
        cells: (0..groups * group_size).map(|_| AtomicU64::new(0)).collect(),
        violations: AtomicUsize::new(0),
        group_size,
    };
    exec.run_groups(GroupLayout::new(groups * group_size, group_size), &kernel)?;
    Ok((kernel.violations.into_inner(), rounds * groups * group_size))
}

/// A [`GroupBarrier`] must not let any thread through before all have arrived.
/// Returns the number of early exits seen over `rounds` rounds.
pub fn raw_barrier(threads: usize, rounds: usize) -> usize {
    let barrier = GroupBarrier::new(threads);
    let arrived = AtomicUsize::new(0);
    let early = AtomicUsize::new(0);
    thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| {
                let mut sense = false;
                for r in 0..rounds {
                    arrived.fetch_add(1, Ordering::SeqCst);
                    barrier.wait(&mut sense, thread::yield_now).unwrap();
                    if arrived.load(Ordering::SeqCst) < (r + 1) * threads {
                        early.fetch_add(1, Ordering::Relaxed);
                    }
                }
            });
        }
    });
    early.into_inner()
}

/// Runs queue-lock `runs` times under different scheduling perturbations and
/// counts the runs whose trace differs from the sequential reference.
pub fn perturbed_queue_lock(
    params: &PsoParams,
    fitness: &FitnessFn,
    key: RngKey,
    runs: usize,
    contexts: usize,
) -> Result<usize, PsoError> {
    let quiet = |_: &IterationReport<'_>| {};
    let reference = run_engine(EngineKind::Serial, params, fitness, key, &SequentialExecutor, quiet)?.trace_bits();
    let mut mismatches = 0;
    for r in 0..runs {
        let exec = ThreadedExecutor::new(contexts).expect("thread pool").perturbed(Perturbation {
            seed: 0x5eed_0000 + r as u64,
            max_yields: (r % 4) as u32,
            shuffle_lanes: true,
        });
        let result = run_engine(EngineKind::QueueLock, params, fitness, key, &exec, quiet)?;
        if result.trace_bits() != reference {
            mismatches += 1;
        }
    }
    Ok(mismatches)
}
