//! Multithreaded [`Executor`] over a rayon pool.
//!
//! By default each execution context takes whole groups and runs their lanes
//! in lane order, phase by phase. [`LaneMode::PerThread`] instead gives every
//! lane its own OS thread and separates phases with a [`GroupBarrier`]; it is
//! meant for small layouts and barrier tests.

use std::any::Any;
use std::cell::Cell;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::thread;

use pso_core::runtime::{Executor, GroupBarrier, GroupKernel, GroupLayout};
use pso_core::RunError;
use rand::rngs::SmallRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LaneMode {
    #[default]
    Multiplexed,
    PerThread,
}

/// Scheduling noise for stress tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Perturbation {
    pub seed: u64,
    /// Up to this many `yield_now` calls before each phase of each group.
    pub max_yields: u32,
    /// Run the lanes of a multiplexed group in a random order every phase.
    pub shuffle_lanes: bool,
}

#[derive(Debug)]
pub struct ThreadedExecutor {
    pool: rayon::ThreadPool,
    contexts: usize,
    mode: LaneMode,
    perturbation: Option<Perturbation>,
    epoch: AtomicU64,
}

impl ThreadedExecutor {
    pub fn new(contexts: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let contexts = contexts.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(contexts)
            .thread_name(|i| format!("pso-worker-{i}"))
            .build()?;
        Ok(Self {
            pool,
            contexts,
            mode: LaneMode::Multiplexed,
            perturbation: None,
            epoch: AtomicU64::new(0),
        })
    }

    /// One context per available hardware thread.
    pub fn with_available_parallelism() -> Result<Self, rayon::ThreadPoolBuildError> {
        Self::new(available_contexts())
    }

    pub fn lane_mode(mut self, mode: LaneMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn perturbed(mut self, perturbation: Perturbation) -> Self {
        self.perturbation = Some(perturbation);
        self
    }

    fn run_multiplexed<K: GroupKernel>(&self, layout: GroupLayout, kernel: &K) -> Result<(), RunError> {
        let failure = Mutex::new(None);
        let abort = AtomicBool::new(false);
        let epoch = self.epoch.fetch_add(1, Ordering::Relaxed);
        let perturbation = self.perturbation;
        let group_size = layout.group_size;
        self.pool.install(|| {
            (0..layout.groups()).into_par_iter().for_each_init(
                || (kernel.new_local(), (0..group_size).collect::<Vec<_>>()),
                |(local, order), group| {
                    if abort.load(Ordering::Relaxed) {
                        return;
                    }
                    let at = Cell::new((0, 0));
                    let result = catch_unwind(AssertUnwindSafe(|| {
                        let mut rng = perturbation.map(|p| {
                            SmallRng::seed_from_u64(p.seed ^ epoch.rotate_left(32) ^ group as u64)
                        });
                        for phase in 0..kernel.phases() {
                            if let (Some(p), Some(rng)) = (perturbation, rng.as_mut()) {
                                for _ in 0..rng.random_range(0..=p.max_yields) {
                                    thread::yield_now();
                                }
                                if p.shuffle_lanes {
                                    order.shuffle(rng);
                                }
                            }
                            for &lane in order.iter() {
                                at.set((phase, lane));
                                let lane = layout.lane(group, lane, thread::yield_now);
                                kernel.run_lane(phase, &lane, local);
                            }
                        }
                    }));
                    if let Err(payload) = result {
                        abort.store(true, Ordering::Relaxed);
                        let (phase, lane) = at.get();
                        record(&failure, group, lane, phase, payload);
                    }
                },
            )
        });
        failure.into_inner().unwrap().map_or(Ok(()), Err)
    }

    fn run_per_thread<K: GroupKernel>(&self, layout: GroupLayout, kernel: &K) -> Result<(), RunError> {
        let failure = Mutex::new(None);
        let barriers: Vec<GroupBarrier> = (0..layout.groups())
            .map(|_| GroupBarrier::new(layout.group_size))
            .collect();
        thread::scope(|s| {
            for (group, barrier) in barriers.iter().enumerate() {
                for lane in 0..layout.group_size {
                    let failure = &failure;
                    s.spawn(move || {
                        let mut local = kernel.new_local();
                        let mut sense = false;
                        let lane_id = layout.lane(group, lane, thread::yield_now);
                        for phase in 0..kernel.phases() {
                            if phase > 0 && barrier.wait(&mut sense, thread::yield_now).is_err() {
                                return;
                            }
                            let r = catch_unwind(AssertUnwindSafe(|| {
                                kernel.run_lane(phase, &lane_id, &mut local)
                            }));
                            if let Err(payload) = r {
                                barrier.poison();
                                record(failure, group, lane, phase, payload);
                                return;
                            }
                        }
                    });
                }
            }
        });
        failure.into_inner().unwrap().map_or(Ok(()), Err)
    }
}

impl Executor for ThreadedExecutor {
    fn run_groups<K: GroupKernel>(&self, layout: GroupLayout, kernel: &K) -> Result<(), RunError> {
        match self.mode {
            LaneMode::Multiplexed => self.run_multiplexed(layout, kernel),
            LaneMode::PerThread => self.run_per_thread(layout, kernel),
        }
    }

    fn contexts(&self) -> usize {
        self.contexts
    }
}

pub fn available_contexts() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

fn record(
    slot: &Mutex<Option<RunError>>,
    group: usize,
    lane: usize,
    phase: usize,
    payload: Box<dyn Any + Send>,
) {
    let message = payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "non-string panic payload".into());
    let mut slot = slot.lock().unwrap_or_else(|e| e.into_inner());
    slot.get_or_insert(RunError::LanePanicked {
        group,
        lane,
        phase,
        message,
    });
}
