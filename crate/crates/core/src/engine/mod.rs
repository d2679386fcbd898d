//! Engines and the shared iteration driver.
//!
//! Every engine runs the same synchronous iteration: lanes advance their
//! particles against the global best position as it stood at the start of the
//! iteration, and the iteration's best candidate is merged into the global best
//! before the next one starts. They differ only in how that merge is organized.

mod queue;
mod reduction;
mod serial;

pub use reduction::{tree_reduce_max, tree_reduce_max_unrolled, UNROLLED_SIZES};

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::error::PsoError;
use crate::fitness::FitnessFn;
use crate::params::PsoParams;
use crate::rng::RngKey;
use crate::runtime::{Executor, Scratchpad, SequentialExecutor};
use crate::swarm::{init_swarm, BestRecord, GlobalBest, SwarmState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineKind {
    Serial,
    Reduction,
    Unrolled,
    Queue,
    QueueLock,
}

impl EngineKind {
    pub const ALL: [EngineKind; 5] = [
        EngineKind::Serial,
        EngineKind::Reduction,
        EngineKind::Unrolled,
        EngineKind::Queue,
        EngineKind::QueueLock,
    ];

    /// Registry name.
    pub fn name(self) -> &'static str {
        match self {
            Self::Serial => "serial",
            Self::Reduction => "reduction",
            Self::Unrolled => "unrolled",
            Self::Queue => "queue",
            Self::QueueLock => "queue-lock",
        }
    }

    pub fn is_parallel(self) -> bool {
        self != Self::Serial
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownEngine;

impl fmt::Display for UnknownEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown engine, expected one of serial, reduction, unrolled, queue, queue-lock")
    }
}

impl core::error::Error for UnknownEngine {}

impl FromStr for EngineKind {
    type Err = UnknownEngine;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or(UnknownEngine)
    }
}

/// What an observer sees after each completed iteration.
#[derive(Debug)]
pub struct IterationReport<'a> {
    /// 1-based iteration number.
    pub iteration: u32,
    pub state: &'a SwarmState,
    pub best: &'a BestRecord,
    /// Entries appended to group queues this iteration (queue engines only).
    pub queued: Option<usize>,
}

/// Per-iteration callback.
pub trait Observer {
    fn observe(&mut self, report: &IterationReport<'_>);
}

impl<F: FnMut(&IterationReport<'_>)> Observer for F {
    fn observe(&mut self, report: &IterationReport<'_>) {
        self(report)
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub engine: EngineKind,
    pub best: BestRecord,
    /// Global best fitness after each iteration; `max_iter` entries.
    pub trace: Vec<f64>,
    /// Queue entries per iteration; empty for engines without queues.
    pub queued: Vec<usize>,
    pub state: SwarmState,
}

impl RunResult {
    pub fn trace_bits(&self) -> Vec<u64> {
        self.trace.iter().map(|f| f.to_bits()).collect()
    }
}

/// An initialized run that can be advanced one iteration at a time.
///
/// Construction performs initialization, so timing [`Run::step`] or
/// [`Run::finish`] measures only the iteration loop.
#[derive(Debug)]
pub struct Run<'f> {
    kind: EngineKind,
    params: PsoParams,
    fitness: &'f FitnessFn,
    key: RngKey,
    state: SwarmState,
    best: GlobalBest,
    iteration: u32,
    trace: Vec<f64>,
    queued: Vec<usize>,
    gbest_snapshot: Vec<f64>,
    buf: Vec<f64>,
    scratch: Option<Scratchpad>,
    appended: AtomicUsize,
}

impl<'f> Run<'f> {
    pub fn new(
        kind: EngineKind,
        params: &PsoParams,
        fitness: &'f FitnessFn,
        key: RngKey,
    ) -> Result<Self, PsoError> {
        let (state, best) = init_swarm(params, key, fitness)?;
        let scratch = kind
            .is_parallel()
            .then(|| Scratchpad::new(params.groups(), params.group_size()));
        Ok(Self {
            kind,
            params: params.clone(),
            fitness,
            key,
            state,
            best,
            iteration: 0,
            trace: Vec::with_capacity(params.iterations()),
            queued: Vec::new(),
            gbest_snapshot: vec![0.0; params.dims()],
            buf: vec![0.0; params.dims()],
            scratch,
            appended: AtomicUsize::new(0),
        })
    }

    pub fn kind(&self) -> EngineKind {
        self.kind
    }

    pub fn params(&self) -> &PsoParams {
        &self.params
    }

    /// Completed iterations.
    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn is_finished(&self) -> bool {
        self.iteration as usize >= self.params.iterations()
    }

    pub fn state(&self) -> &SwarmState {
        &self.state
    }

    pub fn best(&mut self) -> &BestRecord {
        self.best.record()
    }

    pub fn trace(&self) -> &[f64] {
        &self.trace
    }

    /// Advances one iteration.
    pub fn step<E: Executor>(&mut self, exec: &E) -> Result<IterationReport<'_>, PsoError> {
        let t = self.iteration + 1;
        self.best.copy_pos_into(&mut self.gbest_snapshot);
        let start_fit = self.best.fit();
        let ctx = crate::swarm::StepContext {
            params: &self.params,
            fitness: self.fitness,
            key: self.key,
            iteration: t,
            gbest_pos: &self.gbest_snapshot,
        };
        self.appended.store(0, Ordering::Relaxed);
        let queued = match (self.kind, self.scratch.as_ref()) {
            (EngineKind::Serial, _) => {
                serial::step(&ctx, &mut self.state, &mut self.best, &mut self.buf);
                None
            }
            (EngineKind::Reduction | EngineKind::Unrolled, Some(pad)) => {
                let unrolled = self.kind == EngineKind::Unrolled;
                reduction::step(exec, &ctx, &mut self.state, &self.best, pad, unrolled)?;
                None
            }
            (EngineKind::Queue, Some(pad)) => {
                queue::step(exec, &ctx, &mut self.state, &self.best, pad, start_fit, &self.appended)?;
                Some(self.appended.load(Ordering::Relaxed))
            }
            (EngineKind::QueueLock, Some(pad)) => {
                queue::step_locked(exec, &ctx, &mut self.state, &self.best, pad, start_fit, &self.appended)?;
                Some(self.appended.load(Ordering::Relaxed))
            }
            (_, None) => unreachable!("parallel engines always allocate scratch"),
        };
        self.iteration = t;
        self.trace.push(self.best.fit());
        if let Some(q) = queued {
            self.queued.push(q);
        }
        Ok(IterationReport {
            iteration: t,
            state: &self.state,
            best: self.best.record(),
            queued,
        })
    }

    /// Runs the remaining iterations.
    pub fn finish<E: Executor, O: Observer>(
        mut self,
        exec: &E,
        mut observer: O,
    ) -> Result<RunResult, PsoError> {
        while !self.is_finished() {
            let report = self.step(exec)?;
            observer.observe(&report);
        }
        Ok(RunResult {
            engine: self.kind,
            best: self.best.into_record(),
            trace: self.trace,
            queued: self.queued,
            state: self.state,
        })
    }
}

/// Initializes and runs `kind` to completion.
pub fn run_engine<E: Executor, O: Observer>(
    kind: EngineKind,
    params: &PsoParams,
    fitness: &FitnessFn,
    key: RngKey,
    exec: &E,
    observer: O,
) -> Result<RunResult, PsoError> {
    Run::new(kind, params, fitness, key)?.finish(exec, observer)
}

/// The serial reference engine.
pub fn run_serial<O: Observer>(
    params: &PsoParams,
    fitness: &FitnessFn,
    key: RngKey,
    observer: O,
) -> Result<RunResult, PsoError> {
    run_engine(EngineKind::Serial, params, fitness, key, &SequentialExecutor, observer)
}

/// Two-phase tree-reduction engine; `unrolled` selects the straight-line tree.
pub fn run_reduction<E: Executor, O: Observer>(
    params: &PsoParams,
    fitness: &FitnessFn,
    key: RngKey,
    unrolled: bool,
    exec: &E,
    observer: O,
) -> Result<RunResult, PsoError> {
    let kind = if unrolled {
        EngineKind::Unrolled
    } else {
        EngineKind::Reduction
    };
    run_engine(kind, params, fitness, key, exec, observer)
}

/// Two-phase queue engine.
pub fn run_queue<E: Executor, O: Observer>(
    params: &PsoParams,
    fitness: &FitnessFn,
    key: RngKey,
    exec: &E,
    observer: O,
) -> Result<RunResult, PsoError> {
    run_engine(EngineKind::Queue, params, fitness, key, exec, observer)
}

/// Fused queue engine with lock-guarded global best.
pub fn run_queue_lock<E: Executor, O: Observer>(
    params: &PsoParams,
    fitness: &FitnessFn,
    key: RngKey,
    exec: &E,
    observer: O,
) -> Result<RunResult, PsoError> {
    run_engine(EngineKind::QueueLock, params, fitness, key, exec, observer)
}
