//! Particle swarm optimization engines built on a portable worker-group model.
//!
//! The crate is `no_std` (it needs `alloc`). It carries everything that is pure
//! computation: run parameters, the structure-of-arrays swarm state, a
//! counter-based random stream, the fitness registry, the worker-group contracts
//! (scratch queues, spin lock, barrier) and five engines:
//!
//! | name         | aggregation of the per-iteration best                          |
//! |--------------|----------------------------------------------------------------|
//! | `serial`     | online comparison, one particle after another                  |
//! | `reduction`  | per-group tree max-reduction, then a second single-group phase |
//! | `unrolled`   | as `reduction`, with the tree rounds laid out straight-line    |
//! | `queue`      | conditional atomic append to a group queue, leader scan, two phases |
//! | `queue-lock` | as `queue`, leaders publish directly under a global spin lock  |
//!
//! All engines consume the same random draws and produce bitwise-identical
//! best-fitness traces for the same parameters and key. Execution of worker
//! groups is abstracted behind [`runtime::Executor`]; this crate ships a
//! single-context [`runtime::SequentialExecutor`], and multithreaded executors
//! live in companion crates.
//!
//! The library maximizes. Minimization problems are supplied negated, see
//! [`FitnessFn::minimize`].
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod engine;
mod error;
pub mod fitness;
mod params;
pub mod rng;
pub mod runtime;
pub mod swarm;

pub use engine::{run_engine, EngineKind, IterationReport, Observer, Run, RunResult};
pub use error::{ConfigError, DomainError, PsoError, RunError};
pub use fitness::FitnessFn;
pub use params::{PsoParams, PsoParamsBuilder, DEFAULT_GROUP_SIZE};
pub use rng::{RngDraw, RngKey, Slot};
pub use swarm::{BestRecord, GlobalBest, SwarmState};
