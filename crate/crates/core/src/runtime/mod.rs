//! Worker-group execution model.
//!
//! Particles map one-to-one onto *lanes*; lanes are grouped into fixed-size
//! *groups* that share a [`GroupScratch`] and a barrier. A [`GroupKernel`] is
//! written as a sequence of phases, and the barrier sits between consecutive
//! phases: no lane of a group starts phase `k + 1` before every lane of that
//! group, active or not, has finished phase `k`. Returning from
//! [`Executor::run_groups`] is a full synchronization point across all groups.
//!
//! Executors may multiplex the lanes of a group onto fewer execution contexts
//! as long as those two guarantees hold.

mod barrier;
pub mod lock;
mod scratch;

pub use barrier::{BarrierPoisoned, GroupBarrier};
pub use lock::{LockWord, SpinGuard, SpinLock};
pub use scratch::{AtomicF64, GroupScratch, Scratchpad};

use crate::error::RunError;

/// Group decomposition of `particles` lanes into groups of `group_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupLayout {
    pub particles: usize,
    pub group_size: usize,
}

impl GroupLayout {
    pub fn new(particles: usize, group_size: usize) -> Self {
        assert!(group_size >= 1, "group_size must be at least 1");
        Self {
            particles,
            group_size,
        }
    }

    pub fn groups(&self) -> usize {
        self.particles.div_ceil(self.group_size)
    }

    /// Active lanes of `group`; only the last group can be ragged.
    pub fn active_lanes(&self, group: usize) -> usize {
        let start = group * self.group_size;
        self.particles.saturating_sub(start).min(self.group_size)
    }

    pub fn lane(&self, group: usize, lane: usize, relax: fn()) -> Lane {
        let global = group * self.group_size + lane;
        Lane {
            group,
            lane,
            global,
            active: global < self.particles,
            relax,
        }
    }
}

/// Identity of one worker.
#[derive(Debug, Clone, Copy)]
pub struct Lane {
    pub group: usize,
    /// Index within the group.
    pub lane: usize,
    /// `group * group_size + lane`; equals the particle index when active.
    pub global: usize,
    /// False for padding lanes past the last particle. Padding lanes still
    /// take part in every phase.
    pub active: bool,
    /// Back-off hook for spin loops, chosen by the executor.
    pub relax: fn(),
}

impl Lane {
    pub fn is_leader(&self) -> bool {
        self.lane == 0
    }
}

/// A per-lane procedure split into barrier-separated phases.
pub trait GroupKernel: Sync {
    /// Per-context workspace reused across the lanes a context executes.
    type Local: Send;

    fn phases(&self) -> usize;

    fn new_local(&self) -> Self::Local;

    fn run_lane(&self, phase: usize, lane: &Lane, local: &mut Self::Local);
}

/// Runs every lane of every group through all phases of a kernel.
pub trait Executor {
    fn run_groups<K: GroupKernel>(&self, layout: GroupLayout, kernel: &K) -> Result<(), RunError>;

    /// Number of execution contexts the executor spreads groups over.
    fn contexts(&self) -> usize {
        1
    }
}

/// Single-context executor: groups in order, lanes in order within each phase.
///
/// A panicking lane propagates the panic to the caller.
#[derive(Debug, Clone, Copy, Default)]
pub struct SequentialExecutor;

impl Executor for SequentialExecutor {
    fn run_groups<K: GroupKernel>(&self, layout: GroupLayout, kernel: &K) -> Result<(), RunError> {
        let mut local = kernel.new_local();
        for group in 0..layout.groups() {
            for phase in 0..kernel.phases() {
                for lane in 0..layout.group_size {
                    let lane = layout.lane(group, lane, core::hint::spin_loop);
                    kernel.run_lane(phase, &lane, &mut local);
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use core::sync::atomic::{AtomicUsize, Ordering};

    #[test]
    fn ragged_last_group() {
        let l = GroupLayout::new(5, 4);
        assert_eq!(l.groups(), 2);
        assert_eq!(l.active_lanes(0), 4);
        assert_eq!(l.active_lanes(1), 1);
        let lanes: Vec<bool> = (0..4).map(|k| l.lane(1, k, || {}).active).collect();
        assert_eq!(lanes, [true, false, false, false]);
        let l = GroupLayout::new(8, 8);
        assert_eq!((l.groups(), l.active_lanes(0)), (1, 8));
    }

    struct CountKernel {
        calls: AtomicUsize,
        active: AtomicUsize,
    }

    impl GroupKernel for CountKernel {
        type Local = ();
        fn phases(&self) -> usize {
            3
        }
        fn new_local(&self) {}
        fn run_lane(&self, _phase: usize, lane: &Lane, _: &mut ()) {
            self.calls.fetch_add(1, Ordering::Relaxed);
            if lane.active {
                self.active.fetch_add(1, Ordering::Relaxed);
            }
        }
    }

    #[test]
    fn sequential_runs_every_lane_every_phase() {
        let k = CountKernel {
            calls: AtomicUsize::new(0),
            active: AtomicUsize::new(0),
        };
        SequentialExecutor.run_groups(GroupLayout::new(5, 4), &k).unwrap();
        assert_eq!(k.calls.into_inner(), 2 * 4 * 3);
        assert_eq!(k.active.into_inner(), 5 * 3);
    }
}
