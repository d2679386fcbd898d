//! Queue engines.
//!
//! A lane whose new fitness beats the global best appends `(fit, particle)` to
//! its group queue through the atomic counter; after the group barrier the
//! leader scans the queue sequentially. Improvements are rare once the swarm
//! settles, so the leader usually scans nothing.
//!
//! The two-phase variant publishes group winners to the auxiliary arrays and
//! merges them in a second single-group phase. The fused variant lets each
//! leader merge its winner into the global best directly under the spin lock.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::error::RunError;
use crate::runtime::{Executor, GroupKernel, GroupLayout, Lane, Scratchpad};
use crate::swarm::{Candidate, GlobalBest, SharedSwarm, StepContext, SwarmState};

/// Leader-side handling of a group's queue once the barrier has passed.
#[derive(Clone, Copy)]
enum Publish<'a> {
    Aux,
    Locked(&'a GlobalBest),
}

struct GroupQueue<'a> {
    ctx: &'a StepContext<'a>,
    swarm: SharedSwarm<'a>,
    pad: &'a Scratchpad,
    /// Global best fitness at the start of the iteration.
    start_fit: f64,
    publish: Publish<'a>,
    appended: &'a AtomicUsize,
}

impl GroupQueue<'_> {
    #[inline(always)]
    fn admits(&self, fit: f64) -> bool {
        match self.publish {
            Publish::Aux => fit > self.start_fit,
            // The live value may already include other groups' winners from
            // this iteration. Equal fitness stays admissible so a lower
            // particle index can still win the tie under the lock.
            Publish::Locked(best) => fit > self.start_fit && fit >= best.fit(),
        }
    }
}

impl GroupKernel for GroupQueue<'_> {
    type Local = Vec<f64>;

    fn phases(&self) -> usize {
        2
    }

    fn new_local(&self) -> Vec<f64> {
        vec![0.0; self.ctx.params.dims()]
    }

    fn run_lane(&self, phase: usize, lane: &Lane, buf: &mut Vec<f64>) {
        let scratch = self.pad.group(lane.group);
        if phase == 0 {
            if lane.active {
                // SAFETY: lane `global` is the only lane touching its particle.
                let mut p = unsafe { self.swarm.particle(lane.global) };
                let fit = self.ctx.advance(&mut p, lane.global, buf);
                if self.admits(fit) {
                    scratch.atomic_append(fit, lane.global);
                }
            }
            return;
        }
        if !lane.is_leader() {
            return;
        }
        let num = scratch.len();
        self.appended.fetch_add(num, Ordering::Relaxed);
        let winner = scratch.scan(num);
        match self.publish {
            Publish::Aux => self.pad.write_aux(lane.group, winner),
            Publish::Locked(best) if num > 0 => {
                let iteration = self.ctx.iteration;
                let mut guard = best.lock(lane.relax);
                let rec = guard.record();
                let better = winner.fit > rec.fit
                    || (winner.fit == rec.fit
                        && rec.iteration == iteration
                        && winner.particle < rec.particle);
                if better {
                    guard.set(winner, iteration, |pos| {
                        // SAFETY: the winner belongs to this group, whose lanes
                        // have all passed the barrier.
                        unsafe { self.swarm.read_position(winner.particle, pos) }
                    });
                }
            }
            Publish::Locked(_) => {}
        }
        scratch.reset();
    }
}

/// Second phase of the two-phase variant: one group folds the auxiliary
/// arrays strided by lane, queues the improving folds, and the leader merges.
struct FinalQueue<'a> {
    swarm: SharedSwarm<'a>,
    pad: &'a Scratchpad,
    best: &'a GlobalBest,
    iteration: u32,
}

impl GroupKernel for FinalQueue<'_> {
    type Local = ();

    fn phases(&self) -> usize {
        2
    }

    fn new_local(&self) {}

    fn run_lane(&self, phase: usize, lane: &Lane, _: &mut ()) {
        let scratch = self.pad.group(0);
        if phase == 0 {
            let mut folded = Candidate::SENTINEL;
            let mut g = lane.lane;
            while g < self.pad.groups() {
                folded = folded.max(self.pad.read_aux(g));
                g += self.pad.group_size();
            }
            if folded.fit > self.best.fit() {
                scratch.atomic_append(folded.fit, folded.particle);
            }
            return;
        }
        if !lane.is_leader() {
            return;
        }
        let winner = scratch.scan(scratch.len());
        if winner.fit > self.best.fit() {
            let mut guard = self.best.lock(lane.relax);
            guard.set(winner, self.iteration, |pos| {
                // SAFETY: the first phase has completed.
                unsafe { self.swarm.read_position(winner.particle, pos) }
            });
        }
        scratch.reset();
    }
}

pub(super) fn step<E: Executor>(
    exec: &E,
    ctx: &StepContext<'_>,
    state: &mut SwarmState,
    best: &GlobalBest,
    pad: &Scratchpad,
    start_fit: f64,
    appended: &AtomicUsize,
) -> Result<(), RunError> {
    let params = ctx.params;
    let kernel = GroupQueue {
        ctx,
        swarm: SharedSwarm::new(state),
        pad,
        start_fit,
        publish: Publish::Aux,
        appended,
    };
    exec.run_groups(GroupLayout::new(params.particles(), params.group_size()), &kernel)?;
    let kernel = FinalQueue {
        swarm: kernel.swarm,
        pad,
        best,
        iteration: ctx.iteration,
    };
    let single = GroupLayout::new(params.group_size(), params.group_size());
    exec.run_groups(single, &kernel)
}

pub(super) fn step_locked<E: Executor>(
    exec: &E,
    ctx: &StepContext<'_>,
    state: &mut SwarmState,
    best: &GlobalBest,
    pad: &Scratchpad,
    start_fit: f64,
    appended: &AtomicUsize,
) -> Result<(), RunError> {
    let params = ctx.params;
    let kernel = GroupQueue {
        ctx,
        swarm: SharedSwarm::new(state),
        pad,
        start_fit,
        publish: Publish::Locked(best),
        appended,
    };
    exec.run_groups(GroupLayout::new(params.particles(), params.group_size()), &kernel)
}
