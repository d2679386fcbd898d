//! Two-phase engine with intra-group tree max-reduction.
//!
//! Phase 1 runs one lane per particle, then reduces the group's candidates with
//! `log2(slots)` barrier-separated rounds of halving strides and publishes the
//! group winner to the auxiliary arrays. Phase 2 runs a single group that
//! reduces the auxiliary arrays the same way and updates the global best.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::RunError;
use crate::runtime::{Executor, GroupKernel, GroupLayout, GroupScratch, Lane, Scratchpad};
use crate::swarm::{Candidate, GlobalBest, SharedSwarm, StepContext, SwarmState};

/// Group sizes (after rounding to a power of two) with a straight-line tree.
pub const UNROLLED_SIZES: [usize; 4] = [32, 64, 128, 256];

/// Tree max over `values`, padded with sentinels to a power of two.
/// Larger fitness wins; ties go to the lower particle index.
pub fn tree_reduce_max(values: &[Candidate]) -> Candidate {
    let mut buf = padded(values);
    let mut stride = buf.len() / 2;
    while stride > 0 {
        for l in 0..stride {
            buf[l] = buf[l].max(buf[l + stride]);
        }
        stride /= 2;
    }
    buf[0]
}

/// Same result as [`tree_reduce_max`]; for padded lengths in
/// [`UNROLLED_SIZES`] the stride loop is replaced by a fixed sequence of rounds.
pub fn tree_reduce_max_unrolled(values: &[Candidate]) -> Candidate {
    let mut buf = padded(values);
    macro_rules! round {
        ($($stride:literal)+) => {{
            $(
                for l in 0..$stride {
                    buf[l] = buf[l].max(buf[l + $stride]);
                }
            )+
        }};
    }
    match buf.len() {
        256 => round!(128 64 32 16 8 4 2 1),
        128 => round!(64 32 16 8 4 2 1),
        64 => round!(32 16 8 4 2 1),
        32 => round!(16 8 4 2 1),
        _ => return tree_reduce_max(values),
    }
    buf[0]
}

fn padded(values: &[Candidate]) -> Vec<Candidate> {
    let len = values.len().max(1).next_power_of_two();
    let mut buf = vec![Candidate::SENTINEL; len];
    buf[..values.len()].copy_from_slice(values);
    buf
}

const STRIDES_256: [usize; 8] = [128, 64, 32, 16, 8, 4, 2, 1];
const STRIDES_128: [usize; 7] = [64, 32, 16, 8, 4, 2, 1];
const STRIDES_64: [usize; 6] = [32, 16, 8, 4, 2, 1];
const STRIDES_32: [usize; 5] = [16, 8, 4, 2, 1];

/// Stride schedule of the tree over `slots` entries.
#[derive(Clone, Copy)]
enum Tree {
    Looped { slots: usize },
    Unrolled(&'static [usize]),
}

impl Tree {
    fn new(slots: usize, unrolled: bool) -> Self {
        if !unrolled {
            return Self::Looped { slots };
        }
        match slots {
            256 => Self::Unrolled(&STRIDES_256),
            128 => Self::Unrolled(&STRIDES_128),
            64 => Self::Unrolled(&STRIDES_64),
            32 => Self::Unrolled(&STRIDES_32),
            _ => Self::Looped { slots },
        }
    }

    fn rounds(self) -> usize {
        match self {
            Self::Looped { slots } => slots.trailing_zeros() as usize,
            Self::Unrolled(s) => s.len(),
        }
    }

    /// Stride of 1-based `round`.
    #[inline(always)]
    fn stride(self, round: usize) -> usize {
        match self {
            Self::Looped { slots } => slots >> round,
            Self::Unrolled(s) => s[round - 1],
        }
    }

    #[inline(always)]
    fn combine(self, scratch: &GroupScratch<'_>, round: usize, lane: usize) {
        let stride = self.stride(round);
        if lane < stride {
            let merged = scratch.get(lane).max(scratch.get(lane + stride));
            scratch.set(lane, merged);
        }
    }
}

/// Seeds the tree: lane `l` writes slot `l` and, when it exists, padding slot
/// `l + group_size`.
#[inline(always)]
fn seed(scratch: &GroupScratch<'_>, lane: usize, group_size: usize, value: Candidate) {
    scratch.set(lane, value);
    let pad = lane + group_size;
    if pad < scratch.slots() {
        scratch.set(pad, Candidate::SENTINEL);
    }
}

struct GroupReduce<'a> {
    ctx: &'a StepContext<'a>,
    swarm: SharedSwarm<'a>,
    pad: &'a Scratchpad,
    tree: Tree,
}

impl GroupKernel for GroupReduce<'_> {
    type Local = Vec<f64>;

    fn phases(&self) -> usize {
        self.tree.rounds() + 2
    }

    fn new_local(&self) -> Vec<f64> {
        vec![0.0; self.ctx.params.dims()]
    }

    fn run_lane(&self, phase: usize, lane: &Lane, buf: &mut Vec<f64>) {
        let scratch = self.pad.group(lane.group);
        let last = self.tree.rounds() + 1;
        match phase {
            0 => {
                let value = if lane.active {
                    // SAFETY: lane `global` is the only lane touching its particle.
                    let mut p = unsafe { self.swarm.particle(lane.global) };
                    let fit = self.ctx.advance(&mut p, lane.global, buf);
                    Candidate {
                        fit,
                        particle: lane.global,
                    }
                } else {
                    Candidate::SENTINEL
                };
                seed(&scratch, lane.lane, self.pad.group_size(), value);
            }
            p if p == last => {
                if lane.is_leader() {
                    self.pad.write_aux(lane.group, scratch.get(0));
                }
            }
            round => self.tree.combine(&scratch, round, lane.lane),
        }
    }
}

struct FinalReduce<'a> {
    swarm: SharedSwarm<'a>,
    pad: &'a Scratchpad,
    best: &'a GlobalBest,
    tree: Tree,
    iteration: u32,
}

impl GroupKernel for FinalReduce<'_> {
    type Local = ();

    fn phases(&self) -> usize {
        self.tree.rounds() + 2
    }

    fn new_local(&self) {}

    fn run_lane(&self, phase: usize, lane: &Lane, _: &mut ()) {
        let scratch = self.pad.group(0);
        let group_size = self.pad.group_size();
        let last = self.tree.rounds() + 1;
        match phase {
            0 => {
                let mut folded = Candidate::SENTINEL;
                let mut g = lane.lane;
                while g < self.pad.groups() {
                    folded = folded.max(self.pad.read_aux(g));
                    g += group_size;
                }
                seed(&scratch, lane.lane, group_size, folded);
            }
            p if p == last => {
                if lane.is_leader() {
                    let winner = scratch.get(0);
                    if winner.fit > self.best.fit() {
                        let mut guard = self.best.lock(lane.relax);
                        guard.set(winner, self.iteration, |pos| {
                            // SAFETY: phase 1 has completed; nothing writes positions now.
                            unsafe { self.swarm.read_position(winner.particle, pos) }
                        });
                    }
                }
            }
            round => self.tree.combine(&scratch, round, lane.lane),
        }
    }
}

pub(super) fn step<E: Executor>(
    exec: &E,
    ctx: &StepContext<'_>,
    state: &mut SwarmState,
    best: &GlobalBest,
    pad: &Scratchpad,
    unrolled: bool,
) -> Result<(), RunError> {
    let params = ctx.params;
    let tree = Tree::new(pad.slots(), unrolled);
    let kernel = GroupReduce {
        ctx,
        swarm: SharedSwarm::new(state),
        pad,
        tree,
    };
    exec.run_groups(GroupLayout::new(params.particles(), params.group_size()), &kernel)?;
    let kernel = FinalReduce {
        swarm: kernel.swarm,
        pad,
        best,
        tree,
        iteration: ctx.iteration,
    };
    let single = GroupLayout::new(params.group_size(), params.group_size());
    exec.run_groups(single, &kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(fit: f64, particle: usize) -> Candidate {
        Candidate { fit, particle }
    }

    #[test]
    fn single_value() {
        assert_eq!(tree_reduce_max(&[c(2.0, 0)]), c(2.0, 0));
        assert_eq!(tree_reduce_max_unrolled(&[c(2.0, 0)]), c(2.0, 0));
    }

    #[test]
    fn small_example() {
        let v: Vec<Candidate> = [3.0, 1.0, 4.0, 1.0, 5.0]
            .iter()
            .enumerate()
            .map(|(i, &f)| c(f, i))
            .collect();
        assert_eq!(tree_reduce_max(&v), c(5.0, 4));
    }

    #[test]
    fn ties_pick_lowest_index() {
        let v: Vec<Candidate> = (0..100).rev().map(|i| c(7.0, i)).collect();
        assert_eq!(tree_reduce_max(&v), c(7.0, 0));
        assert_eq!(tree_reduce_max_unrolled(&v), c(7.0, 0));
    }

    #[test]
    fn stride_schedules_agree() {
        for slots in [1, 2, 4, 8, 16, 32, 64, 128, 256, 512] {
            let looped = Tree::new(slots, false);
            let unrolled = Tree::new(slots, true);
            assert_eq!(looped.rounds(), unrolled.rounds());
            for r in 1..=looped.rounds() {
                assert_eq!(looped.stride(r), unrolled.stride(r));
            }
        }
    }
}
