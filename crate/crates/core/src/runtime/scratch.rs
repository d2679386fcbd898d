use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use crate::swarm::Candidate;

/// An `f64` stored as its bit pattern.
#[derive(Debug, Default)]
pub struct AtomicF64(AtomicU64);

impl AtomicF64 {
    pub fn new(v: f64) -> Self {
        Self(AtomicU64::new(v.to_bits()))
    }

    #[inline(always)]
    pub fn load(&self, order: Ordering) -> f64 {
        f64::from_bits(self.0.load(order))
    }

    #[inline(always)]
    pub fn store(&self, v: f64, order: Ordering) {
        self.0.store(v.to_bits(), order)
    }
}

/// Group-local storage for every group of a run, plus the cross-group
/// auxiliary arrays.
///
/// Each group owns `slots` entries of `(fit, particle)` used either as the
/// append queue or as the reduction tree, and one append counter. `slots` is
/// the group size rounded up to a power of two. Queue slots hold particle
/// indices; positions are gathered after a winner is chosen.
#[derive(Debug)]
pub struct Scratchpad {
    group_size: usize,
    slots: usize,
    fit: Vec<AtomicF64>,
    particle: Vec<AtomicUsize>,
    num: Vec<AtomicUsize>,
    aux_fit: Vec<AtomicF64>,
    aux_particle: Vec<AtomicUsize>,
}

impl Scratchpad {
    pub fn new(groups: usize, group_size: usize) -> Self {
        let slots = group_size.next_power_of_two();
        let len = groups * slots;
        Self {
            group_size,
            slots,
            fit: (0..len).map(|_| AtomicF64::new(f64::NEG_INFINITY)).collect(),
            particle: (0..len).map(|_| AtomicUsize::new(usize::MAX)).collect(),
            num: (0..groups).map(|_| AtomicUsize::new(0)).collect(),
            aux_fit: (0..groups).map(|_| AtomicF64::new(f64::NEG_INFINITY)).collect(),
            aux_particle: (0..groups).map(|_| AtomicUsize::new(usize::MAX)).collect(),
        }
    }

    pub fn groups(&self) -> usize {
        self.num.len()
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    /// Slots per group, the group size rounded up to a power of two.
    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn group(&self, group: usize) -> GroupScratch<'_> {
        let range = group * self.slots..(group + 1) * self.slots;
        GroupScratch {
            capacity: self.group_size,
            fit: &self.fit[range.clone()],
            particle: &self.particle[range],
            num: &self.num[group],
        }
    }

    pub fn write_aux(&self, group: usize, c: Candidate) {
        self.aux_fit[group].store(c.fit, Ordering::Relaxed);
        self.aux_particle[group].store(c.particle, Ordering::Relaxed);
    }

    pub fn read_aux(&self, group: usize) -> Candidate {
        Candidate {
            fit: self.aux_fit[group].load(Ordering::Relaxed),
            particle: self.aux_particle[group].load(Ordering::Relaxed),
        }
    }
}

/// One group's view of the [`Scratchpad`].
#[derive(Debug, Clone, Copy)]
pub struct GroupScratch<'a> {
    capacity: usize,
    fit: &'a [AtomicF64],
    particle: &'a [AtomicUsize],
    num: &'a AtomicUsize,
}

impl GroupScratch<'_> {
    /// Reserves the next queue slot with a fetch-add on the counter and stores
    /// the entry there. Slots handed out form the prefix `0..num`.
    ///
    /// # Panics
    ///
    /// Panics if more than `group_size` entries are appended before a reset.
    #[inline]
    pub fn atomic_append(&self, fit: f64, particle: usize) -> usize {
        let slot = self.num.fetch_add(1, Ordering::SeqCst);
        assert!(slot < self.capacity, "group queue overflow at slot {slot}");
        self.fit[slot].store(fit, Ordering::Relaxed);
        self.particle[slot].store(particle, Ordering::Relaxed);
        slot
    }

    /// Entries appended since the last reset.
    pub fn len(&self) -> usize {
        self.num.load(Ordering::SeqCst)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn reset(&self) {
        self.num.store(0, Ordering::SeqCst);
    }

    /// Best entry among the first `len` queue slots, scanned in slot order.
    pub fn scan(&self, len: usize) -> Candidate {
        (0..len).fold(Candidate::SENTINEL, |best, j| best.max(self.get(j)))
    }

    #[inline(always)]
    pub fn get(&self, slot: usize) -> Candidate {
        Candidate {
            fit: self.fit[slot].load(Ordering::Relaxed),
            particle: self.particle[slot].load(Ordering::Relaxed),
        }
    }

    #[inline(always)]
    pub fn set(&self, slot: usize, c: Candidate) {
        self.fit[slot].store(c.fit, Ordering::Relaxed);
        self.particle[slot].store(c.particle, Ordering::Relaxed);
    }

    /// Number of slots (power of two, at least the group size).
    pub fn slots(&self) -> usize {
        self.fit.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_append_gets_slot_zero() {
        let pad = Scratchpad::new(1, 4);
        let g = pad.group(0);
        assert_eq!(g.atomic_append(2.5, 9), 0);
        assert_eq!(g.len(), 1);
        assert_eq!(g.get(0), Candidate { fit: 2.5, particle: 9 });
    }

    #[test]
    fn empty_queue_scans_to_sentinel() {
        let pad = Scratchpad::new(2, 4);
        assert!(pad.group(1).is_empty());
        assert!(pad.group(1).scan(0).is_sentinel());
        assert!(pad.read_aux(1).is_sentinel());
    }

    #[test]
    fn scan_breaks_ties_by_particle() {
        let pad = Scratchpad::new(1, 8);
        let g = pad.group(0);
        g.atomic_append(1.0, 5);
        g.atomic_append(3.0, 6);
        g.atomic_append(3.0, 2);
        g.atomic_append(0.5, 1);
        assert_eq!(g.scan(g.len()), Candidate { fit: 3.0, particle: 2 });
        g.reset();
        assert_eq!(g.len(), 0);
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_is_a_programming_error() {
        let pad = Scratchpad::new(1, 2);
        let g = pad.group(0);
        for i in 0..3 {
            g.atomic_append(0.0, i);
        }
    }

    #[test]
    fn slots_round_up_to_power_of_two() {
        let pad = Scratchpad::new(3, 33);
        assert_eq!(pad.slots(), 64);
        assert_eq!(pad.group(2).slots(), 64);
    }
}
