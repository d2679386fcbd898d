use core::fmt;
use core::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

/// Sense-reversing spin barrier for the lanes of one group.
///
/// Every write a lane makes before [`GroupBarrier::wait`] is visible to every
/// lane of the group after it returns.
#[derive(Debug)]
pub struct GroupBarrier {
    size: usize,
    count: AtomicUsize,
    sense: AtomicBool,
    poisoned: AtomicBool,
}

/// Returned by [`GroupBarrier::wait`] once another lane has poisoned the barrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BarrierPoisoned;

impl fmt::Display for BarrierPoisoned {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("group barrier poisoned")
    }
}

impl GroupBarrier {
    pub fn new(size: usize) -> Self {
        assert!(size >= 1);
        Self {
            size,
            count: AtomicUsize::new(0),
            sense: AtomicBool::new(false),
            poisoned: AtomicBool::new(false),
        }
    }

    /// Blocks until all `size` lanes arrive. `local_sense` is per-lane state,
    /// initially `false`.
    pub fn wait(&self, local_sense: &mut bool, relax: fn()) -> Result<(), BarrierPoisoned> {
        *local_sense = !*local_sense;
        if self.count.fetch_add(1, Ordering::AcqRel) + 1 == self.size {
            self.count.store(0, Ordering::Relaxed);
            self.sense.store(*local_sense, Ordering::Release);
        } else {
            while self.sense.load(Ordering::Acquire) != *local_sense {
                if self.poisoned.load(Ordering::Relaxed) {
                    return Err(BarrierPoisoned);
                }
                relax();
            }
        }
        if self.poisoned.load(Ordering::Relaxed) {
            Err(BarrierPoisoned)
        } else {
            Ok(())
        }
    }

    /// Releases every waiter with an error; used when a lane fails.
    pub fn poison(&self) {
        self.poisoned.store(true, Ordering::Relaxed);
    }

    pub fn is_poisoned(&self) -> bool {
        self.poisoned.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lane_barrier_never_blocks() {
        let b = GroupBarrier::new(1);
        let mut s = false;
        for _ in 0..10 {
            b.wait(&mut s, || {}).unwrap();
        }
    }

    #[test]
    fn poisoned_barrier_reports() {
        let b = GroupBarrier::new(1);
        b.poison();
        assert_eq!(b.wait(&mut false, || {}), Err(BarrierPoisoned));
    }
}
