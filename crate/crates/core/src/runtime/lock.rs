use core::cell::UnsafeCell;
use core::fmt;
use core::ops::{Deref, DerefMut};
use core::sync::atomic::{fence, AtomicU32, Ordering};

const FREE: u32 = 0;
const HELD: u32 = 1;

/// A global lock word, `0` free and `1` held.
///
/// Acquisition spins on a compare-and-swap from 0 to 1. Release issues a full
/// fence and then an exchange back to 0, so every write made while holding the
/// lock is visible to the next holder.
#[derive(Debug, Default)]
pub struct LockWord(AtomicU32);

impl LockWord {
    pub const fn new() -> Self {
        Self(AtomicU32::new(FREE))
    }

    /// Spins until the word flips from 0 to 1, calling `relax` between attempts.
    pub fn acquire(&self, relax: fn()) {
        while self
            .0
            .compare_exchange_weak(FREE, HELD, Ordering::Acquire, Ordering::Relaxed)
            .is_err()
        {
            while self.0.load(Ordering::Relaxed) != FREE {
                relax();
            }
        }
    }

    pub fn try_acquire(&self) -> bool {
        self.0
            .compare_exchange(FREE, HELD, Ordering::Acquire, Ordering::Relaxed)
            .is_ok()
    }

    /// Releases a held word.
    ///
    /// # Panics
    ///
    /// Releasing a word that is not held is a programming error and panics.
    pub fn release(&self) {
        fence(Ordering::SeqCst);
        let prev = self.0.swap(FREE, Ordering::Release);
        assert_eq!(prev, HELD, "lock released without being held");
    }

    pub fn is_held(&self) -> bool {
        self.0.load(Ordering::Acquire) == HELD
    }

    /// Current raw value.
    pub fn value(&self) -> u32 {
        self.0.load(Ordering::Acquire)
    }
}

/// Data guarded by a [`LockWord`].
pub struct SpinLock<T> {
    word: LockWord,
    data: UnsafeCell<T>,
}

// SAFETY: access to `data` is serialized by `word`.
unsafe impl<T: Send> Sync for SpinLock<T> {}
unsafe impl<T: Send> Send for SpinLock<T> {}

impl<T> SpinLock<T> {
    pub const fn new(value: T) -> Self {
        Self {
            word: LockWord::new(),
            data: UnsafeCell::new(value),
        }
    }

    pub fn lock(&self, relax: fn()) -> SpinGuard<'_, T> {
        self.word.acquire(relax);
        SpinGuard { lock: self }
    }

    pub fn get_mut(&mut self) -> &mut T {
        self.data.get_mut()
    }

    pub fn into_inner(self) -> T {
        self.data.into_inner()
    }

    pub fn word(&self) -> &LockWord {
        &self.word
    }
}

impl<T: fmt::Debug> fmt::Debug for SpinLock<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpinLock")
            .field("held", &self.word.is_held())
            .finish_non_exhaustive()
    }
}

pub struct SpinGuard<'a, T> {
    lock: &'a SpinLock<T>,
}

impl<T> Deref for SpinGuard<'_, T> {
    type Target = T;

    fn deref(&self) -> &T {
        // SAFETY: the guard holds the lock.
        unsafe { &*self.lock.data.get() }
    }
}

impl<T> DerefMut for SpinGuard<'_, T> {
    fn deref_mut(&mut self) -> &mut T {
        // SAFETY: the guard holds the lock.
        unsafe { &mut *self.lock.data.get() }
    }
}

impl<T> Drop for SpinGuard<'_, T> {
    fn drop(&mut self) {
        self.lock.word.release();
    }
}

impl<T: fmt::Debug> fmt::Debug for SpinGuard<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&**self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncontended_acquire_and_release() {
        let w = LockWord::new();
        assert_eq!(w.value(), 0);
        w.acquire(core::hint::spin_loop);
        assert_eq!(w.value(), 1);
        assert!(!w.try_acquire());
        w.release();
        assert_eq!(w.value(), 0);
    }

    #[test]
    #[should_panic(expected = "without being held")]
    fn release_without_hold_panics() {
        LockWord::new().release();
    }

    #[test]
    fn guard_releases_on_drop() {
        let l = SpinLock::new(5);
        {
            let mut g = l.lock(core::hint::spin_loop);
            *g += 1;
            assert!(l.word().is_held());
        }
        assert!(!l.word().is_held());
        assert_eq!(l.into_inner(), 6);
    }
}
