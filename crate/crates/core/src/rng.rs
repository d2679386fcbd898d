//! Counter-based random stream.
//!
//! Every random number a run consumes is addressed by its coordinates
//! `(iteration, particle, axis, slot)` and computed as Philox4x32-10 of that
//! counter under the run key. Nothing is stateful, so the value a lane sees does
//! not depend on which worker runs it or in what order.

use crate::error::ConfigError;

/// Key of a random stream. Equal keys define equal streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngKey {
    pub seed: u64,
}

impl RngKey {
    pub const fn new(seed: u64) -> Self {
        Self { seed }
    }
}

impl From<u64> for RngKey {
    fn from(seed: u64) -> Self {
        Self::new(seed)
    }
}

/// What a draw is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u32)]
pub enum Slot {
    R1 = 0,
    R2 = 1,
    InitPos = 2,
    InitVel = 3,
}

/// Coordinates of one draw. Iteration 0 is initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngDraw {
    pub iteration: u32,
    pub particle: u32,
    pub axis: u32,
    pub slot: Slot,
}

impl RngDraw {
    pub const fn new(iteration: u32, particle: u32, axis: u32, slot: Slot) -> Self {
        Self {
            iteration,
            particle,
            axis,
            slot,
        }
    }

    fn counter(self) -> [u32; 4] {
        [self.iteration, self.particle, self.axis, self.slot as u32]
    }
}

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = a as u64 * b as u64;
    ((p >> 32) as u32, p as u32)
}

/// Philox4x32 with 10 rounds.
#[inline(always)]
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for _ in 0..10 {
        let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
        k = [k[0].wrapping_add(PHILOX_W0), k[1].wrapping_add(PHILOX_W1)];
    }
    c
}

/// Uniform real in `[0, 1)`: the high 53 bits of the first output word pair
/// divided by 2^53.
#[inline(always)]
pub fn uniform01(key: RngKey, draw: RngDraw) -> f64 {
    let k = [key.seed as u32, (key.seed >> 32) as u32];
    let out = philox4x32_10(draw.counter(), k);
    let bits = ((out[0] as u64) << 32) | out[1] as u64;
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform real in `[lo, hi]`, `lo + u * (hi - lo)`.
pub fn uniform_range(key: RngKey, draw: RngDraw, lo: f64, hi: f64) -> Result<f64, ConfigError> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(ConfigError::InvertedRange { lo, hi });
    }
    Ok(scale(uniform01(key, draw), lo, hi))
}

#[inline]
pub(crate) fn scale(u: f64, lo: f64, hi: f64) -> f64 {
    // fl(hi - lo) may round up; keep the result inside the closed range.
    (lo + u * (hi - lo)).min(hi)
}
