//! Particle-count sweeps for the 1D and 120D problems.

use std::fmt;
use std::str::FromStr;

/// 128, 256, .., 131072.
pub const PARTICLE_COUNTS: [usize; 11] = [
    128, 256, 512, 1_024, 2_048, 4_096, 8_192, 16_384, 32_768, 65_536, 131_072,
];

pub const FULL_1D_ITERATIONS: usize = 100_000;

/// Iterations per particle count of the full-size 120D sweep.
pub const FULL_120D: [(usize, usize); 11] = [
    (128, 5_000),
    (256, 4_000),
    (512, 3_000),
    (1_024, 2_000),
    (2_048, 2_000),
    (4_096, 1_500),
    (8_192, 1_000),
    (16_384, 1_000),
    (32_768, 1_000),
    (65_536, 1_000),
    (131_072, 800),
];

/// Iteration count used instead of the full-size ones, as a ceiling.
pub const DESK_ITERATIONS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    OneD,
    HundredTwentyD,
}

impl Sweep {
    pub fn dims(self) -> usize {
        match self {
            Self::OneD => 1,
            Self::HundredTwentyD => 120,
        }
    }

    /// `(particles, iterations)` rows.
    pub fn cells(self, full_scale: bool) -> Vec<(usize, usize)> {
        match self {
            Self::OneD => {
                let iters = if full_scale { FULL_1D_ITERATIONS } else { DESK_ITERATIONS };
                PARTICLE_COUNTS.iter().map(|&n| (n, iters)).collect()
            }
            Self::HundredTwentyD => FULL_120D
                .iter()
                .map(|&(n, t)| (n, if full_scale { t } else { t.min(DESK_ITERATIONS) }))
                .collect(),
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::OneD => "1d",
            Self::HundredTwentyD => "120d",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown sweep {0:?}, expected 1d or 120d")]
pub struct UnknownSweep(String);

impl FromStr for Sweep {
    type Err = UnknownSweep;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "1d" => Ok(Self::OneD),
            "120d" => Ok(Self::HundredTwentyD),
            _ => Err(UnknownSweep(s.into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_d_rows() {
        let full = Sweep::OneD.cells(true);
        assert_eq!(full.len(), 11);
        assert_eq!(full.first(), Some(&(128, 100_000)));
        assert_eq!(full.last(), Some(&(131_072, 100_000)));
        assert!(Sweep::OneD.cells(false).iter().all(|&(_, t)| t == 1_000));
    }

    #[test]
    fn hundred_twenty_d_rows() {
        assert_eq!(Sweep::HundredTwentyD.cells(true), FULL_120D.to_vec());
        let desk = Sweep::HundredTwentyD.cells(false);
        assert_eq!(desk[0], (128, 1_000));
        assert_eq!(desk[10], (131_072, 800));
    }

    #[test]
    fn parse() {
        assert_eq!("1d".parse(), Ok(Sweep::OneD));
        assert_eq!("120D".parse(), Ok(Sweep::HundredTwentyD));
        assert!("2d".parse::<Sweep>().is_err());
    }
}
