use std::fmt;

use crate::error::Result;
use crate::model::{Params, Word};

/// A deterministic digit stream feeding the schedule generators.
///
/// `Cycle` repeats an explicit digit list. `Rng(seed)` is a counter-based
/// stream: digit `i` is `splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15) mod b`.
/// This definition is frozen; the same seed yields the same digits forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SeedStream {
    Cycle(Vec<u8>),
    Rng(u64),
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedStream {
    /// Constant-zero stream.
    pub fn zeros() -> Self {
        SeedStream::Cycle(vec![0])
    }

    pub fn cycle(digits: &[u8]) -> Self {
        SeedStream::Cycle(digits.to_vec())
    }

    /// Checks that every explicit digit is below `b`.
    pub fn validate(&self, p: &Params) -> Result<()> {
        if let SeedStream::Cycle(d) = self {
            if d.is_empty() {
                return Err(crate::Error::InvalidSchedule("empty seed".into()));
            }
            for &x in d {
                p.check_digit(x as usize)?;
            }
        }
        Ok(())
    }

    #[inline]
    pub fn digit(&self, i: usize, b: usize) -> u8 {
        match self {
            SeedStream::Cycle(d) => d[i % d.len()],
            SeedStream::Rng(seed) => {
                let z = seed.wrapping_add((i as u64).wrapping_add(1).wrapping_mul(GOLDEN));
                (splitmix64(z) % b as u64) as u8
            }
        }
    }
}

impl fmt::Display for SeedStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedStream::Cycle(d) => write!(f, "{}", Word::from_digits_unchecked(d.clone())),
            SeedStream::Rng(n) => write!(f, "rng:{n}"),
        }
    }
}
