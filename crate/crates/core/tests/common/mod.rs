#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use survivor_core::{HoleSchedule, Params, Word};

/// Survivor counts for `k = 0..=k_max` by walking every word digit by digit
/// and testing each completed window against the hole list directly.
pub fn brute_counts(s: &HoleSchedule, k_max: usize) -> Vec<u64> {
    let p = s.params();
    let m = p.m();
    let holes: Vec<Vec<Vec<u8>>> = (0..k_max.max(1))
        .map(|i| s.hole_at(i).iter().map(|w| w.digits().to_vec()).collect())
        .collect();
    let mut counts = vec![0u64; k_max + 1];
    let mut word = Vec::with_capacity(k_max);
    walk(p.b(), m, &holes, k_max, &mut word, &mut counts);
    counts
}

fn walk(
    b: usize,
    m: usize,
    holes: &[Vec<Vec<u8>>],
    k_max: usize,
    word: &mut Vec<u8>,
    counts: &mut [u64],
) {
    counts[word.len()] += 1;
    if word.len() == k_max {
        return;
    }
    for d in 0..b as u8 {
        word.push(d);
        let k = word.len();
        let alive = k < m || {
            let i = k - m;
            !holes[i].iter().any(|h| h.as_slice() == &word[i..])
        };
        if alive {
            walk(b, m, holes, k_max, word, counts);
        }
        word.pop();
    }
}

pub fn random_word(rng: &mut ChaCha8Rng, p: &Params) -> Word {
    let digits = (0..p.m()).map(|_| rng.gen_range(0..p.b()) as u8).collect();
    Word::new(digits, p).unwrap()
}

/// Explicit schedule with `holes` random words at each of `len` positions and
/// a random tail period.
pub fn random_explicit(rng: &mut ChaCha8Rng, p: &Params, len: usize, holes: usize) -> HoleSchedule {
    let sets = (0..len)
        .map(|_| (0..holes).map(|_| random_word(rng, p)).collect())
        .collect();
    let period = rng.gen_range(1..=len);
    HoleSchedule::explicit(*p, sets, period).unwrap()
}

pub fn params(b: usize, m: usize) -> Params {
    Params::new(b, m).unwrap()
}
