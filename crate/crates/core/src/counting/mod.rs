//! Survivor-word counting over de Bruijn states.
//!
//! A survivor word of length `k >= m-1` is summarized by its last `m-1`
//! digits. Extending by one digit from length `k` checks the window that
//! starts at position `k+1-m`, i.e. the hole `ω^{k+1-m}`.

mod bitmatrix;
mod log;
mod nvec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{Params, Word};
use crate::schedules::HoleSchedule;

pub use bitmatrix::{adjacency_matrix, product_norm, BitMatrix};
pub use log::{log_series, LogSeries};
pub use nvec::{nvec_step, NVector};

/// Exact survivor counts per de Bruijn state at word length `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVector {
    pub k: usize,
    pub counts: Vec<BigUint>,
}

impl StateVector {
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

trait Cell: Clone + Zero {
    #[must_use]
    fn add_to(&mut self, x: &Self) -> bool;
    #[must_use]
    fn sub_from(&mut self, x: &Self) -> bool;
}

impl Cell for u64 {
    #[inline]
    fn add_to(&mut self, x: &Self) -> bool {
        match self.checked_add(*x) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }

    #[inline]
    fn sub_from(&mut self, x: &Self) -> bool {
        match self.checked_sub(*x) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
}

impl Cell for BigUint {
    #[inline]
    fn add_to(&mut self, x: &Self) -> bool {
        *self += x;
        true
    }

    #[inline]
    fn sub_from(&mut self, x: &Self) -> bool {
        if *self < *x {
            return false;
        }
        *self -= x;
        true
    }
}

/// One aggregated step: `next[w·b + c] = Σ_a cur[a·w]` minus, for each hole
/// `x_1…x_m`, the count of its source state `x_1…x_{m-1}` at the target
/// state `x_2…x_m`. `holes` must be deduplicated. Returns false on overflow.
fn step<T: Cell>(p: &Params, holes: &[usize], cur: &[T], next: &mut [T]) -> bool {
    let b = p.b();
    if p.m() == 1 {
        let keep = b - holes.len();
        next[0].set_zero();
        for _ in 0..keep {
            if !next[0].add_to(&cur[0]) {
                return false;
            }
        }
        return true;
    }
    let states = p.states();
    let stride = states / b;
    for w in 0..stride {
        let base = w * b;
        let (head, tail) = next[base..base + b].split_at_mut(1);
        let sum = &mut head[0];
        sum.set_zero();
        for a in 0..b {
            if !sum.add_to(&cur[a * stride + w]) {
                return false;
            }
        }
        for slot in tail {
            slot.clone_from(sum);
        }
    }
    for &h in holes {
        if !next[h % states].sub_from(&cur[h / b]) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone)]
enum Cells {
    Small(Vec<u64>, Vec<u64>),
    Big(Vec<BigUint>, Vec<BigUint>),
}

/// Incremental exact counter; starts at `k = m-1` with every state count 1,
/// or at the end of a given survivor prefix.
#[derive(Debug, Clone)]
pub struct Counter<'a> {
    schedule: &'a HoleSchedule,
    k: usize,
    cells: Cells,
    holes: Vec<usize>,
}

impl<'a> Counter<'a> {
    pub fn new(schedule: &'a HoleSchedule) -> Self {
        let p = schedule.params();
        let n = p.states();
        Counter {
            schedule,
            k: p.m() - 1,
            cells: Cells::Small(vec![1; n], vec![0; n]),
            holes: Vec::new(),
        }
    }

    /// Counter over extensions of `prefix`, which must avoid every hole and have length `>= m`.
    pub fn from_prefix(schedule: &'a HoleSchedule, prefix: &Word) -> Result<Self> {
        let p = schedule.params();
        let m = p.m();
        if prefix.len() < m {
            return Err(Error::WrongWordLength {
                expected: m,
                got: prefix.len(),
            });
        }
        if prefix.digits().iter().any(|&d| d as usize >= p.b()) {
            return Err(Error::InvalidWord(format!(
                "{prefix} has digits outside base {}",
                p.b()
            )));
        }
        let digits = prefix.digits();
        let mut holes = Vec::new();
        for i in 0..=digits.len() - m {
            schedule.hole_codes(i, &mut holes);
            let window = crate::model::pack(&digits[i..i + m], p.b());
            if holes.binary_search(&window).is_ok() {
                return Err(Error::PrefixNotSurvivor(format!(
                    "{prefix} hits the hole at position {i}"
                )));
            }
        }
        let n = p.states();
        let mut start = vec![0u64; n];
        start[crate::model::pack(&digits[digits.len() - (m - 1)..], p.b())] = 1;
        Ok(Counter {
            schedule,
            k: digits.len(),
            cells: Cells::Small(start, vec![0; n]),
            holes,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Extends every survivor word by one digit.
    pub fn advance(&mut self) {
        let p = *self.schedule.params();
        self.schedule
            .hole_codes(self.k + 1 - p.m(), &mut self.holes);
        if let Cells::Small(cur, next) = &mut self.cells {
            if step(&p, &self.holes, cur, next) {
                std::mem::swap(cur, next);
                self.k += 1;
                return;
            }
            let big: Vec<BigUint> = cur.iter().map(|&x| BigUint::from(x)).collect();
            let spare = vec![BigUint::zero(); big.len()];
            self.cells = Cells::Big(big, spare);
        }
        if let Cells::Big(cur, next) = &mut self.cells {
            let ok = step(&p, &self.holes, cur, next);
            debug_assert!(ok, "survivor counts cannot go negative");
            std::mem::swap(cur, next);
            self.k += 1;
        }
    }

    pub fn advance_to(&mut self, k: usize) {
        while self.k < k {
            self.advance();
        }
    }

    pub fn total(&self) -> BigUint {
        match &self.cells {
            Cells::Small(cur, _) => BigUint::from(cur.iter().map(|&x| x as u128).sum::<u128>()),
            Cells::Big(cur, _) => cur.iter().sum(),
        }
    }

    pub fn is_extinct(&self) -> bool {
        match &self.cells {
            Cells::Small(cur, _) => cur.iter().all(|&x| x == 0),
            Cells::Big(cur, _) => cur.iter().all(|x| x.is_zero()),
        }
    }

    pub fn state(&self) -> StateVector {
        let counts = match &self.cells {
            Cells::Small(cur, _) => cur.iter().map(|&x| BigUint::from(x)).collect(),
            Cells::Big(cur, _) => cur.clone(),
        };
        StateVector { k: self.k, counts }
    }
}

fn power(b: usize, k: usize) -> BigUint {
    num_traits::pow(BigUint::from(b), k)
}

/// `|Σ_k^ω|`, exact. `b^k` for `k < m`.
pub fn count_exact(s: &HoleSchedule, k: usize) -> BigUint {
    let m = s.params().m();
    if k < m {
        return power(s.params().b(), k);
    }
    let mut c = Counter::new(s);
    c.advance_to(k);
    c.total()
}

/// State vector at length `k >= m-1`.
pub fn state_at(s: &HoleSchedule, k: usize) -> Result<StateVector> {
    let m = s.params().m();
    if k + 1 < m {
        return Err(Error::InvalidParams(format!(
            "state vectors start at k = m-1 = {}",
            m - 1
        )));
    }
    let mut c = Counter::new(s);
    c.advance_to(k);
    Ok(c.state())
}

/// `|Σ_k^ω|` for `k = 0..=k_max` (index `k`).
pub fn exact_series(s: &HoleSchedule, k_max: usize) -> Vec<BigUint> {
    let m = s.params().m();
    let b = s.params().b();
    let mut out = Vec::with_capacity(k_max + 1);
    let mut pw = BigUint::one();
    for _ in 0..(m - 1).min(k_max + 1) {
        out.push(pw.clone());
        pw *= b;
    }
    let mut c = Counter::new(s);
    while c.k() <= k_max {
        out.push(c.total());
        if c.k() == k_max {
            break;
        }
        c.advance();
    }
    out
}

/// Number of survivor words of length `k` that extend `prefix`.
pub fn count_from_prefix(s: &HoleSchedule, prefix: &Word, k: usize) -> Result<BigUint> {
    let mut c = Counter::from_prefix(s, prefix)?;
    if k < prefix.len() {
        return Err(Error::InvalidParams(format!(
            "target length {k} is shorter than the prefix ({})",
            prefix.len()
        )));
    }
    c.advance_to(k);
    Ok(c.total())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Exact(Vec<BigUint>),
    Log(LogSeries),
}

impl Series {
    /// Natural log of `|Σ_k|`, `-inf` after extinction.
    pub fn ln(&self, k: usize) -> f64 {
        match self {
            Series::Exact(v) => ln_big(&v[k]),
            Series::Log(l) => l.ln(k),
        }
    }

    pub fn drift(&self, k: usize) -> f64 {
        match self {
            Series::Exact(_) => 0.0,
            Series::Log(l) => l.drift_at(k),
        }
    }

    pub fn k_max(&self) -> usize {
        match self {
            Series::Exact(v) => v.len() - 1,
            Series::Log(l) => l.k_max(),
        }
    }

    pub fn extinction(&self) -> Option<usize> {
        match self {
            Series::Exact(v) => v.iter().position(|x| x.is_zero()),
            Series::Log(l) => l.extinction(),
        }
    }
}

pub fn count_series(s: &HoleSchedule, k_max: usize, mode: Mode) -> Series {
    match mode {
        Mode::Exact => Series::Exact(exact_series(s, k_max)),
        Mode::Log => Series::Log(log_series(s, k_max)),
    }
}

/// Natural log of a big integer; `-inf` for zero.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
