//! Hole schedules `k -> {ω^k}`, the structural generators, and the PO/TD classifier.

mod pq;
mod seed;

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::model::{pack, Params, Word};

pub(crate) use pq::ratio_to_f64;
pub use pq::{build_pq_schedule, td_share, td_share_before_run, PQSchedule, PqRule, Rational};
pub use seed::SeedStream;

/// Overlap pattern of a single-hole schedule at a position `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternClass {
    ProgressivelyOverlapping,
    TotallyDistinct,
    Neither,
}

impl PatternClass {
    pub fn short(&self) -> &'static str {
        match self {
            PatternClass::ProgressivelyOverlapping => "PO",
            PatternClass::TotallyDistinct => "TD",
            PatternClass::Neither => "neither",
        }
    }
}

impl fmt::Display for PatternClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

/// Whether a PO/TD family inserts `m` unconstrained positions after each TD run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapMode {
    None,
    MGap,
}

impl GapMode {
    fn width(self, m: usize) -> u64 {
        match self {
            GapMode::None => 0,
            GapMode::MGap => m as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    /// `sets[k]` for `k < len`, after which the last `period` sets repeat.
    Explicit {
        sets: Vec<Vec<Word>>,
        period: usize,
    },
    Periodic(Vec<Word>),
    ProgressiveOverlap(SeedStream),
    TotallyDistinct(SeedStream),
    Family {
        pq: Arc<PQSchedule>,
        gap: GapMode,
        seed: SeedStream,
    },
    Mixed(SeedStream),
    Multi(Vec<HoleSchedule>),
}

/// A deterministic rule giving the forbidden words at every time `k >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleSchedule {
    params: Params,
    rule: Rule,
}

#[inline]
fn avoid(d: u8) -> u8 {
    if d == 0 {
        1
    } else {
        0
    }
}

fn check_len(w: &Word, p: &Params) -> Result<()> {
    if w.len() != p.m() {
        return Err(Error::WrongWordLength {
            expected: p.m(),
            got: w.len(),
        });
    }
    Ok(())
}

fn need_base_three(p: &Params, what: &str) -> Result<()> {
    if p.b() < 3 {
        return Err(Error::InvalidSchedule(format!(
            "{what} needs b >= 3: with two digits the avoided digit can be forced into conflict"
        )));
    }
    Ok(())
}

impl HoleSchedule {
    pub fn explicit(params: Params, sets: Vec<Vec<Word>>, period: usize) -> Result<Self> {
        if sets.is_empty() || sets.iter().any(|s| s.is_empty()) {
            return Err(Error::InvalidSchedule(
                "explicit schedule needs nonempty hole sets".into(),
            ));
        }
        if period == 0 || period > sets.len() {
            return Err(Error::InvalidSchedule(format!(
                "tail period {period} must be in 1..={}",
                sets.len()
            )));
        }
        for w in sets.iter().flatten() {
            check_len(w, &params)?;
        }
        Ok(HoleSchedule {
            params,
            rule: Rule::Explicit { sets, period },
        })
    }

    /// Single holes given explicitly; the whole list repeats.
    pub fn periodic(params: Params, words: Vec<Word>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::InvalidSchedule(
                "periodic schedule needs at least one word".into(),
            ));
        }
        for w in &words {
            check_len(w, &params)?;
        }
        Ok(HoleSchedule {
            params,
            rule: Rule::Periodic(words),
        })
    }

    /// `ω^k = d_{k+1} … d_{k+m}`, seed index 0 being `d_1`.
    pub fn progressive(params: Params, seed: SeedStream) -> Result<Self> {
        seed.validate(&params)?;
        Ok(HoleSchedule {
            params,
            rule: Rule::ProgressiveOverlap(seed),
        })
    }

    /// `ω^k_m = d_k` and `ω^k_j` the smallest digit other than `d_{k-m+j}`;
    /// `ω^0 = d_{-(m-1)} … d_0` with zero padding. Seed index 0 is `d_0`.
    pub fn totally_distinct(params: Params, seed: SeedStream) -> Result<Self> {
        need_base_three(&params, "a totally distinct schedule")?;
        seed.validate(&params)?;
        Ok(HoleSchedule {
            params,
            rule: Rule::TotallyDistinct(seed),
        })
    }

    /// Alternating runs of `p_n` PO and `q_n` TD positions.
    ///
    /// With `GapMode::None` the runs tile `1, 2, …` and holes are seed windows
    /// `d_{k+1} … d_{k+m}` whose first digit is replaced on TD runs. With
    /// `GapMode::MGap` each cycle ends with `m` unconstrained window positions
    /// and TD positions follow the totally distinct rule.
    pub fn family(params: Params, pq: PQSchedule, gap: GapMode, seed: SeedStream) -> Result<Self> {
        need_base_three(&params, "a PO/TD family")?;
        seed.validate(&params)?;
        Ok(HoleSchedule {
            params,
            rule: Rule::Family {
                pq: Arc::new(pq),
                gap,
                seed,
            },
        })
    }

    /// Periodic `p` PO positions then `q` TD positions, no gaps.
    pub fn lpq(params: Params, p: u64, q: u64, seed: SeedStream) -> Result<Self> {
        Self::family(params, PQSchedule::fixed(p, q)?, GapMode::None, seed)
    }

    /// `ω^k_1 = ω^{k-m+1}_m`, middle digits avoiding every overlap with shift
    /// `j <= m-2`, `ω^k_m = d_k`; seed windows for `k < m-1`.
    pub fn mixed(params: Params, seed: SeedStream) -> Result<Self> {
        if params.m() < 3 {
            return Err(Error::InvalidSchedule(
                "the mixed pattern needs m >= 3".into(),
            ));
        }
        need_base_three(&params, "the mixed pattern")?;
        seed.validate(&params)?;
        Ok(HoleSchedule {
            params,
            rule: Rule::Mixed(seed),
        })
    }

    /// Union of the constituents' holes at each position.
    pub fn multi(parts: Vec<HoleSchedule>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidSchedule(
                "multi schedule needs at least one part".into(),
            ));
        };
        let params = first.params;
        if parts.iter().any(|s| s.params != params) {
            return Err(Error::InvalidSchedule(
                "multi parts must share (b, m)".into(),
            ));
        }
        Ok(HoleSchedule {
            params,
            rule: Rule::Multi(parts),
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// Constituents of a multi schedule, or the schedule itself.
    pub fn parts(&self) -> Vec<&HoleSchedule> {
        match &self.rule {
            Rule::Multi(parts) => parts.iter().collect(),
            _ => vec![self],
        }
    }

    /// True when every position carries exactly one hole by construction.
    pub fn is_single(&self) -> bool {
        match &self.rule {
            Rule::Multi(parts) => parts.len() == 1 && parts[0].is_single(),
            Rule::Explicit { sets, .. } => sets.iter().all(|s| s.iter().all(|w| w == &s[0])),
            _ => true,
        }
    }

    fn write_single(&self, k: usize, buf: &mut [u8]) {
        let (b, m) = (self.params.b(), self.params.m());
        let window_from = |seed: &SeedStream, start: i64, buf: &mut [u8]| {
            for (j, slot) in buf.iter_mut().enumerate() {
                let i = start + j as i64;
                *slot = if i < 0 { 0 } else { seed.digit(i as usize, b) };
            }
        };
        let td_rule = |seed: &SeedStream, buf: &mut [u8]| {
            window_from(seed, k as i64 - m as i64 + 1, buf);
            for slot in &mut buf[..m - 1] {
                *slot = avoid(*slot);
            }
        };
        match &self.rule {
            Rule::Periodic(words) => buf.copy_from_slice(words[k % words.len()].digits()),
            Rule::Explicit { .. } | Rule::Multi(_) => unreachable!("multi-valued rule"),
            Rule::ProgressiveOverlap(seed) => window_from(seed, k as i64, buf),
            Rule::TotallyDistinct(seed) => {
                if k == 0 {
                    window_from(seed, 1 - m as i64, buf);
                } else {
                    td_rule(seed, buf);
                }
            }
            Rule::Family { pq, gap, seed } => {
                let class = if k == 0 {
                    None
                } else {
                    family_class(pq, *gap, m, k)
                };
                match (gap, class) {
                    (GapMode::None, Some(PatternClass::TotallyDistinct)) => {
                        window_from(seed, k as i64, buf);
                        buf[0] = avoid(buf[0]);
                    }
                    (GapMode::None, _) => window_from(seed, k as i64, buf),
                    (GapMode::MGap, Some(PatternClass::TotallyDistinct)) => td_rule(seed, buf),
                    (GapMode::MGap, _) => window_from(seed, k as i64 - m as i64 + 1, buf),
                }
            }
            Rule::Mixed(seed) => {
                window_from(seed, k as i64 - m as i64 + 1, buf);
                if k + 1 >= m {
                    for slot in &mut buf[1..m - 1] {
                        *slot = avoid(*slot);
                    }
                }
            }
        }
    }

    /// Digits of the hole at `k` for a schedule with `is_single()`.
    fn write_hole(&self, k: usize, buf: &mut [u8]) {
        match &self.rule {
            Rule::Explicit { .. } | Rule::Multi(_) => {
                let mut codes = Vec::new();
                self.hole_codes(k, &mut codes);
                let w = Word::from_index(codes[0], self.params.m(), self.params.b());
                buf.copy_from_slice(w.digits());
            }
            _ => self.write_single(k, buf),
        }
    }

    fn collect_codes(&self, k: usize, buf: &mut Vec<u8>, out: &mut Vec<usize>) {
        let b = self.params.b();
        match &self.rule {
            Rule::Explicit { sets, period } => {
                let len = sets.len();
                let idx = if k < len {
                    k
                } else {
                    len - period + (k - len) % period
                };
                out.extend(sets[idx].iter().map(|w| w.index(b)));
            }
            Rule::Multi(parts) => {
                for part in parts {
                    part.collect_codes(k, buf, out);
                }
            }
            _ => {
                buf.resize(self.params.m(), 0);
                self.write_single(k, buf);
                out.push(pack(buf, b));
            }
        }
    }

    /// Packed indices (in `[0, b^m)`) of the holes at time `k`, sorted and deduplicated.
    pub fn hole_codes(&self, k: usize, out: &mut Vec<usize>) {
        out.clear();
        let mut buf = Vec::with_capacity(self.params.m());
        self.collect_codes(k, &mut buf, out);
        if out.len() > 1 {
            out.sort_unstable();
            out.dedup();
        }
    }

    /// The set of forbidden words at time `k`, in lexicographic order.
    pub fn hole_at(&self, k: usize) -> Vec<Word> {
        let mut codes = Vec::new();
        self.hole_codes(k, &mut codes);
        codes
            .into_iter()
            .map(|c| Word::from_index(c, self.params.m(), self.params.b()))
            .collect()
    }

    /// The unique hole at time `k`; errors if the set has several words.
    pub fn single_hole(&self, k: usize) -> Result<Word> {
        let mut holes = self.hole_at(k);
        if holes.len() != 1 {
            return Err(Error::MultiHole);
        }
        Ok(holes.pop().unwrap())
    }

    /// The class the generator was built to produce at `k >= 1`, if any.
    pub fn scheduled_class(&self, k: usize) -> Option<PatternClass> {
        if k == 0 {
            return None;
        }
        match &self.rule {
            Rule::ProgressiveOverlap(_) => Some(PatternClass::ProgressivelyOverlapping),
            Rule::TotallyDistinct(_) => Some(PatternClass::TotallyDistinct),
            Rule::Family { pq, gap, .. } => family_class(pq, *gap, self.params.m(), k),
            _ => None,
        }
    }
}

fn family_class(pq: &PQSchedule, gap: GapMode, m: usize, k: usize) -> Option<PatternClass> {
    let (_, offset, p, q) = pq.locate(k as u64, gap.width(m));
    if offset <= p {
        Some(PatternClass::ProgressivelyOverlapping)
    } else if offset <= p.saturating_add(q) {
        Some(PatternClass::TotallyDistinct)
    } else {
        None
    }
}

/// Class of position `k` given `ω^k` and `ω^{k-1}, ω^{k-2}, …` (nearest first).
fn classify_words(current: &[u8], previous: &[&[u8]]) -> PatternClass {
    let m = current.len();
    let (mut all_eq, mut all_ne) = (true, true);
    for (i, prev) in previous.iter().enumerate().take(m - 1) {
        let j = i + 1;
        if current[..m - j] == prev[j..] {
            all_ne = false;
        } else {
            all_eq = false;
        }
    }
    match (all_eq, all_ne) {
        (true, _) => PatternClass::ProgressivelyOverlapping,
        (_, true) => PatternClass::TotallyDistinct,
        _ => PatternClass::Neither,
    }
}

fn check_classifiable(s: &HoleSchedule) -> Result<()> {
    if s.params.m() < 2 {
        return Err(Error::InvalidParams(
            "PO/TD classes are vacuous for m = 1".into(),
        ));
    }
    if !s.is_single() {
        return Err(Error::MultiHole);
    }
    Ok(())
}

/// PO iff `ω^k_1…ω^k_{m-j} = ω^{k-j}_{j+1}…ω^{k-j}_m` for every `1 <= j <= min(k, m-1)`,
/// TD iff all of these fail.
pub fn classify_position(s: &HoleSchedule, k: usize) -> Result<PatternClass> {
    if k == 0 {
        return Err(Error::PositionZero(k));
    }
    check_classifiable(s)?;
    let m = s.params.m();
    let current = s.single_hole(k)?;
    let prev: Vec<Word> = (1..=k.min(m - 1))
        .map(|j| s.single_hole(k - j))
        .collect::<Result<_>>()?;
    let refs: Vec<&[u8]> = prev.iter().map(|w| w.digits()).collect();
    Ok(classify_words(current.digits(), &refs))
}

/// Classes of positions `1..=n`, computed with a sliding window of holes.
pub fn classify_range(s: &HoleSchedule, n: usize) -> Result<Vec<PatternClass>> {
    check_classifiable(s)?;
    let m = s.params.m();
    let mut window: VecDeque<Vec<u8>> = VecDeque::with_capacity(m);
    let mut out = Vec::with_capacity(n);
    let mut buf = vec![0u8; m];
    s.write_hole(0, &mut buf);
    window.push_front(buf.clone());
    for k in 1..=n {
        s.write_hole(k, &mut buf);
        let refs: Vec<&[u8]> = window.iter().map(|w| w.as_slice()).collect();
        out.push(classify_words(&buf, &refs));
        if window.len() == m - 1 {
            window.pop_back();
        }
        window.push_front(buf.clone());
    }
    Ok(out)
}

/// Positions `k <= n` where the generator's intended class differs from the classifier.
pub fn conformance(s: &HoleSchedule, n: usize) -> Result<Vec<(usize, PatternClass, PatternClass)>> {
    let classes = classify_range(s, n)?;
    Ok(classes
        .into_iter()
        .enumerate()
        .filter_map(|(i, got)| {
            let k = i + 1;
            s.scheduled_class(k)
                .filter(|&want| want != got)
                .map(|want| (k, want, got))
        })
        .collect())
}

/// `(#PO ∩ (0,n] / n, #TD ∩ (0,n] / n)` as exact fractions.
pub fn pattern_density(s: &HoleSchedule, n: usize) -> Result<(Ratio<u64>, Ratio<u64>)> {
    if n == 0 {
        return Err(Error::PositionZero(0));
    }
    let classes = classify_range(s, n)?;
    let po = classes
        .iter()
        .filter(|c| **c == PatternClass::ProgressivelyOverlapping)
        .count();
    let td = classes
        .iter()
        .filter(|c| **c == PatternClass::TotallyDistinct)
        .count();
    Ok((
        Ratio::new(po as u64, n as u64),
        Ratio::new(td as u64, n as u64),
    ))
}

fn join_words(words: &[Word], sep: &str) -> String {
    words
        .iter()
        .map(|w| w.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

impl fmt::Display for HoleSchedule {
    /// Canonical form in the schedule grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Rule::Explicit { sets, period } => {
                let sets: Vec<String> = sets.iter().map(|s| join_words(s, "+")).collect();
                write!(f, "explicit:{},tail={period}", sets.join("|"))
            }
            Rule::Periodic(words) => write!(f, "periodic:{}", join_words(words, "|")),
            Rule::ProgressiveOverlap(seed) => write!(f, "po:seed={seed}"),
            Rule::TotallyDistinct(seed) => write!(f, "td:seed={seed}"),
            Rule::Mixed(seed) => write!(f, "mixed:seed={seed}"),
            Rule::Family { pq, gap, seed } => {
                let (head, default_gap) = match pq.rule() {
                    PqRule::Fixed { .. } => ("lpq", GapMode::None),
                    _ => ("family", GapMode::MGap),
                };
                write!(f, "{head}:{pq},seed={seed}")?;
                if *gap != default_gap {
                    let g = if *gap == GapMode::None { "none" } else { "m" };
                    write!(f, ",gap={g}")?;
                }
                Ok(())
            }
            Rule::Multi(parts) => {
                let parts: Vec<String> = parts.iter().map(|p| format!("({p})")).collect();
                write!(f, "multi:{}", parts.join(";"))
            }
        }
    }
}
