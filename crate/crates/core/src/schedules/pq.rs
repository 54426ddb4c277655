//! Run-length sequences `{p_n}`, `{q_n}` of PO/TD blocks.

use std::fmt;
use std::sync::RwLock;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// How the `p_n`, `q_n` are produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PqRule {
    /// `p_n = p`, `q_n = q` for every `n`.
    Fixed { p: u64, q: u64 },
    /// `s < t`: `q_n = ceil+(t_n p_n)`, `p_{n+1} = ceil+(s_n * sum_{i<=n}(p_i + q_i))`
    /// with `t_n = min(t/(1-t), n)`, `s_n = min(t/s - 1, n)`.
    Growing { s: Rational, t: Rational, p1: u64 },
    /// `s = t`: `p_n = ceil+((1-t) n)`, `q_n = ceil+(t n)`.
    Balanced { t: Rational },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Term {
    p: u64,
    q: u64,
    /// `sum_{i<=n} (p_i + q_i)`
    cum: u64,
}

/// A lazily evaluated pair of positive sequences `{p_n}`, `{q_n}` (`n >= 1`).
///
/// Terms are memoized behind a lock so one schedule can be shared across
/// threads. Values saturate at `u64::MAX`, far past any reachable position.
#[derive(Debug)]
pub struct PQSchedule {
    rule: PqRule,
    terms: RwLock<Vec<Term>>,
}

impl Clone for PQSchedule {
    fn clone(&self) -> Self {
        PQSchedule::from_rule(self.rule.clone())
    }
}

impl PartialEq for PQSchedule {
    fn eq(&self, other: &Self) -> bool {
        self.rule == other.rule
    }
}

impl Eq for PQSchedule {}

/// Smallest integer strictly larger than `x` (for `x >= 0`).
fn strict_ceil(x: Ratio<i128>) -> Option<u64> {
    let f = x.numer().div_floor(x.denom());
    u64::try_from(f + 1).ok()
}

fn widen(r: Rational) -> Ratio<i128> {
    Ratio::new(*r.numer() as i128, *r.denom() as i128)
}

impl PQSchedule {
    pub fn fixed(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidSchedule("p and q must be positive".into()));
        }
        Ok(Self::from_rule(PqRule::Fixed { p, q }))
    }

    fn from_rule(rule: PqRule) -> Self {
        PQSchedule {
            rule,
            terms: RwLock::new(Vec::new()),
        }
    }

    pub fn rule(&self) -> &PqRule {
        &self.rule
    }

    /// Target limits `(s, t)` when the rule was built from them.
    pub fn limits(&self) -> Option<(Rational, Rational)> {
        match &self.rule {
            PqRule::Fixed { .. } => None,
            PqRule::Growing { s, t, .. } => Some((*s, *t)),
            PqRule::Balanced { t } => Some((*t, *t)),
        }
    }

    fn next_term(&self, prev: &[Term]) -> Term {
        let n = prev.len() + 1;
        let cum_prev = prev.last().map_or(0, |t| t.cum);
        let (p, q) = match &self.rule {
            PqRule::Fixed { p, q } => (*p, *q),
            PqRule::Balanced { t } => {
                let t = widen(*t);
                let n = Ratio::from_integer(n as i128);
                let p = strict_ceil((Ratio::one() - t) * n).unwrap_or(u64::MAX);
                let q = strict_ceil(t * n).unwrap_or(u64::MAX);
                (p, q)
            }
            PqRule::Growing { s, t, p1 } => {
                let (s, t) = (widen(*s), widen(*t));
                let cap = |bound: Option<Ratio<i128>>, n: usize| -> Ratio<i128> {
                    let n = Ratio::from_integer(n as i128);
                    match bound {
                        Some(x) if x < n => x,
                        _ => n,
                    }
                };
                let t_ratio = if t == Ratio::one() {
                    None
                } else {
                    Some(t / (Ratio::one() - t))
                };
                let s_ratio = if s.is_zero() {
                    None
                } else {
                    Some(t / s - Ratio::one())
                };
                let p = if n == 1 {
                    *p1
                } else {
                    let s_prev = cap(s_ratio, n - 1);
                    mul_ceil(s_prev, cum_prev)
                };
                let q = mul_ceil(cap(t_ratio, n), p);
                (p, q)
            }
        };
        let cum = cum_prev.saturating_add(p).saturating_add(q);
        Term { p, q, cum }
    }

    fn ensure(&self, n: usize) {
        if self.terms.read().unwrap().len() >= n {
            return;
        }
        let mut terms = self.terms.write().unwrap();
        while terms.len() < n {
            let t = self.next_term(&terms);
            terms.push(t);
        }
    }

    /// Extends the cache until `cum_n + gap * n >= position`.
    fn ensure_reaching(&self, position: u64, gap: u64) {
        let reaches = |terms: &Vec<Term>| {
            terms.last().is_some_and(|t| {
                t.cum.saturating_add(gap.saturating_mul(terms.len() as u64)) >= position
            })
        };
        if reaches(&self.terms.read().unwrap()) {
            return;
        }
        let mut terms = self.terms.write().unwrap();
        while !reaches(&terms) {
            let t = self.next_term(&terms);
            terms.push(t);
        }
    }

    /// `(p_n, q_n)` for `n >= 1`.
    pub fn term(&self, n: usize) -> (u64, u64) {
        assert!(n >= 1, "p_n, q_n are indexed from 1");
        self.ensure(n);
        let t = self.terms.read().unwrap()[n - 1];
        (t.p, t.q)
    }

    /// First `count` terms as parallel vectors.
    pub fn terms(&self, count: usize) -> (Vec<u64>, Vec<u64>) {
        self.ensure(count);
        let terms = self.terms.read().unwrap();
        terms[..count].iter().map(|t| (t.p, t.q)).unzip()
    }

    /// `l_n = sum_{i=0}^{n} (p_i + q_i) + gap * n` with `p_0 = q_0 = 0`.
    pub fn ell(&self, n: usize, gap: u64) -> u64 {
        if n == 0 {
            return 0;
        }
        self.ensure(n);
        let cum = self.terms.read().unwrap()[n - 1].cum;
        cum.saturating_add(gap.saturating_mul(n as u64))
    }

    /// Locates position `k >= 1`: returns `(n, offset)` with `l_n < k <= l_{n+1}`
    /// and `offset = k - l_n` in `1..=p_{n+1} + q_{n+1} + gap`.
    pub(crate) fn locate(&self, k: u64, gap: u64) -> (usize, u64, u64, u64) {
        debug_assert!(k >= 1);
        self.ensure_reaching(k, gap);
        let terms = self.terms.read().unwrap();
        let ell = |i: usize| -> u64 {
            if i == 0 {
                0
            } else {
                terms[i - 1]
                    .cum
                    .saturating_add(gap.saturating_mul(i as u64))
            }
        };
        // smallest i >= 1 with ell(i) >= k
        let (mut lo, mut hi) = (1usize, terms.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if ell(mid) >= k {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let n = lo - 1;
        let t = terms[n];
        (n, k - ell(n), t.p, t.q)
    }
}

fn mul_ceil(r: Ratio<i128>, x: u64) -> u64 {
    match r.numer().checked_mul(x as i128) {
        Some(num) => strict_ceil(Ratio::new(num, *r.denom())).unwrap_or(u64::MAX),
        None => u64::MAX,
    }
}

/// Builds the run-length sequences realizing limiting PO/TD proportions `(s, t)`.
///
/// For `s < t` the growing rule is used with first term `p1`; for `s = t`
/// the balanced rule (`p1` unused). Ceilings are strict: `ceil+(2) = 3`.
pub fn build_pq_schedule(s: Rational, t: Rational, p1: u64) -> Result<PQSchedule> {
    let unit = |x: Rational| x >= Rational::zero() && x <= Rational::one();
    if !unit(s) || !unit(t) {
        return Err(Error::InvalidSchedule(format!(
            "s = {s} and t = {t} must lie in [0, 1]"
        )));
    }
    if s > t {
        return Err(Error::InvalidSchedule(format!("s = {s} exceeds t = {t}")));
    }
    if s == t {
        return Ok(PQSchedule::from_rule(PqRule::Balanced { t }));
    }
    if p1 == 0 {
        return Err(Error::InvalidSchedule("p1 must be positive".into()));
    }
    Ok(PQSchedule::from_rule(PqRule::Growing { s, t, p1 }))
}

impl fmt::Display for PQSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            PqRule::Fixed { p, q } => write!(f, "p={p},q={q}"),
            PqRule::Growing { s, t, p1 } => write!(f, "s={s},t={t},p1={p1}"),
            PqRule::Balanced { t } => write!(f, "s={t},t={t},p1=1"),
        }
    }
}

/// Ratio of partial sums `sum q_i / sum (p_i + q_i)` over the first `n` terms.
pub fn td_share(pq: &PQSchedule, n: usize) -> f64 {
    let (p, q) = pq.terms(n);
    let sq: u128 = q.iter().map(|&x| x as u128).sum();
    let sp: u128 = p.iter().map(|&x| x as u128).sum();
    (sq as f64) / ((sp + sq) as f64)
}

/// `sum q_i / (sum (p_i + q_i) + p_{n+1})`, whose limit is `s`.
pub fn td_share_before_run(pq: &PQSchedule, n: usize) -> f64 {
    let (p, q) = pq.terms(n + 1);
    let sq: u128 = q[..n].iter().map(|&x| x as u128).sum();
    let sp: u128 = p[..n].iter().map(|&x| x as u128).sum();
    (sq as f64) / ((sp + sq + p[n] as u128) as f64)
}

pub(crate) fn ratio_to_f64(r: Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}
