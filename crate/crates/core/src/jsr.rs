//! Upper and lower bounds on the joint spectral radius of the family
//! `{A_d : d ∈ D_b^m}` and the periodic finiteness check.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{adjacency_matrix, count_exact, ln_big};
use crate::error::{Error, Result};
use crate::model::{Params, Word};
use crate::schedules::{classify_range, HoleSchedule, PatternClass, SeedStream};
use crate::spectra::{dominant_root, spectral_radius, IntMatrix, RootKind};

/// Default cap on the number of block sequences visited by the exhaustive search.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Maximizing sequences kept in a report; the total is always counted.
pub const MAX_LISTED: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exhaustive {
    pub depth: usize,
    /// `max ‖A_{d^1}···A_{d^n}‖` with the all-ones norm.
    #[serde(serialize_with = "as_string")]
    pub max_norm: BigUint,
    /// `max_norm^{1/n}`.
    pub value: f64,
    pub maximizer_count: u64,
    /// Maximizing block sequences in lexicographic order, at most `MAX_LISTED`.
    pub maximizers: Vec<Vec<Word>>,
}

fn as_string<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Number of products visited for depth `n`, if it fits.
fn leaves(p: &Params, n: usize) -> Option<u128> {
    (p.words() as u128).checked_pow(u32::try_from(n).ok()?)
}

struct Search<'a> {
    p: &'a Params,
    n: usize,
    /// `levels[d]` is the state vector before block `d`.
    levels: Vec<Vec<u128>>,
    path: Vec<usize>,
    best: u128,
    count: u64,
    listed: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(p: &'a Params, n: usize) -> Self {
        let mut levels = vec![vec![0u128; p.states()]; n];
        levels[0].fill(1);
        Search {
            p,
            n,
            levels,
            path: Vec::with_capacity(n),
            best: 0,
            count: 0,
            listed: Vec::new(),
        }
    }

    fn offer(&mut self, total: u128) {
        if total < self.best {
            return;
        }
        if total > self.best {
            self.best = total;
            self.count = 0;
            self.listed.clear();
        }
        self.count += 1;
        if self.listed.len() < MAX_LISTED {
            self.listed.push(self.path.clone());
        }
    }

    /// Applies block `h` to `levels[depth]` and continues below it.
    fn visit(&mut self, depth: usize, h: usize) {
        let (b, m, states) = (self.p.b() as u128, self.p.m(), self.p.states());
        self.path.push(h);
        if depth + 1 == self.n {
            let cur = &self.levels[depth];
            // Only the total is needed at the last level.
            let total = if m == 1 {
                (b - 1) * cur[0]
            } else {
                b * cur.iter().sum::<u128>() - cur[h / self.p.b()]
            };
            self.offer(total);
        } else {
            let (head, tail) = self.levels.split_at_mut(depth + 1);
            let (cur, next) = (&head[depth], &mut tail[0]);
            if m == 1 {
                next[0] = (b - 1) * cur[0];
            } else {
                let b = self.p.b();
                let stride = states / b;
                for w in 0..stride {
                    let total: u128 = (0..b).map(|a| cur[a * stride + w]).sum();
                    next[w * b..w * b + b].fill(total);
                }
                next[h % states] -= cur[h / b];
            }
            for g in 0..self.p.words() {
                self.visit(depth + 1, g);
            }
        }
        self.path.pop();
    }
}

/// Exact maximum of `‖A_{d^1}···A_{d^n}‖` over all `(b^m)^n` block sequences.
///
/// The norm is the sum of entries, i.e. the survivor count of length
/// `n + m - 1` for the schedule `d^1, …, d^n`. The search runs depth-first
/// over state vectors, one rayon task per first block.
pub fn jsr_upper_exhaustive(p: &Params, n: usize, budget: u128) -> Result<Exhaustive> {
    if n == 0 {
        return Err(Error::InvalidParams("depth must be at least 1".into()));
    }
    let needed = leaves(p, n).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let parts: Vec<Search> = (0..p.words())
        .into_par_iter()
        .map(|first| {
            let mut s = Search::new(p, n);
            s.visit(0, first);
            s
        })
        .collect();
    let best = parts.iter().map(|s| s.best).max().unwrap_or(0);
    let mut count = 0u64;
    let mut listed = Vec::new();
    for s in parts.into_iter().filter(|s| s.best == best) {
        count += s.count;
        let room = MAX_LISTED - listed.len();
        listed.extend(s.listed.into_iter().take(room));
    }
    let maximizers = listed
        .into_iter()
        .map(|seq| {
            seq.into_iter()
                .map(|c| Word::from_index(c, p.m(), p.b()))
                .collect()
        })
        .collect();
    let max_norm = BigUint::from(best);
    Ok(Exhaustive {
        depth: n,
        value: nth_root(&max_norm, n),
        max_norm,
        maximizer_count: count,
        maximizers,
    })
}

fn nth_root(x: &BigUint, n: usize) -> f64 {
    match x.to_f64() {
        Some(v) if v.is_finite() && v > 0.0 => v.powf(1.0 / n as f64),
        _ => (ln_big(x) / n as f64).exp(),
    }
}

/// `|Σ^ζ_{n+m-1}|` for the constant-zero PO schedule `ζ`, and its `n`-th root.
///
/// A PO prefix maximizes the survivor count, so this equals the exhaustive
/// maximum without any search.
pub fn jsr_upper_po(p: &Params, n: usize) -> Result<(BigUint, f64)> {
    if n == 0 {
        return Err(Error::InvalidParams("depth must be at least 1".into()));
    }
    let s = HoleSchedule::progressive(*p, SeedStream::zeros())?;
    let count = count_exact(&s, n + p.m() - 1);
    let root = nth_root(&count, n);
    Ok((count, root))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finiteness {
    pub block: Vec<Word>,
    pub product: IntMatrix,
    pub rho: f64,
    /// `rho^{1/n}`.
    pub rate: f64,
    pub lambda: f64,
    pub error: f64,
    pub pass: bool,
}

/// Spectral radius of `A_{w_1}···A_{w_n}` for a block whose periodic
/// extension is PO, compared with `λ`.
pub fn finiteness_check(p: &Params, block: &[Word]) -> Result<Finiteness> {
    if block.is_empty() {
        return Err(Error::InvalidParams(
            "block must contain at least one word".into(),
        ));
    }
    let n = block.len();
    let s = HoleSchedule::periodic(*p, block.to_vec())?;
    let classes = classify_range(&s, n + p.m())?;
    if let Some(i) = classes
        .iter()
        .position(|c| *c != PatternClass::ProgressivelyOverlapping)
    {
        return Err(Error::NotProgressivelyOverlapping(i + 1));
    }
    let mut product = IntMatrix::identity(p.states());
    for w in block {
        let a = adjacency_matrix(std::slice::from_ref(w), p)?;
        let dense: Vec<Vec<i64>> = a
            .to_dense()
            .into_iter()
            .map(|r| r.into_iter().map(i64::from).collect())
            .collect();
        product = product.mul(&IntMatrix::from_rows(&dense));
    }
    let rho = spectral_radius(&product)?;
    let rate = rho.powf(1.0 / n as f64);
    let lambda = dominant_root(&RootKind::Lambda, p)?.value;
    let error = (rate - lambda).abs();
    Ok(Finiteness {
        block: block.to_vec(),
        product,
        rho,
        rate,
        lambda,
        error,
        pass: error < 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsrReport {
    pub depth: usize,
    pub upper_exhaustive: Option<Exhaustive>,
    #[serde(serialize_with = "as_string")]
    pub upper_po_count: BigUint,
    pub upper_po: f64,
    pub lower_periodic: Option<Finiteness>,
    pub lambda_ref: f64,
}

/// Bounds at depth `n`; the exhaustive search runs only when `exhaustive` is set.
pub fn jsr_report(
    p: &Params,
    n: usize,
    exhaustive: bool,
    budget: u128,
    block: Option<&[Word]>,
) -> Result<JsrReport> {
    let upper_exhaustive = if exhaustive {
        Some(jsr_upper_exhaustive(p, n, budget)?)
    } else {
        None
    };
    let (upper_po_count, upper_po) = jsr_upper_po(p, n)?;
    let lower_periodic = block.map(|b| finiteness_check(p, b)).transpose()?;
    let lambda_ref = dominant_root(&RootKind::Lambda, p)?.value;
    Ok(JsrReport {
        depth: n,
        upper_exhaustive,
        upper_po_count,
        upper_po,
        lower_periodic,
        lambda_ref,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_word;

    fn p(b: usize, m: usize) -> Params {
        Params::new(b, m).unwrap()
    }

    #[test]
    fn small_depths() {
        let p32 = p(3, 2);
        let one = jsr_upper_exhaustive(&p32, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(one.max_norm, BigUint::from(8u32));
        assert_eq!(one.maximizer_count, 9);
        let two = jsr_upper_exhaustive(&p32, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(two.max_norm, BigUint::from(22u32));
        assert!((two.value - 22f64.sqrt()).abs() < 1e-12);
        let three = jsr_upper_exhaustive(&p32, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(three.max_norm, BigUint::from(60u32));
    }

    #[test]
    fn po_shortcut() {
        let (c, _) = jsr_upper_po(&p(3, 2), 6).unwrap();
        assert_eq!(c, BigUint::from(1224u32));
    }

    #[test]
    fn budget_guard() {
        let err = jsr_upper_exhaustive(&p(3, 2), 8, DEFAULT_BUDGET).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                needed: 43_046_721,
                budget: DEFAULT_BUDGET
            }
        );
    }

    #[test]
    fn m1_is_scalar() {
        let e = jsr_upper_exhaustive(&p(3, 1), 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(e.max_norm, BigUint::from(16u32));
        assert_eq!(e.maximizer_count, 81);
    }

    #[test]
    fn finiteness_examples() {
        let p32 = p(3, 2);
        let w = |s: &str| parse_word(s, &p32).unwrap();
        let f = finiteness_check(&p32, &[w("00")]).unwrap();
        assert!(f.pass, "{f:?}");
        let f = finiteness_check(&p32, &[w("01"), w("10")]).unwrap();
        assert_eq!(
            f.product,
            IntMatrix::from_rows(&[vec![2, 2, 2], vec![2, 3, 3], vec![2, 3, 3]])
        );
        assert!(f.pass);
        assert!((f.rho - (4.0 + 2.0 * 3f64.sqrt())).abs() < 1e-9);
        let err = finiteness_check(&p32, &[w("01"), w("11")]).unwrap_err();
        assert_eq!(err, Error::NotProgressivelyOverlapping(2));
    }
}
