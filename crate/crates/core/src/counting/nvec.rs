use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::model::Params;
use crate::schedules::PatternClass;

/// `N_k = (|Σ_{k+m}|, …, |Σ_{k+1}|)`, longest first, kept inside the cone
/// `(b-1)·v ≤ v' ≤ b·v` between consecutive counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NVector {
    k: usize,
    entries: Vec<BigUint>,
}

fn check_cone(b: usize, entries: &[BigUint]) -> Result<()> {
    for (i, pair) in entries.windows(2).enumerate() {
        let (longer, shorter) = (&pair[0], &pair[1]);
        if *longer < shorter * (b - 1) || *longer > shorter * b {
            return Err(Error::ConeViolation(format!(
                "entries {i} and {} are {longer} and {shorter}",
                i + 1
            )));
        }
    }
    Ok(())
}

impl NVector {
    /// Builds `N_k` from explicit entries, longest count first.
    pub fn new(p: &Params, k: usize, entries: Vec<BigUint>) -> Result<Self> {
        if entries.len() != p.m() {
            return Err(Error::InvalidParams(format!(
                "N-vector needs m = {} entries, got {}",
                p.m(),
                entries.len()
            )));
        }
        check_cone(p.b(), &entries)?;
        Ok(NVector { k, entries })
    }

    /// `N_k` read off a count series indexed by length.
    pub fn from_series(p: &Params, k: usize, series: &[BigUint]) -> Result<Self> {
        let m = p.m();
        if series.len() <= k + m {
            return Err(Error::InvalidParams(format!("series too short for N_{k}")));
        }
        let entries = (1..=m).rev().map(|i| series[k + i].clone()).collect();
        Self::new(p, k, entries)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    /// `|Σ_{k+m}|`.
    pub fn head(&self) -> &BigUint {
        &self.entries[0]
    }
}

/// `N_{k} = N_{k-1}·A` at a PO position, `N_{k-1}·B` at a TD position.
pub fn nvec_step(p: &Params, n: &NVector, class: PatternClass) -> Result<NVector> {
    let b = p.b();
    let e = &n.entries;
    let head = match class {
        PatternClass::ProgressivelyOverlapping => e.iter().sum::<BigUint>() * (b - 1),
        PatternClass::TotallyDistinct => {
            let plus = &e[0] * b;
            let minus = &e[e.len() - 1];
            if plus < *minus {
                return Err(Error::ConeViolation("TD step would turn negative".into()));
            }
            plus - minus
        }
        PatternClass::Neither => return Err(Error::NeitherClass),
    };
    let mut entries = Vec::with_capacity(e.len());
    entries.push(head);
    entries.extend(e[..e.len() - 1].iter().cloned());
    // Count vectors always stay in the cone; for m >= 3 an arbitrary cone
    // vector need not (b = 3: (4, 2, 1)·A has head 14 > 3·4).
    check_cone(b, &entries[..2.min(entries.len())])?;
    Ok(NVector {
        k: n.k + 1,
        entries,
    })
}
