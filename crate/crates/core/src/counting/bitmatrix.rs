use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{Params, Word};

/// The 0/1 transfer matrix `A_F` on de Bruijn states for a forbidden set `F`.
///
/// Stored as the implicit de Bruijn successor structure plus the list of
/// removed edges `(source, target)`, one per distinct forbidden word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    params: Params,
    removed: Vec<(usize, usize)>,
}

impl BitMatrix {
    pub fn dim(&self) -> usize {
        self.params.states()
    }

    pub fn removed(&self) -> &[(usize, usize)] {
        &self.removed
    }

    fn is_successor(&self, u: usize, v: usize) -> bool {
        let stride = self.params.states() / self.params.b();
        u % stride == v / self.params.b()
    }

    pub fn get(&self, u: usize, v: usize) -> bool {
        self.is_successor(u, v) && self.removed.binary_search(&(u, v)).is_err()
    }

    /// `x · A`, visiting each state's `b` successors explicitly.
    pub fn left_mul(&self, x: &[BigUint]) -> Vec<BigUint> {
        let b = self.params.b();
        let stride = self.params.states() / b;
        let mut out = vec![BigUint::zero(); x.len()];
        for (u, xu) in x.iter().enumerate() {
            if xu.is_zero() {
                continue;
            }
            let base = (u % stride) * b;
            for v in base..base + b {
                if self.removed.binary_search(&(u, v)).is_err() {
                    out[v] += xu;
                }
            }
        }
        out
    }

    /// Dense rows, for display and small cross-checks.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let n = self.dim();
        (0..n)
            .map(|u| (0..n).map(|v| self.get(u, v) as u8).collect())
            .collect()
    }

    /// Number of one entries, `b^m` minus removed edges.
    pub fn ones(&self) -> usize {
        self.params.words() - self.removed.len()
    }
}

/// `A_F` for forbidden words `F` of length `m >= 2`.
pub fn adjacency_matrix(forbidden: &[Word], p: &Params) -> Result<BitMatrix> {
    if p.m() < 2 {
        return Err(Error::InvalidParams(
            "with m = 1 there is a single state; the transfer operator is the scalar b - |F|"
                .into(),
        ));
    }
    let mut removed = Vec::with_capacity(forbidden.len());
    for w in forbidden {
        if w.len() != p.m() {
            return Err(Error::WrongWordLength {
                expected: p.m(),
                got: w.len(),
            });
        }
        let code = w.index(p.b());
        removed.push((code / p.b(), code % p.states()));
    }
    removed.sort_unstable();
    removed.dedup();
    Ok(BitMatrix {
        params: *p,
        removed,
    })
}

/// `‖A_{w_1} ⋯ A_{w_n}‖`, the entrywise sum, by pushing the all-ones row vector
/// through each factor.
pub fn product_norm(blocks: &[Word], p: &Params) -> Result<BigUint> {
    if blocks.is_empty() {
        return Err(Error::InvalidParams(
            "product needs at least one block".into(),
        ));
    }
    if p.m() == 1 {
        for w in blocks {
            if w.len() != 1 {
                return Err(Error::WrongWordLength {
                    expected: 1,
                    got: w.len(),
                });
            }
        }
        return Ok(num_traits::pow(BigUint::from(p.b() - 1), blocks.len()));
    }
    let mut x = vec![BigUint::one(); p.states()];
    for w in blocks {
        x = adjacency_matrix(std::slice::from_ref(w), p)?.left_mul(&x);
    }
    Ok(x.iter().sum())
}
