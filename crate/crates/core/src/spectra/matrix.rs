use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::poly::Poly;

/// Dense square matrix of big integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            data: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// From rows; panics if they are not square.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        IntMatrix {
            n,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: impl Into<BigInt>) {
        self.data[i * self.n + j] = v.into();
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[k * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, mut k: u64) -> IntMatrix {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).to_f64().unwrap_or(f64::INFINITY))
                    .collect()
            })
            .collect()
    }

    /// Smallest power `2^j` with an all-positive support, if one exists.
    ///
    /// A nonnegative matrix is primitive iff `M^k > 0` for some `k`, and then
    /// for every `k >= (n-1)^2 + 1` (Wielandt), so squaring the support until
    /// the exponent passes that bound decides primitivity.
    pub fn primitive_power(&self) -> Option<u64> {
        let n = self.n;
        let cap = ((n - 1) * (n - 1) + 1) as u64;
        let mut support: Vec<bool> = self.data.iter().map(|x| x.is_positive()).collect();
        let mut power = 1u64;
        loop {
            if support.iter().all(|&x| x) {
                return Some(power);
            }
            if power >= cap {
                return None;
            }
            let mut next = vec![false; n * n];
            for i in 0..n {
                for k in 0..n {
                    if support[i * n + k] {
                        for j in 0..n {
                            next[i * n + j] |= support[k * n + j];
                        }
                    }
                }
            }
            support = next;
            power *= 2;
        }
    }

    /// Wielandt bound `(n-1)^2 + 1` on the primitivity exponent.
    pub fn primitivity_cap(&self) -> usize {
        (self.n - 1) * (self.n - 1) + 1
    }

    /// `det(xI - M)` by the division-free Berkowitz recurrence.
    pub fn charpoly(&self) -> Poly {
        let n = self.n;
        if n == 0 {
            return Poly::from_i64(&[1]);
        }
        // coefficient vectors are kept leading term first
        let mut poly = vec![BigInt::one(), -self.get(n - 1, n - 1).clone()];
        for k in (0..n - 1).rev() {
            let size = n - k;
            let a11 = self.get(k, k);
            let row: Vec<&BigInt> = (k + 1..n).map(|j| self.get(k, j)).collect();
            // t = (1, -a11, -R C, -R A1 C, …)
            let mut t = Vec::with_capacity(size + 1);
            t.push(BigInt::one());
            t.push(-a11.clone());
            let mut col: Vec<BigInt> = (k + 1..n).map(|i| self.get(i, k).clone()).collect();
            for step in 0..size - 1 {
                let dot: BigInt = row.iter().zip(&col).map(|(r, c)| *r * c).sum();
                t.push(-dot);
                if step + 1 < size - 1 {
                    col = (k + 1..n)
                        .map(|i| (k + 1..n).zip(&col).map(|(j, c)| self.get(i, j) * c).sum())
                        .collect();
                }
            }
            let next: Vec<BigInt> = (0..=size)
                .map(|i| (0..size.min(i + 1)).map(|j| &t[i - j] * &poly[j]).sum())
                .collect();
            poly = next;
        }
        poly.reverse();
        Poly::new(poly)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                let r: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl Serialize for IntMatrix {
    /// Rows of decimal strings.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        rows.serialize(s)
    }
}
