//! Integer polynomials: exact sign evaluation at doubles and complex roots.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Integer polynomial, coefficients from the constant term upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

/// Splits a finite double into `mant · 2^exp` with an odd or zero mantissa.
fn decompose(x: f64) -> (i64, i64) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (mut mant, mut exp) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1i64 << 52), raw_exp - 1075)
    };
    while mant & 1 == 0 {
        mant >>= 1;
        exp += 1;
    }
    (sign * mant, exp)
}

/// `n / 2^shift` as a double, keeping only the leading 64 bits of `n`.
fn scaled_to_f64(n: &BigInt, shift: i64) -> f64 {
    let bits = n.bits() as i64;
    if bits <= 64 {
        return n.to_f64().unwrap_or(f64::NAN) * (2.0f64).powi(-(shift as i32));
    }
    let drop = bits - 64;
    let top = (n >> drop as usize).to_f64().unwrap_or(f64::NAN);
    top * (2.0f64).powf((drop - shift) as f64)
}

impl Poly {
    /// From coefficients, constant term first; trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// From coefficients, leading term first.
    pub fn from_descending(coeffs: &[i64]) -> Self {
        let mut c: Vec<i64> = coeffs.to_vec();
        c.reverse();
        Self::from_i64(&c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == BigInt::from(1))
    }

    /// Exact value at a double as `(numerator, shift)` with value `numerator / 2^shift`.
    fn eval_exact(&self, x: f64) -> (BigInt, i64) {
        let (mant, exp) = decompose(x);
        let n = self.degree() as i64;
        let mant = BigInt::from(mant);
        if exp >= 0 {
            let x = mant << exp as usize;
            let v = self
                .coeffs
                .iter()
                .rev()
                .fold(BigInt::zero(), |acc, c| acc * &x + c);
            return (v, 0);
        }
        // 2^{e·n} p(x) = Σ c_i mant^i 2^{e(n-i)} with e = -exp, by Horner from the top
        let e = -exp;
        let mut acc = BigInt::zero();
        for (j, c) in self.coeffs.iter().rev().enumerate() {
            acc = acc * &mant + (c << (e * j as i64) as usize);
        }
        (acc, e * n)
    }

    pub fn sign_at(&self, x: f64) -> Ordering {
        let (v, _) = self.eval_exact(x);
        v.cmp(&BigInt::zero())
    }

    /// `p(x)` rounded to a double from the exact value.
    pub fn eval(&self, x: f64) -> f64 {
        let (v, shift) = self.eval_exact(x);
        scaled_to_f64(&v, shift)
    }

    /// `Σ |c_i| |x|^i`, the natural magnitude of the terms at `x`.
    pub fn scale_at(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, c| {
            acc * ax + c.abs().to_f64().unwrap_or(f64::INFINITY)
        })
    }

    fn eval_complex(&self, z: Complex64) -> (Complex64, f64) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        let az = z.norm();
        for c in self.coeffs.iter().rev() {
            let c = c.to_f64().unwrap_or(f64::NAN);
            acc = acc * z + c;
            scale = scale * az + c.abs();
        }
        (acc, scale)
    }

    /// All complex roots by simultaneous (Durand–Kerner) iteration.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if !self.is_monic() {
            return Err(Error::InvalidParams(
                "root finder needs a monic polynomial".into(),
            ));
        }
        let n = self.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        let bound = 1.0
            + self.coeffs[..n]
                .iter()
                .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max);
        let seed = Complex64::new(0.4, 0.9);
        let mut z: Vec<Complex64> = (0..n)
            .map(|i| seed.powu(i as u32) * (bound / 2.0))
            .collect();
        const CAP: usize = 20_000;
        let mut last_step = f64::INFINITY;
        for _ in 0..CAP {
            let mut worst = 0.0f64;
            for i in 0..n {
                let (num, _) = self.eval_complex(z[i]);
                let mut den = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        den *= z[i] - z[j];
                    }
                }
                if den.norm() == 0.0 {
                    z[i] += Complex64::new(1e-8, 1e-8);
                    worst = f64::INFINITY;
                    continue;
                }
                let delta = num / den;
                z[i] -= delta;
                worst = worst.max(delta.norm() / z[i].norm().max(1.0));
            }
            last_step = worst;
            if worst < 1e-15 {
                break;
            }
        }
        for r in &z {
            let (v, scale) = self.eval_complex(*r);
            if v.norm() > 1e-10 * scale.max(1.0) {
                return Err(Error::NonConvergence {
                    what: "complex root iteration",
                    iterations: CAP,
                    last: last_step,
                });
            }
        }
        Ok(z)
    }
}

/// Bisection for a root of `p` on `[lo, hi]` down to adjacent doubles.
///
/// Returns the endpoint with the smaller exact `|p|` and the final bracket.
pub fn bisect(p: &Poly, lo: f64, hi: f64) -> Result<(f64, (f64, f64))> {
    let (mut lo, mut hi) = (lo, hi);
    let s_lo = p.sign_at(lo);
    let s_hi = p.sign_at(hi);
    if s_lo == Ordering::Equal {
        return Ok((lo, (lo, lo)));
    }
    if s_hi == Ordering::Equal {
        return Ok((hi, (hi, hi)));
    }
    if s_lo == s_hi {
        return Err(Error::NoSignChange { lo, hi });
    }
    loop {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        match p.sign_at(mid) {
            Ordering::Equal => return Ok((mid, (mid, mid))),
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    let value = if p.eval(lo).abs() <= p.eval(hi).abs() {
        lo
    } else {
        hi
    };
    Ok((value, (lo, hi)))
}
