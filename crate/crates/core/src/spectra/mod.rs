//! Dominant roots of the PO/TD/mixed polynomials, the matrices `A` and `B`,
//! and spectral radii of their products.

mod matrix;
mod poly;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Params;

pub use matrix::IntMatrix;
pub use poly::{bisect, Poly};

/// Largest conjugate modulus accepted for a Pisot certificate.
pub const PISOT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootResult {
    pub value: f64,
    /// Adjacent doubles (or a single double) around the root; the polynomial
    /// changes sign across it.
    pub bracket: (f64, f64),
    /// `|p(value)|`, evaluated exactly and rounded.
    pub residual: f64,
    /// `residual / Σ |c_i| value^i`.
    pub residual_scaled: f64,
    /// Moduli of the other roots, largest first.
    pub conjugate_moduli: Vec<f64>,
    pub pisot: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RootKind {
    /// `x^m - (b-1)(x^{m-1} + … + 1)`, growth rate of PO schedules.
    Lambda,
    /// `x^m - b x^{m-1} + 1`, growth rate of TD schedules.
    Eta,
    /// `x^m - b x^{m-1} + x - (b-1)`, growth rate of the mixed pattern (`m >= 3`).
    Gamma,
    /// Monic integer polynomial (constant term first) with a sign change on `bracket`.
    Custom { poly: Poly, bracket: (f64, f64) },
}

pub fn lambda_poly(p: &Params) -> Poly {
    let (b, m) = (p.b() as i64, p.m());
    let mut c = vec![-(b - 1); m + 1];
    c[m] = 1;
    Poly::from_i64(&c)
}

pub fn eta_poly(p: &Params) -> Poly {
    let (b, m) = (p.b() as i64, p.m());
    let mut c = vec![0i64; m + 1];
    c[m] = 1;
    c[m - 1] -= b;
    c[0] += 1;
    Poly::from_i64(&c)
}

/// Requires `m >= 3`; for smaller `m` the pattern does not exist.
pub fn gamma_poly(p: &Params) -> Result<Poly> {
    let (b, m) = (p.b() as i64, p.m());
    if m < 3 {
        return Err(Error::InvalidParams("gamma is defined for m >= 3".into()));
    }
    let mut c = vec![0i64; m + 1];
    c[m] = 1;
    c[m - 1] = -b;
    c[1] = 1;
    c[0] = -(b - 1);
    Ok(Poly::from_i64(&c))
}

/// Moduli of all roots except the one of largest modulus, largest first.
pub fn pisot_conjugates(poly: &Poly) -> Result<Vec<f64>> {
    if poly.degree() < 1 {
        return Err(Error::InvalidParams("polynomial needs degree >= 1".into()));
    }
    let roots = poly.roots()?;
    let mut moduli: Vec<f64> = roots.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli.remove(0);
    Ok(moduli)
}

fn root_result(poly: &Poly, value: f64, bracket: (f64, f64)) -> Result<RootResult> {
    let residual = poly.eval(value).abs();
    let scale = poly.scale_at(value);
    let conjugate_moduli = if poly.degree() >= 2 {
        pisot_conjugates(poly)?
    } else {
        Vec::new()
    };
    let pisot = value > 1.0 && conjugate_moduli.iter().all(|&r| r < 1.0 - PISOT_MARGIN);
    Ok(RootResult {
        value,
        bracket,
        residual,
        residual_scaled: residual / scale.max(f64::MIN_POSITIVE),
        conjugate_moduli,
        pisot,
    })
}

/// Dominant real root by bisection; `λ`, `η`, `γ` are bracketed by `[b-1, b]`.
pub fn dominant_root(kind: &RootKind, p: &Params) -> Result<RootResult> {
    let b = p.b() as f64;
    let (poly, lo, hi) = match kind {
        RootKind::Lambda => (lambda_poly(p), b - 1.0, b),
        RootKind::Eta => (eta_poly(p), b - 1.0, b),
        RootKind::Gamma => (gamma_poly(p)?, b - 1.0, b),
        RootKind::Custom { poly, bracket } => {
            if !poly.is_monic() {
                return Err(Error::InvalidParams(
                    "custom polynomial must be monic".into(),
                ));
            }
            (poly.clone(), bracket.0, bracket.1)
        }
    };
    let (value, bracket) = bisect(&poly, lo, hi)?;
    root_result(&poly, value, bracket)
}

/// The matrices `A` (PO step) and `B` (TD step) of size `m`.
pub fn struct_matrices(p: &Params) -> Result<(IntMatrix, IntMatrix)> {
    let (b, m) = (p.b() as i64, p.m());
    if m < 2 {
        return Err(Error::InvalidParams(
            "A and B are defined for m >= 2".into(),
        ));
    }
    let mut a = IntMatrix::zeros(m);
    let mut bm = IntMatrix::zeros(m);
    for i in 0..m {
        a.set(i, 0, b - 1);
        if i + 1 < m {
            a.set(i, i + 1, 1);
            bm.set(i, i + 1, 1);
        }
    }
    bm.set(0, 0, b);
    bm.set(m - 1, 0, -1);
    Ok((a, bm))
}

/// `v_n` for `n = -2m ..= n_max`, stored at offset `2m`.
fn v_sequence(p: &Params, n_max: i64) -> Vec<BigInt> {
    let (b, m) = (p.b() as i64, p.m() as i64);
    let offset = 2 * m;
    let mut v = vec![BigInt::zero(); (offset + n_max.max(0) + 1) as usize];
    v[(offset - m) as usize] = -BigInt::one();
    for n in 0..=n_max {
        let i = (offset + n) as usize;
        v[i] = &v[i - 1] * b - &v[i - m as usize];
    }
    v
}

/// `v_0, v_1, …, v_n` of the recursion `v_n = b v_{n-1} - v_{n-m}`.
pub fn v_values(p: &Params, n: usize) -> Vec<BigInt> {
    let offset = 2 * p.m();
    v_sequence(p, n as i64)[offset..].to_vec()
}

/// `B^k` from the `v` sequence: row 1 is `v_{k-j+1}`, row `i > 1` is `-v_{k+i-j-m}`.
pub fn b_power_closed(k: u64, p: &Params) -> Result<IntMatrix> {
    let m = p.m();
    if m < 2 {
        return Err(Error::InvalidParams("B is defined for m >= 2".into()));
    }
    if k == 0 {
        return Ok(IntMatrix::identity(m));
    }
    let k = k as i64;
    let offset = 2 * m as i64;
    let v = v_sequence(p, k);
    let at = |n: i64| v[(offset + n) as usize].clone();
    let mut out = IntMatrix::zeros(m);
    for j in 1..=m as i64 {
        out.set(0, j as usize - 1, at(k - j + 1));
        for i in 2..=m as i64 {
            out.set(i as usize - 1, j as usize - 1, -at(k + i - j - m as i64));
        }
    }
    Ok(out)
}

const POWER_CAP: usize = 200_000;

/// Largest dimension whose power-iteration estimate is polished on the
/// characteristic polynomial.
const POLISH_DIM: usize = 64;

/// Spectral radius of a nonnegative integer matrix by power iteration.
///
/// Stops once the Collatz–Wielandt bounds `min y_i/x_i <= ρ <= max y_i/x_i`
/// agree to `1e-12` relative, or, when the iterate has zero entries, once
/// successive estimates do. Up to dimension 64 the estimate is then refined
/// to adjacent doubles by bisection on the characteristic polynomial when it
/// changes sign nearby (always the case for a simple Perron root). For
/// dimension `<= 4` the result is cross-checked against the largest root
/// modulus of the characteristic polynomial.
pub fn spectral_radius(m: &IntMatrix) -> Result<f64> {
    if !m.is_nonnegative() {
        return Err(Error::NegativeEntry);
    }
    let rows = m.to_f64_rows();
    let n = m.dim();
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut prev = f64::NAN;
    let mut estimate = f64::NAN;
    let mut converged = false;
    for _ in 0..POWER_CAP {
        for (yi, row) in y.iter_mut().zip(&rows) {
            *yi = row.iter().zip(&x).map(|(a, b)| a * b).sum();
        }
        let norm: f64 = y.iter().sum();
        if norm == 0.0 {
            estimate = 0.0;
            converged = true;
            break;
        }
        estimate = norm;
        let (mut lo, mut hi, mut positive) = (f64::INFINITY, 0.0f64, true);
        for (yi, xi) in y.iter().zip(&x) {
            if *xi > 0.0 {
                lo = lo.min(yi / xi);
                hi = hi.max(yi / xi);
            } else {
                positive = false;
            }
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        if positive && hi - lo <= 1e-12 * hi {
            estimate = 0.5 * (lo + hi);
            converged = true;
            break;
        }
        if !positive && (estimate - prev).abs() <= 1e-14 * estimate {
            converged = true;
            break;
        }
        prev = estimate;
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "power iteration",
            iterations: POWER_CAP,
            last: estimate,
        });
    }
    if n > POLISH_DIM || estimate == 0.0 {
        return Ok(estimate);
    }
    let charpoly = m.charpoly();
    let width = 1e-9 * estimate;
    if let Ok((value, _)) = bisect(&charpoly, estimate - width, estimate + width) {
        estimate = value;
    }
    if n <= 4 {
        // The estimate must be a root of the characteristic polynomial, and no
        // root may be larger. Root moduli from simultaneous iteration are only
        // accurate to about eps^(1/k) at a k-fold root, hence the loose margin.
        let residual = charpoly.eval(estimate).abs() / charpoly.scale_at(estimate).max(1.0);
        let max = charpoly
            .roots()?
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if residual > 1e-9 || max > estimate * (1.0 + 1e-4) + 1e-9 {
            return Err(Error::CrossCheck(format!(
                "power iteration gives {estimate}, characteristic roots reach {max} (residual {residual:e})"
            )));
        }
    }
    Ok(estimate)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaPq {
    pub p: u64,
    pub q: u64,
    pub root: RootResult,
    /// `log λ_{p,q} / ((p+q) log b)`.
    pub normalized: f64,
    /// Smallest power of two at which `A^p B^q` is entrywise positive.
    pub primitive_power: u64,
    pub matrix: IntMatrix,
}

/// `λ_{p,q} = ρ(A^p B^q)` after exact nonnegativity and primitivity checks.
pub fn lambda_pq(p: u64, q: u64, params: &Params) -> Result<LambdaPq> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidParams("p and q must be positive".into()));
    }
    let (a, _) = struct_matrices(params)?;
    let product = a.pow(p).mul(&b_power_closed(q, params)?);
    if !product.is_nonnegative() {
        return Err(Error::NegativeEntry);
    }
    let primitive_power = product.primitive_power().ok_or(Error::NotPrimitive {
        cap: product.primitivity_cap(),
    })?;
    let estimate = spectral_radius(&product)?;
    // The Perron root is simple, so the characteristic polynomial changes sign around it.
    let charpoly = product.charpoly();
    let width = 1e-9 * estimate;
    let (value, bracket) = bisect(&charpoly, estimate - width, estimate + width)?;
    let root = root_result(&charpoly, value, bracket)?;
    let normalized = value.ln() / ((p + q) as f64 * (params.b() as f64).ln());
    Ok(LambdaPq {
        p,
        q,
        root,
        normalized,
        primitive_power,
        matrix: product,
    })
}
