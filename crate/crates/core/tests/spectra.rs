mod common;

use common::params;
use num_bigint::BigInt;
use proptest::prelude::*;
use survivor_core::counting::ln_big;
use survivor_core::{
    b_power_closed, dominant_root, exact_series, lambda_pq, spectral_radius, struct_matrices,
    HoleSchedule, IntMatrix, RootKind, SeedStream,
};

#[test]
fn root_grid() {
    for b in 3..=5usize {
        for m in 2..=6usize {
            let p = params(b, m);
            let lam = dominant_root(&RootKind::Lambda, &p).unwrap();
            let eta = dominant_root(&RootKind::Eta, &p).unwrap();
            let bf = b as f64;
            assert!(bf - 1.0 < eta.value && eta.value < lam.value && lam.value < bf);
            for r in [&lam, &eta] {
                assert!(r.pisot, "b={b} m={m}");
                assert!(r.conjugate_moduli.iter().all(|&x| x < 1.0 - 1e-6));
                assert!(r.residual < 1e-10, "b={b} m={m} residual {}", r.residual);
                assert_eq!(r.conjugate_moduli.len(), m - 1);
            }
            if m >= 3 {
                let g = dominant_root(&RootKind::Gamma, &p).unwrap();
                assert!(eta.value < g.value && g.value < lam.value);
                assert!(g.residual < 1e-10);
            } else {
                assert!(dominant_root(&RootKind::Gamma, &p).is_err());
            }
        }
    }
}

#[test]
fn quadratic_closed_forms() {
    for b in 3..=9usize {
        let p = params(b, 2);
        let c = (b - 1) as f64;
        let lam = (c + (c * c + 4.0 * c).sqrt()) / 2.0;
        let bf = b as f64;
        let eta = (bf + (bf * bf - 4.0).sqrt()) / 2.0;
        assert!((dominant_root(&RootKind::Lambda, &p).unwrap().value - lam).abs() < 1e-12);
        assert!((dominant_root(&RootKind::Eta, &p).unwrap().value - eta).abs() < 1e-12);
    }
}

#[test]
fn b_power_matches_direct_powering() {
    for b in [3, 4] {
        for m in [2, 3, 4] {
            let p = params(b, m);
            let (_, bm) = struct_matrices(&p).unwrap();
            let mut direct = IntMatrix::identity(m);
            for k in 0..=30u64 {
                assert_eq!(b_power_closed(k, &p).unwrap(), direct, "b={b} m={m} k={k}");
                direct = direct.mul(&bm);
            }
        }
    }
}

#[test]
fn mixed_products_are_primitive() {
    for b in [3, 4] {
        for m in [2, 3, 4] {
            let p = params(b, m);
            for pp in 1..=4 {
                for q in 1..=4 {
                    let l = lambda_pq(pp, q, &p).unwrap();
                    assert!(l.matrix.is_nonnegative());
                    assert!(l.primitive_power as usize <= 2 * l.matrix.primitivity_cap());
                }
            }
        }
    }
}

#[test]
fn lambda_pq_band_and_value() {
    let p = params(3, 2);
    let l = lambda_pq(1, 1, &p).unwrap();
    let expected = (7.0 + 57f64.sqrt()) / 2.0;
    assert!((l.root.value - expected).abs() < 1e-12);
    let lam = dominant_root(&RootKind::Lambda, &p).unwrap().value;
    let eta = dominant_root(&RootKind::Eta, &p).unwrap().value;
    assert!(eta * eta <= l.root.value && l.root.value <= lam * lam);
}

#[test]
fn lambda_pq_is_the_period_growth_of_lpq() {
    for (b, m, pp, q) in [(3, 2, 1, 1), (3, 2, 2, 3), (4, 3, 1, 2), (3, 4, 3, 1)] {
        let p = params(b, m);
        let s = HoleSchedule::lpq(p, pp, q, SeedStream::Rng(12)).unwrap();
        let period = (pp + q) as usize;
        let k = 60 * period;
        let series = exact_series(&s, k + period);
        let growth = ln_big(&series[k + period]) - ln_big(&series[k]);
        let l = lambda_pq(pp, q, &p).unwrap();
        assert!((growth - l.root.value.ln()).abs() < 1e-8, "{s}: {growth}");
    }
}

#[test]
fn normalized_rates_approach_the_average() {
    let p = params(3, 2);
    let lam = dominant_root(&RootKind::Lambda, &p).unwrap().value.ln();
    let eta = dominant_root(&RootKind::Eta, &p).unwrap().value.ln();
    let target = (lam + eta) / (2.0 * 3f64.ln());
    assert!((target - 0.89544).abs() < 1e-5);
    let errors: Vec<f64> = (1..=6)
        .map(|n| (lambda_pq(n, n, &p).unwrap().normalized - target).abs())
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

fn spectral_radius_oracle(rows: &[Vec<i64>]) -> f64 {
    // plain power iteration on squared powers, independent of the library path
    let n = rows.len();
    let mut x = vec![1.0f64; n];
    let mut est = 0.0;
    for _ in 0..5000 {
        let y: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| rows[i][j] as f64 * x[j]).sum())
            .collect();
        let norm = y.iter().cloned().fold(0.0, f64::max);
        if norm == 0.0 {
            return 0.0;
        }
        est = norm / x.iter().cloned().fold(0.0, f64::max);
        x = y.iter().map(|v| v / norm).collect();
    }
    est
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_radius_of_positive_matrices(
        rows in (2usize..=5).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(1i64..6, n), n))
    ) {
        let m = IntMatrix::from_rows(&rows);
        let rho = spectral_radius(&m).unwrap();
        let oracle = spectral_radius_oracle(&rows);
        prop_assert!((rho - oracle).abs() < 1e-9 * oracle);
        // ρ is a root of the characteristic polynomial
        let cp = m.charpoly();
        prop_assert!(cp.eval(rho).abs() <= 1e-9 * cp.scale_at(rho));
        prop_assert_eq!(cp.coeffs().last(), Some(&BigInt::from(1)));
    }
}
