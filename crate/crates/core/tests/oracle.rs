mod common;

use common::{brute_counts, params, random_explicit, random_word};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use survivor_core::{
    adjacency_matrix, build_pq_schedule, count_exact, count_from_prefix, exact_series,
    product_norm, GapMode, HoleSchedule, Params, Rational, SeedStream, Word,
};

fn assert_matches_brute(s: &HoleSchedule, k_max: usize) {
    let brute = brute_counts(s, k_max);
    let fast = exact_series(s, k_max);
    for k in 0..=k_max {
        assert_eq!(fast[k], BigUint::from(brute[k]), "{s} at k={k}");
    }
}

#[test]
fn random_single_and_double_holes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (b, m) in [(2, 2), (3, 2), (3, 3), (4, 2), (2, 4)] {
        let p = params(b, m);
        for _ in 0..6 {
            assert_matches_brute(&random_explicit(&mut rng, &p, 10, 1), 9);
            assert_matches_brute(&random_explicit(&mut rng, &p, 10, 2), 9);
        }
    }
}

#[test]
fn structured_generators() {
    for (b, m) in [(3, 2), (3, 3), (4, 3), (5, 2)] {
        let p = params(b, m);
        let seed = SeedStream::Rng(11);
        let mut all = vec![
            HoleSchedule::progressive(p, seed.clone()).unwrap(),
            HoleSchedule::totally_distinct(p, seed.clone()).unwrap(),
            HoleSchedule::lpq(p, 2, 1, seed.clone()).unwrap(),
            HoleSchedule::family(
                p,
                build_pq_schedule(Rational::new(1, 4), Rational::new(1, 2), 1).unwrap(),
                GapMode::MGap,
                seed.clone(),
            )
            .unwrap(),
        ];
        if m >= 3 {
            all.push(HoleSchedule::mixed(p, seed.clone()).unwrap());
        }
        for s in &all {
            assert_matches_brute(s, 8);
        }
    }
}

#[test]
fn multi_part_schedules() {
    let p = params(3, 3);
    let s = HoleSchedule::multi(vec![
        HoleSchedule::progressive(p, SeedStream::Rng(1)).unwrap(),
        HoleSchedule::totally_distinct(p, SeedStream::Rng(2)).unwrap(),
        HoleSchedule::progressive(p, SeedStream::zeros()).unwrap(),
    ])
    .unwrap();
    assert_matches_brute(&s, 9);
}

#[test]
fn single_digit_holes() {
    let p = params(3, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        assert_matches_brute(&random_explicit(&mut rng, &p, 8, 1), 8);
        assert_matches_brute(&random_explicit(&mut rng, &p, 8, 2), 8);
    }
}

/// `‖A_{ω^0} ⋯ A_{ω^{k-m}}‖` through explicit matrices.
fn norm_via_matrices(s: &HoleSchedule, k: usize) -> BigUint {
    let p = s.params();
    let blocks: Vec<Word> = (0..=k - p.m()).map(|i| s.single_hole(i).unwrap()).collect();
    product_norm(&blocks, p).unwrap()
}

#[test]
fn product_norm_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (b, m) in [(3, 2), (3, 3), (4, 2), (2, 3)] {
        let p = params(b, m);
        for _ in 0..4 {
            let s = random_explicit(&mut rng, &p, 40, 1);
            for k in (m..=12).chain([50, 100]) {
                assert_eq!(norm_via_matrices(&s, k), count_exact(&s, k), "{s} k={k}");
            }
        }
    }
}

#[test]
fn dense_matrix_agrees_with_left_mul() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = params(3, 3);
    for _ in 0..10 {
        let w = random_word(&mut rng, &p);
        let a = adjacency_matrix(std::slice::from_ref(&w), &p).unwrap();
        let dense = a.to_dense();
        let x: Vec<BigUint> = (0..p.states())
            .map(|i| BigUint::from(i as u32 + 1))
            .collect();
        let via_dense: Vec<BigUint> = (0..p.states())
            .map(|v| {
                (0..p.states())
                    .filter(|&u| dense[u][v] == 1)
                    .map(|u| x[u].clone())
                    .sum()
            })
            .collect();
        assert_eq!(a.left_mul(&x), via_dense);
        assert_eq!(a.ones(), p.words() - 1);
    }
}

fn schedule_strategy() -> impl Strategy<Value = (Params, HoleSchedule)> {
    (2usize..=4, 1usize..=3, any::<u64>(), 1usize..=2).prop_map(|(b, m, seed, holes)| {
        let p = params(b, m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_explicit(&mut rng, &p, 12, holes);
        (p, s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn one_step_growth_bounds((p, s) in schedule_strategy()) {
        let series = exact_series(&s, 30);
        let b = BigUint::from(p.b());
        for k in 0..30 {
            prop_assert!(series[k + 1] <= &series[k] * &b);
            if s.is_single() && k + 1 >= p.m() {
                prop_assert!(series[k + 1] >= &series[k] * (p.b() - 1));
            }
        }
    }

    #[test]
    fn prefix_counts_partition((p, s) in schedule_strategy(), extra in 0usize..6) {
        let j = p.m();
        let k = j + extra;
        let mut total = BigUint::from(0u32);
        for i in 0..p.words() {
            let w = Word::from_index(i, j, p.b());
            if let Ok(c) = count_from_prefix(&s, &w, k) {
                total += c;
            }
        }
        prop_assert_eq!(total, count_exact(&s, k));
    }

    #[test]
    fn agrees_with_enumeration((_p, s) in schedule_strategy()) {
        let brute = brute_counts(&s, 7);
        let fast = exact_series(&s, 7);
        for k in 0..=7 {
            prop_assert_eq!(&fast[k], &BigUint::from(brute[k]));
        }
    }
}
