mod common;

use std::f64::consts::PI;

use common::*;
use ncmeasure::decompose::{moment_distance, SimonState};
use ncmeasure::linalg::{hermitian_eigen, max_abs};
use ncmeasure::{ac_detect, simon_decompose, DecomposeConfig, NcMeasure, Verdict, Word, C64};
use proptest::prelude::*;

fn lebesgue(d: usize, budget: usize) -> NcMeasure {
    NcMeasure::lebesgue(d, budget).unwrap()
}

#[test]
fn dirac_pair_splits_exactly() {
    let mu = dirac(&[0.0, PI], 6);
    let r = simon_decompose(&mu, &dirac(&[0.0], 6), 6).unwrap();
    for n in 0..=6 {
        let w = Word::power(n);
        assert!((r.moment_ac(&w).unwrap() - c(1.0, 0.0)).norm() < 1e-8);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert!((r.moment_s(&w).unwrap() - c(sign, 0.0)).norm() < 1e-8);
    }
    assert_eq!(r.additivity_defect(), 0.0);
}

#[test]
fn self_decomposition_has_no_singular_part() {
    for mu in [
        lebesgue(2, 4),
        dirac(&[0.0], 4),
        weighted_h(2, 4),
        row_unitary_example(4),
    ] {
        let r = simon_decompose(&mu, &mu, 4).unwrap();
        assert!(
            r.moments_s.iter().all(|z| z.norm() < 1e-10),
            "{:?}",
            mu.generator()
        );
    }
}

#[test]
fn mutually_singular_diracs_have_no_ac_part() {
    let r = simon_decompose(&dirac(&[PI], 8), &dirac(&[0.0], 8), 8).unwrap();
    assert!(r.moments_ac.iter().all(|z| z.norm() < 1e-10));
}

#[test]
fn adding_lambda_adds_to_the_ac_part() {
    // (μ + λ)_ac = μ_ac + λ
    let cases = [
        (dirac(&[0.0, PI], 6), dirac(&[0.0], 6), 6),
        (weighted_h(2, 3), lebesgue(2, 3), 3),
        (half_circle(true, 8), lebesgue(1, 8), 8),
    ];
    for (mu, lambda, n) in cases {
        let base = simon_decompose(&mu, &lambda, n).unwrap();
        let shifted = simon_decompose(&mu.add(&lambda).unwrap(), &lambda, n).unwrap();
        let expected: Vec<C64> = base
            .moments_ac
            .iter()
            .zip(lambda.moments())
            .map(|(a, l)| a + l)
            .collect();
        assert!(moment_distance(&shifted.moments_ac, &expected) < 1e-8);
    }
}

#[test]
fn rank_is_additive_for_the_singular_pair() {
    for n in 1..=16 {
        let r = simon_decompose(&dirac(&[PI], 16), &dirac(&[0.0], 16), n).unwrap();
        assert_eq!(r.sigma_rank, r.mu_rank + r.lambda_rank, "N = {n}");
    }
}

#[test]
fn simon_state_operators() {
    let cfg = DecomposeConfig::default();
    let s = SimonState::new(&weighted_h(2, 3), &lebesgue(2, 3), 3, &cfg).unwrap();
    let q = s.q_s();
    assert!(max_abs(&(q * q - q)) < 1e-10);
    assert!(max_abs(&(q - q.adjoint())) < 1e-10);
    let (eigs, _) = hermitian_eigen(s.derivative());
    assert!(eigs.iter().all(|&e| (-1e-10..=1.0 + 1e-10).contains(&e)));
    assert!(s.coembedding().norm() <= 1.0 + 1e-6);
}

#[test]
fn verdicts_on_reference_pairs() {
    let cfg = DecomposeConfig::default();
    let ac = ac_detect(&weighted_h(2, 5), &lebesgue(2, 5), &[3, 4, 5], &cfg).unwrap();
    assert_eq!(ac.verdict, Verdict::Ac);
    let sing = ac_detect(&dirac(&[PI], 8), &dirac(&[0.0], 8), &[2, 4, 8], &cfg).unwrap();
    assert_eq!(sing.verdict, Verdict::Singular);
    let mixed = ac_detect(&dirac(&[0.0, PI], 8), &dirac(&[0.0], 8), &[2, 4, 8], &cfg).unwrap();
    assert_eq!(mixed.verdict, Verdict::Mixed);
}

#[test]
fn cone_and_scaling() {
    let cfg = DecomposeConfig::default();
    let ladder = [3, 4, 5];
    let sum = weighted_h(2, 5).add(&lebesgue(2, 5)).unwrap();
    assert_eq!(
        ac_detect(&sum, &lebesgue(2, 5), &ladder, &cfg)
            .unwrap()
            .verdict,
        Verdict::Ac
    );
    let r = simon_decompose(&dirac(&[0.0, PI], 8), &dirac(&[0.0], 8), 8).unwrap();
    let sing = r.singular_measure().unwrap().scale(2.5).unwrap();
    let v = ac_detect(&sing, &dirac(&[0.0], 8), &[2, 4, 8], &cfg).unwrap();
    assert_eq!(v.verdict, Verdict::Singular);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parts_add_up_and_stay_positive(a in recipe_for(2), b in recipe_for(2)) {
        let (mu, lambda) = (a.build(6), b.build(6));
        let r = simon_decompose(&mu, &lambda, 3).unwrap();
        let scale = 1.0 + mu.moments().iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(r.additivity_ulps() <= 1.0);
        prop_assert!(r.gram_additivity_defect() <= 4.0 * f64::EPSILON * scale);
        prop_assert!(r.positivity().holds(1e-8));
    }

    #[test]
    fn ac_part_is_dominated(a in recipe_for(1), b in recipe_for(1)) {
        // 0 <= μ_ac <= μ as forms.
        let (mu, lambda) = (a.build(12), b.build(12));
        let r = simon_decompose(&mu, &lambda, 6).unwrap();
        let p = r.positivity();
        prop_assert!(p.min_ac >= -1e-8 * p.scale);
        prop_assert!(p.min_s >= -1e-8 * p.scale);
    }

    #[test]
    fn hereditary_under_domination(t in 0.05..1.0f64) {
        // t·μ_ac is still absolutely continuous.
        let cfg = DecomposeConfig::default();
        let mu = weighted_h(2, 5).scale(t).unwrap();
        let v = ac_detect(&mu, &lebesgue(2, 5), &[3, 4, 5], &cfg).unwrap();
        prop_assert_eq!(v.verdict, Verdict::Ac);
    }
}
