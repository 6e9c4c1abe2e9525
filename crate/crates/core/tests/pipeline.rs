mod common;

use covdeg_core::genericity::{is_generic_witness_suite, WitnessFamily};
use covdeg_core::intersect::{dual_path_check, origin_multiplicity, points_at_infinity};
use covdeg_core::pencil::{build_score_system, Pencil};
use covdeg_core::ratpoly::Rational;
use covdeg_core::solver::{
    newton_refine, normalized_residual, resultant_origin_power, solve_swapped, CriticalPoint,
};
use covdeg_core::{certify, decompose, solve};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn generic_pencils(n: usize, count: usize, seed: u64) -> Vec<Pencil> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let p = common::random_pencil(n, &mut rng);
        let sys = build_score_system(&p).unwrap();
        if certify(&sys).verdict {
            out.push(p);
        }
    }
    out
}

#[test]
fn budget_and_solver_agree_for_small_n() {
    for n in 2..=5 {
        for (i, p) in generic_pencils(n, 4, 100 + n as u64).iter().enumerate() {
            let sys = build_score_system(p).unwrap();
            let cert = certify(&sys);
            let d = decompose(&sys, &cert).unwrap();
            let sols = solve(&sys, &cert).unwrap();
            let expected = 2 * n as i64 - 3;
            assert!(d.is_balanced());
            assert_eq!(d.origin, ((2 * n - 2) * (2 * n - 2)) as i64, "n={n} #{i}");
            assert_eq!(d.infinity_total, 2 * n as i64);
            assert_eq!(d.infinity_points.len(), n);
            assert_eq!(d.affine_off_origin, expected);
            assert_eq!(sols.ml_degree_observed as i64, expected);
            assert!(resultant_origin_power(&sys) >= ((2 * n - 2) * (2 * n - 2)) as u64);
        }
    }
}

#[test]
fn solutions_are_closed_under_conjugation() {
    for p in generic_pencils(4, 3, 7) {
        let sys = build_score_system(&p).unwrap();
        let sols = solve(&sys, &certify(&sys)).unwrap();
        for a in sols.points.iter().filter(|q| !q.is_real) {
            assert!(sols.points.iter().any(|b| {
                (a.x.conj() - b.x).norm() < 1e-8 * (1.0 + a.x.norm())
                    && (a.y.conj() - b.y).norm() < 1e-8 * (1.0 + a.y.norm())
                    && a.multiplicity == b.multiplicity
            }));
        }
    }
}

#[test]
fn elimination_order_does_not_matter() {
    for n in [3, 4] {
        for p in generic_pencils(n, 2, 55) {
            let sys = build_score_system(&p).unwrap();
            let cert = certify(&sys);
            let a = solve(&sys, &cert).unwrap();
            let b = solve_swapped(&sys, &cert).unwrap();
            assert_eq!(a.ml_degree_observed, b.ml_degree_observed);
            for q in &a.points {
                let scale = 1.0 + q.x.norm().max(q.y.norm());
                assert!(b
                    .points
                    .iter()
                    .any(|r| (q.x - r.x).norm() < 1e-6 * scale && (q.y - r.y).norm() < 1e-6 * scale));
            }
        }
    }
}

#[test]
fn returned_points_avoid_the_determinant_locus() {
    for p in generic_pencils(4, 3, 77) {
        let sys = build_score_system(&p).unwrap();
        let sols = solve(&sys, &certify(&sys)).unwrap();
        let num = sys.numeric();
        for q in &sols.points {
            let rel = num.p.eval(q.x, q.y).norm() / num.p.abs_scale(q.x, q.y);
            assert!(rel > 1e-8);
            assert!(q.residual < 1e-6);
            assert!(normalized_residual(&num.f, &num.g, q.x, q.y) < 1e-6);
        }
    }
}

#[test]
fn newton_contracts_after_a_perturbation() {
    for p in generic_pencils(3, 3, 91) {
        let sys = build_score_system(&p).unwrap();
        let sols = solve(&sys, &certify(&sys)).unwrap();
        let num = sys.numeric();
        for q in &sols.points {
            let seed = CriticalPoint {
                x: q.x + Complex64::new(1e-3, 0.0) * (1.0 + q.x.norm()),
                y: q.y - Complex64::new(1e-3, 0.0) * (1.0 + q.y.norm()),
                ..q.clone()
            };
            let before = normalized_residual(&num.f, &num.g, seed.x, seed.y);
            let after = newton_refine(&sys, &seed);
            assert!(after.residual < before);
            assert!((after.x - q.x).norm() < 1e-8 * (1.0 + q.x.norm()));
        }
    }
}

#[test]
fn witness_models_have_the_expected_degree() {
    for w in is_generic_witness_suite().into_iter().filter(|w| w.family == WitnessFamily::AllOnes) {
        if w.n > 6 {
            continue;
        }
        let sys = build_score_system(&w.pencil).unwrap();
        let cert = certify(&sys);
        assert!(cert.verdict);
        let d = decompose(&sys, &cert).unwrap();
        let sols = solve(&sys, &cert).unwrap();
        assert_eq!(d.affine_off_origin, 2 * w.n as i64 - 3);
        assert_eq!(sols.ml_degree_observed, 2 * w.n as u64 - 3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certificate_flags_are_scale_invariant(seed in any::<u64>(), num in 1i64..=9, den in 1i64..=9, neg in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_pencil(3, &mut rng);
        let c = Rational::new((if neg { -num } else { num }).into(), den.into());
        let scaled = Pencil::new(p.a.scale(&c), p.b.scale(&c), p.s.clone()).unwrap();
        let a = certify(&build_score_system(&p).unwrap());
        let b = certify(&build_score_system(&scaled).unwrap());
        for (u, v) in a.checks.iter().zip(&b.checks) {
            prop_assert_eq!(u.nonzero, v.nonzero);
        }
    }

    #[test]
    fn dual_path_agrees_on_random_instances(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_pencil(n, &mut rng);
        let sys = build_score_system(&p).unwrap();
        prop_assume!(certify(&sys).verdict);
        prop_assert_eq!(origin_multiplicity(&sys).unwrap(), ((2 * n - 2) * (2 * n - 2)) as u64);
        for pt in points_at_infinity(&sys).unwrap() {
            let check = dual_path_check(&sys, pt.q2).unwrap();
            prop_assert!(check.agrees(1e-6), "{:?}", check);
            prop_assert!(check.a1_minus_b1.norm() < 1e-8 * (1.0 + pt.q2.norm()));
        }
    }
}

#[test]
fn swapping_pencil_roles_swaps_points() {
    let p = common::example_one();
    let swapped = Pencil::new(p.b.clone(), p.a.clone(), p.s.clone()).unwrap();
    let a = solve(&build_score_system(&p).unwrap(), &certify(&build_score_system(&p).unwrap())).unwrap();
    let sys = build_score_system(&swapped).unwrap();
    let b = solve(&sys, &certify(&sys)).unwrap();
    for q in &a.points {
        assert!(b.points.iter().any(|r| (q.x - r.y).norm() < 1e-8 && (q.y - r.x).norm() < 1e-8));
    }
}
