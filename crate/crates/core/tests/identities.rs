mod common;

use covdeg_core::pencil::{build_score_system, Pencil};
use covdeg_core::ratpoly::rat;
use covdeg_core::BivarPoly;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pencil_from_seed(n: usize, seed: u64) -> Pencil {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = common::random_symmetric(n, -9, 9, &mut rng);
    let b = common::random_symmetric(n, -9, 9, &mut rng);
    let s = common::random_symmetric(n, -9, 9, &mut rng);
    Pencil::new(a, b, s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn euler_and_score_identities(n in 2usize..=5, seed in any::<u64>()) {
        let pencil = pencil_from_seed(n, seed);
        let Ok(sys) = build_score_system(&pencil) else {
            return Ok(());
        };
        let (x, y) = (BivarPoly::x(), BivarPoly::y());
        let nn = rat(n as i64);
        let lhs = sys.p.scale(&nn);
        prop_assert_eq!(lhs, &(&x * &sys.px) + &(&y * &sys.py));
        prop_assert_eq!(sys.t.scale(&rat(n as i64 - 1)), &(&x * &sys.tx) + &(&y * &sys.ty));
        prop_assert_eq!(&(&x * &sys.q) + &(&y * &sys.r), -&(&sys.p * &sys.t));
        let np_minus_t = &sys.p.scale(&nn) - &sys.t;
        prop_assert_eq!(&(&x * &sys.f) + &(&y * &sys.g), &sys.p * &np_minus_t);
    }

    #[test]
    fn f_and_g_split_into_two_homogeneous_parts(n in 2usize..=5, seed in any::<u64>()) {
        let Ok(sys) = build_score_system(&pencil_from_seed(n, seed)) else { return Ok(()); };
        let comps = sys.f.homogeneous_components();
        prop_assert!(comps.keys().all(|&d| d == 2 * n as u32 - 1 || d == 2 * n as u32 - 2));
        prop_assert_eq!(sys.f.homogeneous_part(2 * n as u32 - 2), sys.q.clone());
        prop_assert_eq!(sys.g.homogeneous_part(2 * n as u32 - 2), sys.r.clone());
    }
}
