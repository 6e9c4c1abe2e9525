use covdeg_core::ratpoly::modular::resultant_y;
use covdeg_core::ratpoly::{rat, sylvester_resultant, BinaryForm, UnivarPoly};
use covdeg_core::BivarPoly;
use proptest::prelude::*;

/// Fraction-free Bareiss elimination over `Q[x]`.
fn bareiss_poly_det(mut m: Vec<Vec<UnivarPoly>>) -> UnivarPoly {
    let n = m.len();
    let mut sign = rat(1);
    let mut prev = UnivarPoly::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return UnivarPoly::zero();
        };
        if piv != k {
            m.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.exact_div(&prev);
            }
            m[i][k] = UnivarPoly::zero();
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].scale(&sign)
}

fn sylvester_in_y(f: &BivarPoly, g: &BivarPoly) -> UnivarPoly {
    let fc = f.coeffs_in_y();
    let gc = g.coeffs_in_y();
    let (df, dg) = (fc.len() - 1, gc.len() - 1);
    let size = df + dg;
    let mut m = vec![vec![UnivarPoly::zero(); size]; size];
    for r in 0..dg {
        for k in 0..=df {
            m[r][r + k] = fc[df - k].clone();
        }
    }
    for r in 0..df {
        for k in 0..=dg {
            m[dg + r][r + k] = gc[dg - k].clone();
        }
    }
    bareiss_poly_det(m)
}

fn bivar() -> impl Strategy<Value = BivarPoly> {
    prop::collection::vec((-6i64..=6, 0u32..=3, 0u32..=3), 1..7).prop_map(|terms| {
        let mut p = BivarPoly::from_int_terms(&terms);
        // make sure y actually occurs
        p.add_term(0, 1 + (terms.len() as u32 % 2), rat(1 + terms.len() as i64));
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modular_matches_fraction_free(f in bivar(), g in bivar()) {
        prop_assert_eq!(resultant_y(&f, &g), sylvester_in_y(&f, &g));
    }

    #[test]
    fn resultant_is_multiplicative(f1 in bivar(), f2 in bivar(), g in bivar()) {
        let lhs = resultant_y(&(&f1 * &f2), &g);
        let rhs = resultant_y(&f1, &g).mul(&resultant_y(&f2, &g));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rational_coefficients(f in bivar(), g in bivar(), d in 1i64..=9) {
        let c = covdeg_core::Rational::new(1.into(), d.into());
        let lhs = resultant_y(&f.scale(&c), &g);
        let df = g.degree_in(covdeg_core::ratpoly::Var::Y).unwrap();
        let rhs = resultant_y(&f, &g).scale(&num_traits::pow(c, df as usize));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn binary_resultant_is_product_of_root_differences(
        a in prop::collection::vec(-5i64..=5, 1..4),
        b in prop::collection::vec(-5i64..=5, 1..4),
    ) {
        let form = |roots: &[i64]| {
            let p = roots.iter().fold(BivarPoly::constant(rat(1)), |acc, &r| {
                &acc * &BivarPoly::from_int_terms(&[(1, 1, 0), (-r, 0, 1)])
            });
            BinaryForm::from_poly(&p, roots.len() as u32).unwrap()
        };
        let want: i64 = a.iter().flat_map(|&x| b.iter().map(move |&y| x - y)).product();
        prop_assert_eq!(sylvester_resultant(&form(&a), &form(&b)).unwrap(), rat(want));
    }
}

#[test]
fn score_system_resultant_matches_fraction_free() {
    // n = 2 model: P = (x+y)(x+2y), T = 2x+3y
    let f = BivarPoly::from_int_terms(&[(2, 3, 0), (9, 2, 1), (13, 1, 2), (6, 0, 3), (-2, 2, 0), (-6, 1, 1), (-5, 0, 2)]);
    let g = BivarPoly::from_int_terms(&[(3, 3, 0), (13, 2, 1), (18, 1, 2), (8, 0, 3), (-3, 2, 0), (-8, 1, 1), (-6, 0, 2)]);
    let r = resultant_y(&f, &g);
    assert_eq!(r, sylvester_in_y(&f, &g));
    assert_eq!(r.x_valuation(), 4);
    let q = r.shift_down(4);
    assert_eq!(q.degree(), Some(1));
    assert!(q.eval(&rat(1)) == rat(0));
}
