#![allow(dead_code)]

use covdeg_core::pencil::{sample_covariance, Pencil, SymMatrix};
use covdeg_core::ratpoly::rat;
use covdeg_core::Rational;
use rand::Rng;

pub fn example_one() -> Pencil {
    Pencil::new(
        SymMatrix::from_ints(&[&[5, 1, 0], &[1, 3, -2], &[0, -2, 6]]).unwrap(),
        SymMatrix::from_ints(&[&[1, -1, 0], &[-1, 6, -2], &[0, -2, 1]]).unwrap(),
        SymMatrix::from_ints(&[&[1, 2, -2], &[2, 6, -7], &[-2, -7, 9]]).unwrap(),
    )
    .unwrap()
}

pub fn random_symmetric<R: Rng>(n: usize, lo: i64, hi: i64, rng: &mut R) -> SymMatrix {
    let mut m = vec![vec![rat(0); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rat(rng.random_range(lo..=hi));
            m[i][j] = v.clone();
            m[j][i] = v;
        }
    }
    SymMatrix::new(m).unwrap()
}

/// `A = M^T M + I`, `B` symmetric in `[-9, 9]`, `S` from `n + 1` integer samples.
pub fn random_pencil<R: Rng>(n: usize, rng: &mut R) -> Pencil {
    let m: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.random_range(-9..=9)).collect())
        .collect();
    let a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| rat((0..n).map(|k| m[k][i] * m[k][j]).sum::<i64>() + i64::from(i == j)))
                .collect()
        })
        .collect();
    let b = random_symmetric(n, -9, 9, rng);
    let samples: Vec<Vec<Rational>> = (0..=n)
        .map(|_| (0..n).map(|_| rat(rng.random_range(-9..=9))).collect())
        .collect();
    Pencil::new(SymMatrix::new(a).unwrap(), b, sample_covariance(&samples).unwrap()).unwrap()
}
