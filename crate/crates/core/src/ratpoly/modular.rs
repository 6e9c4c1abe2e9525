//! Exact resultants of bivariate polynomials by evaluation, interpolation
//! and Chinese remaindering over word-sized primes.
//!
//! The Sylvester determinant is a polynomial with integer coefficients in
//! the entries, so its reduction modulo `p` is the determinant of the
//! reduced matrix for every prime. Enough primes are used to exceed twice
//! the bound `||R||_1 <= ||F||_1^deg_y(G) * ||G||_1^deg_y(F)`, which makes the
//! reconstruction exact rather than heuristic.

use std::collections::BTreeMap;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::bivar::{BivarPoly, Var};
use super::univar::UnivarPoly;
use super::Rational;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `count` largest primes below `2^62`.
pub fn primes_below_2_62(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = (1u64 << 62) - 1;
    while out.len() < count {
        if is_prime_u64(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

fn reduce(v: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((v % &m) + &m) % &m;
    r.to_u64().expect("residue fits in u64")
}

/// Determinant modulo `p` by Gaussian elimination.
pub fn det_mod(mut a: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = a.len();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| a[r][k] != 0) else {
            return 0;
        };
        if piv != k {
            a.swap(piv, k);
            det = (p - det) % p;
        }
        det = mul_mod(det, a[k][k], p);
        let inv = inv_mod(a[k][k], p);
        for i in k + 1..n {
            if a[i][k] == 0 {
                continue;
            }
            let factor = mul_mod(a[i][k], inv, p);
            for j in k..n {
                let sub = mul_mod(factor, a[k][j], p);
                a[i][j] = (a[i][j] + p - sub) % p;
            }
        }
    }
    det
}

/// Coefficients (lowest first) of the polynomial through `(k, ys[k])`, `k = 0..ys.len()`, mod `p`.
fn interpolate_mod(ys: &[u64], p: u64) -> Vec<u64> {
    let n = ys.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        let inv = inv_mod(level as u64, p);
        for k in (level..n).rev() {
            dd[k] = mul_mod((dd[k] + p - dd[k - 1]) % p, inv, p);
        }
    }
    // Horner in the Newton basis: acc = acc * (x - k) + dd[k]
    let mut acc: Vec<u64> = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let mut next = vec![0u64; acc.len() + 1];
        for (i, &c) in acc.iter().enumerate() {
            next[i + 1] = (next[i + 1] + c) % p;
            next[i] = (next[i] + p - mul_mod(c, k as u64 % p, p)) % p;
        }
        next[0] = (next[0] + dd[k]) % p;
        acc = next;
    }
    acc
}

/// Integer bivariate data laid out by power of `y`, each entry a dense
/// vector in `x`.
struct IntBivar {
    by_y: Vec<Vec<BigInt>>,
    l1_bits: f64,
}

impl IntBivar {
    fn new(terms: &BTreeMap<(u32, u32), BigInt>, dy: usize) -> Self {
        let dx = terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let mut by_y = vec![vec![BigInt::zero(); dx + 1]; dy + 1];
        let mut l1 = BigInt::zero();
        for (&(i, j), c) in terms {
            by_y[j as usize][i as usize] = c.clone();
            l1 += c.abs();
        }
        let l1_bits = if l1.is_zero() { 0.0 } else { l1.bits() as f64 };
        Self { by_y, l1_bits }
    }

    fn reduced(&self, p: u64) -> Vec<Vec<u64>> {
        self.by_y
            .iter()
            .map(|v| v.iter().map(|c| reduce(c, p)).collect())
            .collect()
    }
}

fn eval_mod(cs: &[u64], x: u64, p: u64) -> u64 {
    cs.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

/// Resultant with respect to `y`, as an exact polynomial in `x`.
///
/// The formal `y`-degrees are the actual degrees of `f` and `g`; rows hold
/// coefficients from the highest power of `y` down. Returns the zero
/// polynomial when either input is zero.
pub fn resultant_y(f: &BivarPoly, g: &BivarPoly) -> UnivarPoly {
    if f.is_zero() || g.is_zero() {
        return UnivarPoly::zero();
    }
    let df = f.degree_in(Var::Y).unwrap_or(0) as usize;
    let dg = g.degree_in(Var::Y).unwrap_or(0) as usize;
    let (lf, fi) = f.clear_denominators();
    let (lg, gi) = g.clear_denominators();
    let fb = IntBivar::new(&fi, df);
    let gb = IntBivar::new(&gi, dg);

    let tdeg = (f.degree().unwrap_or(0) * g.degree().unwrap_or(0)) as usize;
    let xdeg = dg * f.degree_in(Var::X).unwrap_or(0) as usize + df * g.degree_in(Var::X).unwrap_or(0) as usize;
    let deg_bound = tdeg.min(xdeg);
    let points = deg_bound + 1;

    // sign bit plus one bit of slack on top of the l1 bound
    let bound_bits = dg as f64 * fb.l1_bits + df as f64 * gb.l1_bits + 2.0;
    let nprimes = (bound_bits / 61.0).ceil().max(1.0) as usize;
    let primes = primes_below_2_62(nprimes);

    let size = df + dg;
    let residues: Vec<Vec<u64>> = primes
        .par_iter()
        .map(|&p| {
            let fr = fb.reduced(p);
            let gr = gb.reduced(p);
            let values: Vec<u64> = (0..points as u64)
                .map(|x| {
                    let fy: Vec<u64> = fr.iter().map(|cs| eval_mod(cs, x, p)).collect();
                    let gy: Vec<u64> = gr.iter().map(|cs| eval_mod(cs, x, p)).collect();
                    let mut m = vec![vec![0u64; size]; size];
                    for r in 0..dg {
                        for k in 0..=df {
                            m[r][r + k] = fy[df - k];
                        }
                    }
                    for r in 0..df {
                        for k in 0..=dg {
                            m[dg + r][r + k] = gy[dg - k];
                        }
                    }
                    det_mod(m, p)
                })
                .collect();
            interpolate_mod(&values, p)
        })
        .collect();

    // Incremental Chinese remaindering.
    let mut acc = vec![BigInt::zero(); points];
    let mut modulus = BigInt::one();
    for (&p, res) in primes.iter().zip(&residues) {
        let m_mod_p = reduce(&modulus, p);
        let inv = inv_mod(m_mod_p, p);
        for (a, &r) in acc.iter_mut().zip(res) {
            let cur = reduce(a, p);
            let t = mul_mod((r + p - cur) % p, inv, p);
            *a += &modulus * BigInt::from(t);
        }
        modulus *= BigInt::from(p);
    }
    let half = &modulus >> 1;
    let ints: Vec<BigInt> = acc
        .into_iter()
        .map(|a| if a > half { a - &modulus } else { a })
        .collect();

    // Res(lf f, lg g) = lf^dg lg^df Res(f, g)
    let scale = num_traits::pow(lf, dg) * num_traits::pow(lg, df);
    let scale = Rational::from_integer(scale);
    UnivarPoly::new(
        ints.into_iter()
            .map(|c| Rational::from_integer(c) / &scale)
            .collect(),
    )
}

/// Sign-aware bit length, exposed for diagnostics.
pub fn bit_size(v: &BigInt) -> i64 {
    match v.sign() {
        Sign::NoSign => 0,
        Sign::Minus => -(v.bits() as i64),
        Sign::Plus => v.bits() as i64,
    }
}
