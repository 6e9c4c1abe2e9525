use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::univar::{squarefree_decompose, UnivarPoly};
use super::{PolyError, Rational};

/// Residual bound for accepted roots: `2^-40` relative to the coefficient
/// scale `max|c_k| * max(1, |z|)^d`.
pub const DEFAULT_RESIDUAL_BOUND: f64 = 9.094947017729282e-13;
pub const DEFAULT_MAX_ITERS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    #[serde(with = "super::serde_complex")]
    pub value: Complex64,
    pub multiplicity: u32,
}

/// Roots of a polynomial with exact multiplicities.
///
/// `residual_bound` is the largest relative residual observed over all
/// reported roots; it never exceeds [`DEFAULT_RESIDUAL_BOUND`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub residual_bound: f64,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }
}

/// All complex roots of `u`, with multiplicities from its square-free
/// decomposition. Each square-free factor is solved separately.
pub fn numeric_roots(u: &UnivarPoly) -> Result<RootSet, PolyError> {
    let mut roots = Vec::new();
    let mut worst: f64 = 0.0;
    for (factor, mult) in squarefree_decompose(u)? {
        let (zs, res) = squarefree_roots(&factor)?;
        worst = worst.max(res);
        roots.extend(zs.into_iter().map(|value| Root { value, multiplicity: mult }));
    }
    Ok(RootSet {
        roots,
        residual_bound: worst,
    })
}

/// Approximate `log2 |r|` for a nonzero rational.
fn log2_abs(r: &Rational) -> f64 {
    fn log2_int(v: &BigInt) -> f64 {
        let bits = v.bits();
        if bits <= 60 {
            return v.abs().to_f64().unwrap_or(1.0).log2();
        }
        let shift = bits - 60;
        let top: BigInt = v.abs() >> shift;
        top.to_f64().unwrap_or(1.0).log2() + shift as f64
    }
    log2_int(r.numer()) - log2_int(r.denom())
}

/// Roots of a square-free polynomial and the worst relative residual.
pub(crate) fn squarefree_roots(factor: &UnivarPoly) -> Result<(Vec<Complex64>, f64), PolyError> {
    let Some(d) = factor.degree() else {
        return Err(PolyError::ZeroPolynomial);
    };
    if d == 0 {
        return Ok((Vec::new(), 0.0));
    }
    // Substitute x = 2^e t so the roots of the scaled polynomial have
    // magnitude near one, then normalize coefficients.
    let c = factor.coeffs();
    let lo = c.iter().position(|v| !v.is_zero()).unwrap_or(0);
    let e = if lo < d {
        ((log2_abs(&c[lo]) - log2_abs(&c[d])) / (d - lo) as f64).round() as i64
    } else {
        0
    };
    let scaled = scale_variable(factor, e);
    let coeffs: Vec<Complex64> = scaled
        .normalized_f64()
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    let ts = aberth(&coeffs, DEFAULT_MAX_ITERS)?;
    let s = 2f64.powi(e as i32);
    let mut worst: f64 = 0.0;
    let mut out = Vec::with_capacity(d);
    for t in ts {
        let t = polish(&coeffs, t);
        let rel = relative_residual(&coeffs, t);
        if !(rel <= DEFAULT_RESIDUAL_BOUND) {
            return Err(PolyError::NoConvergence(DEFAULT_MAX_ITERS));
        }
        worst = worst.max(rel);
        out.push(t * s);
    }
    Ok((out, worst))
}

fn scale_variable(u: &UnivarPoly, e: i64) -> UnivarPoly {
    if e == 0 {
        return u.clone();
    }
    let two = Rational::from_integer(BigInt::from(2));
    let step = if e > 0 { two } else { two.recip() };
    let mut factor = Rational::from_integer(BigInt::from(1));
    let mut out = Vec::with_capacity(u.coeffs().len());
    for c in u.coeffs() {
        out.push(c * &factor);
        for _ in 0..e.unsigned_abs() {
            factor *= &step;
        }
    }
    UnivarPoly::new(out)
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `|p(z)| / (max|c_k| * max(1,|z|)^d)`.
pub(crate) fn relative_residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    let d = coeffs.len().saturating_sub(1) as i32;
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let (p, _) = horner(coeffs, z);
    p.norm() / (max * z.norm().max(1.0).powi(d))
}

fn polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = relative_residual(coeffs, z);
    for _ in 0..8 {
        let (p, dp) = horner(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let r = relative_residual(coeffs, cand);
        if !(r < best) {
            break;
        }
        z = cand;
        best = r;
    }
    z
}

/// Aberth-Ehrlich simultaneous iteration for all roots of a polynomial with
/// complex coefficients (lowest degree first, nonzero leading coefficient).
pub fn aberth(coeffs: &[Complex64], max_iters: usize) -> Result<Vec<Complex64>, PolyError> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[d];
    if lead.norm() == 0.0 {
        return Err(PolyError::NoConvergence(0));
    }
    if d == 1 {
        return Ok(vec![-coeffs[0] / lead]);
    }
    let deriv: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect();
    // Fujiwara-style radius bound for the starting circle.
    let radius = (0..d)
        .map(|k| (coeffs[k] / lead).norm().powf(1.0 / (d - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / d as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let eval = |cs: &[Complex64], x: Complex64| cs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * x + c);
    let abs_eval = |x: Complex64| {
        let r = x.norm();
        coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    };
    let mut done = vec![false; d];
    for _ in 0..max_iters {
        for i in 0..d {
            if done[i] {
                continue;
            }
            let p = eval(coeffs, z[i]);
            if p.norm() <= 8.0 * f64::EPSILON * abs_eval(z[i]) {
                done[i] = true;
                continue;
            }
            let dp = eval(&deriv, z[i]);
            let ratio = p / dp;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] -= w;
            if w.norm() <= 1e-15 * (1.0 + z[i].norm()) {
                done[i] = true;
            }
        }
        if done.iter().all(|&v| v) {
            return Ok(z);
        }
    }
    Err(PolyError::NoConvergence(max_iters))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(cs: &[i64]) -> UnivarPoly {
        UnivarPoly::from_ints(cs)
    }

    fn sorted(mut v: Vec<(f64, f64, u32)>) -> Vec<(f64, f64, u32)> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    fn flatten(rs: &RootSet) -> Vec<(f64, f64, u32)> {
        sorted(rs.roots.iter().map(|r| (r.value.re, r.value.im, r.multiplicity)).collect())
    }

    #[test]
    fn imaginary_unit() {
        let rs = numeric_roots(&u(&[1, 0, 1])).unwrap();
        let got = flatten(&rs);
        assert_eq!(got.len(), 2);
        assert!(got[0].0.abs() < 1e-14 && (got[0].1 + 1.0).abs() < 1e-14);
        assert!(got[1].0.abs() < 1e-14 && (got[1].1 - 1.0).abs() < 1e-14);
        assert!(rs.residual_bound <= DEFAULT_RESIDUAL_BOUND);
    }

    #[test]
    fn double_root_keeps_exact_multiplicity() {
        let got = flatten(&numeric_roots(&u(&[0, 0, -1, 1])).unwrap());
        assert_eq!(got.len(), 2);
        assert!(got[0].0.abs() < 1e-14 && got[0].2 == 2);
        assert!((got[1].0 - 1.0).abs() < 1e-14 && got[1].2 == 1);
    }

    #[test]
    fn product_of_linear_factors() {
        // (1 + y)(1 + 2y) = 1 + 3y + 2y^2
        let got = flatten(&numeric_roots(&u(&[1, 3, 2])).unwrap());
        assert!((got[0].0 + 1.0).abs() < 1e-14);
        assert!((got[1].0 + 0.5).abs() < 1e-14);
    }

    #[test]
    fn widely_scaled_roots() {
        // (x - 1e-30)(x - 1e30) with exact huge coefficients
        let small = Rational::new(BigInt::from(1), num_traits::pow(BigInt::from(10), 30));
        let big = Rational::from_integer(num_traits::pow(BigInt::from(10), 30));
        let p = UnivarPoly::linear_root(small).mul(&UnivarPoly::linear_root(big));
        let got = flatten(&numeric_roots(&p).unwrap());
        assert!((got[0].0 / 1e-30 - 1.0).abs() < 1e-10);
        assert!((got[1].0 / 1e30 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn complex_coefficients() {
        // (z - i)(z + 2) = z^2 + (2 - i) z - 2i
        let cs = [Complex64::new(0.0, -2.0), Complex64::new(2.0, -1.0), Complex64::new(1.0, 0.0)];
        let mut zs = aberth(&cs, 1000).unwrap();
        zs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((zs[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((zs[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }
}
