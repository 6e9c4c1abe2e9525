use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{denominator_lcm, to_f64, PolyError, Rational};

/// Dense univariate polynomial over the rationals, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnivarPoly {
    coeffs: Vec<Rational>,
}

impl UnivarPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect())
    }

    pub fn from_bigints(cs: Vec<BigInt>) -> Self {
        Self::new(cs.into_iter().map(Rational::from_integer).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(vec![Rational::one()])
    }

    /// `x - r`.
    pub fn linear_root(r: Rational) -> Self {
        Self::new(vec![-r, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    let b = other.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|v| v * c).collect())
    }

    /// Euclidean division, panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Quotient of an exact division; the caller guarantees divisibility.
    pub fn exact_div(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Multiplicity of `x` as a factor (number of vanishing low coefficients).
    pub fn x_valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divides by `x^k`, dropping the lowest `k` coefficients.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    /// Integer polynomial with content 1 and positive leading coefficient,
    /// a rational multiple of `self`.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = denominator_lcm(&self.coeffs);
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        if ints.last().is_some_and(Signed::is_negative) {
            g = -g;
        }
        Self::from_bigints(ints.into_iter().map(|v| v / &g).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    /// Greatest common divisor in primitive normalization.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.primitive();
        }
        a.primitive()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Floating coefficients divided by the largest magnitude. Ratios are
    /// formed exactly first so huge coefficients never overflow.
    pub fn normalized_f64(&self) -> Vec<f64> {
        let Some(max) = self.coeffs.iter().map(|c| c.abs()).max() else {
            return Vec::new();
        };
        self.coeffs.iter().map(|c| to_f64(&(c / &max))).collect()
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        let cs: Vec<f64> = self.normalized_f64();
        cs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * x + c)
    }

    /// Newton interpolation through `(xs[k], ys[k])`; the `xs` must be distinct.
    pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Self {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        let mut dd = ys.to_vec();
        for level in 1..n {
            for k in (level..n).rev() {
                dd[k] = (&dd[k] - &dd[k - 1]) / (&xs[k] - &xs[k - level]);
            }
        }
        let mut acc = Self::zero();
        for k in (0..n).rev() {
            acc = acc
                .mul(&Self::linear_root(xs[k].clone()))
                .add(&Self::new(vec![dd[k].clone()]));
        }
        acc
    }
}

/// Square-free decomposition by Yun's algorithm.
///
/// Returns pairwise coprime square-free factors (primitive, positive leading
/// coefficient, positive degree) with multiplicities such that the product
/// of `factor^multiplicity` equals `u` up to a nonzero rational constant.
pub fn squarefree_decompose(u: &UnivarPoly) -> Result<Vec<(UnivarPoly, u32)>, PolyError> {
    if u.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    let u = u.primitive();
    if u.degree() == Some(0) {
        return Ok(out);
    }
    let du = u.derivative();
    let b = u.gcd(&du);
    let mut c = u.exact_div(&b);
    let mut d = du.exact_div(&b).sub(&c.derivative());
    let mut mult = 1;
    while c.degree().unwrap_or(0) > 0 {
        let a = c.gcd(&d);
        c = c.exact_div(&a);
        d = d.exact_div(&a).sub(&c.derivative());
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.primitive(), mult));
        }
        mult += 1;
    }
    Ok(out)
}

impl fmt::Display for UnivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            if !(a.is_one() && i > 0) {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}
