use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::form::BinaryForm;
use super::univar::UnivarPoly;
use super::{denominator_lcm, to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// Sparse bivariate polynomial with exact rational coefficients.
///
/// Terms are keyed by `(i, j)` for `x^i y^j`; zero coefficients are never
/// stored, so the zero polynomial is the empty map.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn monomial(c: Rational, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), Rational)>) -> Self {
        let mut p = Self::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    /// Convenience constructor from small integer coefficients.
    pub fn from_int_terms(terms: &[(i64, u32, u32)]) -> Self {
        Self::from_terms(
            terms
                .iter()
                .map(|&(c, i, j)| ((i, j), Rational::from_integer(BigInt::from(c)))),
        )
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    /// Degree of the lowest homogeneous summand; this is the multiplicity of
    /// the curve at the origin.
    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    pub fn degree_in(&self, var: Var) -> Option<u32> {
        self.terms
            .keys()
            .map(|&(i, j)| match var {
                Var::X => i,
                Var::Y => j,
            })
            .max()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.lowest_degree()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative.
    pub fn partial(&self, var: Var) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            match var {
                Var::X if i > 0 => out.add_term(i - 1, j, c * Rational::from_integer(i.into())),
                Var::Y if j > 0 => out.add_term(i, j - 1, c * Rational::from_integer(j.into())),
                _ => {}
            }
        }
        out
    }

    /// The summand of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(&(i, j), _)| i + j == d)
                .map(|(&k, v)| (k, v.clone()))
                .collect(),
        }
    }

    /// Splits into homogeneous summands keyed by degree; their sum is `self`.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, BinaryForm> {
        let mut out = BTreeMap::new();
        for d in self.terms.keys().map(|&(i, j)| i + j) {
            out.entry(d).or_insert_with(|| {
                BinaryForm::from_poly(&self.homogeneous_part(d), d)
                    .expect("homogeneous part has the requested degree")
            });
        }
        out
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (&(i, j), c) in &self.terms {
            acc += c * num_traits::pow(x.clone(), i as usize) * num_traits::pow(y.clone(), j as usize);
        }
        acc
    }

    pub fn eval_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.to_numeric().eval(x, y)
    }

    pub fn to_numeric(&self) -> NumericBivar {
        NumericBivar {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| (i, j, to_f64(c)))
                .collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }

    /// `p(y, x)`.
    pub fn swap_vars(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        }
    }

    /// `p(x + lambda*y, y)`.
    pub fn shear(&self, lambda: &Rational) -> Self {
        if lambda.is_zero() {
            return self.clone();
        }
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            let mut binom = BigInt::one();
            let mut lam_pow = Rational::one();
            for k in 0..=i {
                let term = c * Rational::from_integer(binom.clone()) * &lam_pow;
                out.add_term(i - k, j + k, term);
                binom = binom * BigInt::from(i - k) / BigInt::from(k + 1);
                lam_pow *= lambda;
            }
        }
        out
    }

    /// Coefficients as a polynomial in `y` over `Q[x]`; entry `k` multiplies `y^k`.
    pub fn coeffs_in_y(&self) -> Vec<UnivarPoly> {
        let Some(dy) = self.degree_in(Var::Y) else {
            return Vec::new();
        };
        let mut raw: Vec<BTreeMap<u32, Rational>> = vec![BTreeMap::new(); dy as usize + 1];
        for (&(i, j), c) in &self.terms {
            raw[j as usize].insert(i, c.clone());
        }
        raw.into_iter()
            .map(|m| {
                let deg = m.keys().max().copied().unwrap_or(0) as usize;
                let mut v = vec![Rational::zero(); deg + 1];
                for (i, c) in m {
                    v[i as usize] = c;
                }
                UnivarPoly::new(v)
            })
            .collect()
    }

    /// `p(1, y)` as a univariate polynomial in `y`.
    pub fn dehomogenize_x(&self) -> UnivarPoly {
        let deg = self.degree_in(Var::Y).unwrap_or(0) as usize;
        let mut v = vec![Rational::zero(); deg + 1];
        for (&(_, j), c) in &self.terms {
            v[j as usize] += c;
        }
        UnivarPoly::new(v)
    }

    /// `p(x, 1)` as a univariate polynomial in `x`.
    pub fn dehomogenize_y(&self) -> UnivarPoly {
        self.swap_vars().dehomogenize_x()
    }

    /// Homogenizes a univariate `u(x)` to degree `d` in `(x, y)`.
    pub fn homogenize_from_x(u: &UnivarPoly, d: u32) -> Self {
        Self::from_terms(
            u.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| ((i as u32, d - i as u32), c.clone())),
        )
    }

    /// Integer multiple `scale * self` with all coefficients integral.
    pub fn clear_denominators(&self) -> (BigInt, BTreeMap<(u32, u32), BigInt>) {
        let l = denominator_lcm(self.terms.values());
        let lr = Rational::from_integer(l.clone());
        let ints = self
            .terms
            .iter()
            .map(|(&k, c)| (k, (c * &lr).to_integer()))
            .collect();
        (l, ints)
    }
}

impl Add for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

impl Mul for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(&k, v)| (k, -v.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BivarPoly {
            type Output = BivarPoly;
            fn $m(self, rhs: BivarPoly) -> BivarPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest total degree first, then by descending power of x.
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1, b.0).cmp(&(a.0 + a.1, a.0)));
        for (n, (i, j)) in keys.into_iter().enumerate() {
            let c = &self.terms[&(i, j)];
            let neg = c.is_negative();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let a = c.abs();
            let unit = a.is_one() && i + j > 0;
            if !unit {
                write!(f, "{a}")?;
            }
            for (v, e) in [("x", i), ("y", j)] {
                match e {
                    0 => {}
                    1 => write!(f, "{v}")?,
                    _ => write!(f, "{v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// Floating snapshots of `f`, `g` and `P` used by the numeric stages.
#[derive(Debug, Clone)]
pub struct NumericBivarSet {
    pub f: NumericBivar,
    pub g: NumericBivar,
    pub p: NumericBivar,
}

/// Floating-point snapshot of a [`BivarPoly`] for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct NumericBivar {
    terms: Vec<(u32, u32, f64)>,
}

impl NumericBivar {
    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| x.powu(i) * y.powu(j) * c)
            .sum()
    }

    /// `sum |c| |x|^i |y|^j`, the magnitude that rounding error in `eval` scales with.
    pub fn abs_scale(&self, x: Complex64, y: Complex64) -> f64 {
        let (ax, ay) = (x.norm(), y.norm());
        self.terms
            .iter()
            .map(|&(i, j, c)| c.abs() * ax.powi(i as i32) * ay.powi(j as i32))
            .sum()
    }

    /// Value together with both partial derivatives.
    pub fn eval_with_gradient(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64, Complex64) {
        let mut v = Complex64::zero();
        let mut dx = Complex64::zero();
        let mut dy = Complex64::zero();
        for &(i, j, c) in &self.terms {
            let xi = x.powu(i);
            let yj = y.powu(j);
            v += xi * yj * c;
            if i > 0 {
                dx += x.powu(i - 1) * yj * (c * i as f64);
            }
            if j > 0 {
                dy += xi * y.powu(j - 1) * (c * j as f64);
            }
        }
        (v, dx, dy)
    }

    /// Coefficients of `p(x0, y)` in `y`, lowest power first.
    pub fn specialize_x(&self, x0: Complex64) -> Vec<Complex64> {
        let deg = self.terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
        let mut out = vec![Complex64::zero(); deg + 1];
        for &(i, j, c) in &self.terms {
            out[j as usize] += x0.powu(i) * c;
        }
        out
    }
}
