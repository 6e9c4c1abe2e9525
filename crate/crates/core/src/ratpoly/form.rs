use num_traits::Zero;

use super::bareiss::det_rational;
use super::bivar::BivarPoly;
use super::{PolyError, Rational};

/// Homogeneous polynomial in `(x, y)` of a fixed nominal degree.
///
/// `coeffs[k]` multiplies `x^(d-k) y^k`. The nominal degree is kept even when
/// leading coefficients vanish, so resultants are the projective ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryForm {
    degree: u32,
    coeffs: Vec<Rational>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a binary form needs at least one coefficient");
        Self {
            degree: coeffs.len() as u32 - 1,
            coeffs,
        }
    }

    pub fn zero(degree: u32) -> Self {
        Self {
            degree,
            coeffs: vec![Rational::zero(); degree as usize + 1],
        }
    }

    /// Reads a polynomial as a form of nominal degree `d`. The zero
    /// polynomial becomes the zero form of that degree.
    pub fn from_poly(p: &BivarPoly, d: u32) -> Result<Self, PolyError> {
        let mut form = Self::zero(d);
        for (&(i, j), c) in p.terms() {
            if i + j != d {
                return Err(PolyError::NotHomogeneous(d));
            }
            form.coeffs[j as usize] = c.clone();
        }
        Ok(form)
    }

    pub fn to_poly(&self) -> BivarPoly {
        let d = self.degree;
        BivarPoly::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| ((d - k as u32, k as u32), c.clone())),
        )
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

/// Determinant of the Sylvester matrix of two binary forms.
///
/// The rows of `p` are shifted `deg q` times above the rows of `q` shifted
/// `deg p` times, with coefficients ordered from the highest power of `x`.
/// The value vanishes exactly when `p` and `q` share a projective root.
/// A degree-zero form `c` gives `c^(deg other)`.
pub fn sylvester_resultant(p: &BinaryForm, q: &BinaryForm) -> Result<Rational, PolyError> {
    if p.is_zero() || q.is_zero() {
        return Err(PolyError::ZeroForm);
    }
    let m = p.degree as usize;
    let n = q.degree as usize;
    let size = m + n;
    let mut rows = vec![vec![Rational::zero(); size]; size];
    for r in 0..n {
        for (k, c) in p.coeffs.iter().enumerate() {
            rows[r][r + k] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in q.coeffs.iter().enumerate() {
            rows[n + r][r + k] = c.clone();
        }
    }
    Ok(det_rational(&rows))
}
