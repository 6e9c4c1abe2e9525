//! Model objects: the pencil `x A + y B`, `P = det`, `T = tr(S adj)`, and the
//! cleared score polynomials
//!
//! ```text
//! f = P Px + P Tx - T Px
//! g = P Py + P Ty - T Py
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ratpoly::{adjugate, det_rational, to_f64, BivarPoly, NumericBivarSet, Rational, UnivarPoly, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PencilError {
    #[error("matrix is not symmetric: entry ({row},{col}) differs from ({col},{row})")]
    AsymmetricMatrix { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}x{expected}, found {found}")]
    DimensionMismatch { expected: usize, found: String },
    #[error("pencil dimension must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("degenerate degrees: deg P = {p:?} (expected {n}), deg T = {t:?} (expected {})", n - 1)]
    DegenerateDegrees { n: usize, p: Option<u32>, t: Option<u32> },
    #[error("x A + y B is not positive definite at ({x}, {y})")]
    NotPositiveDefinite { x: f64, y: f64 },
    #[error("point lies on the determinant locus P = 0")]
    OnDeterminantLocus,
    #[error("no samples given")]
    EmptyData,
    #[error("sample {index} has length {len}, expected {expected}")]
    RaggedData { index: usize, len: usize, expected: usize },
}

/// Symmetric matrix with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<Vec<Rational>>,
}

impl SymMatrix {
    pub fn new(entries: Vec<Vec<Rational>>) -> Result<Self, PencilError> {
        let n = entries.len();
        for row in &entries {
            if row.len() != n {
                return Err(PencilError::DimensionMismatch {
                    expected: n,
                    found: format!("{}x{}", n, row.len()),
                });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if entries[i][j] != entries[j][i] {
                    return Err(PencilError::AsymmetricMatrix { row: i, col: j });
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self, PencilError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| Rational::one()).collect())
    }

    pub fn diagonal(d: Vec<Rational>) -> Self {
        let n = d.len();
        let mut entries = vec![vec![Rational::zero(); n]; n];
        for (i, v) in d.into_iter().enumerate() {
            entries[i][i] = v;
        }
        Self { n, entries }
    }

    /// `u u^T`.
    pub fn outer(u: &[Rational]) -> Self {
        Self {
            n: u.len(),
            entries: u.iter().map(|a| u.iter().map(|b| a * b).collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|v| v * c).collect())
                .collect(),
        }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| to_f64(&self.entries[i][j]))
    }
}

/// The model instance `(A, B, S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pencil {
    pub a: SymMatrix,
    pub b: SymMatrix,
    pub s: SymMatrix,
}

impl Pencil {
    pub fn new(a: SymMatrix, b: SymMatrix, s: SymMatrix) -> Result<Self, PencilError> {
        let n = a.dim();
        if n < 2 {
            return Err(PencilError::TooSmall(n));
        }
        for m in [&b, &s] {
            if m.dim() != n {
                return Err(PencilError::DimensionMismatch {
                    expected: n,
                    found: format!("{0}x{0}", m.dim()),
                });
            }
        }
        Ok(Self { a, b, s })
    }

    pub fn n(&self) -> usize {
        self.a.dim()
    }

    /// Exact `x A + y B`.
    pub fn sigma(&self, x: &Rational, y: &Rational) -> Vec<Vec<Rational>> {
        let n = self.n();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| x * self.a.get(i, j) + y * self.b.get(i, j))
                    .collect()
            })
            .collect()
    }

    /// Floating `x A + y B`.
    pub fn sigma_f64(&self, x: f64, y: f64) -> DMatrix<f64> {
        self.a.to_f64() * x + self.b.to_f64() * y
    }
}

/// `P(x, y) = det(x A + y B)`, homogeneous of degree `n`.
///
/// Interpolates `det(x_k A + B)` at `x_k = 0..=n` (Bareiss determinants) and
/// re-homogenizes to degree `n`; a drop in `x`-degree is absorbed in `y`.
pub fn pencil_determinant(p: &Pencil) -> BivarPoly {
    let n = p.n();
    let xs: Vec<Rational> = (0..=n as i64).map(|k| Rational::from_integer(k.into())).collect();
    let ys: Vec<Rational> = xs
        .iter()
        .map(|x| det_rational(&p.sigma(x, &Rational::one())))
        .collect();
    BivarPoly::homogenize_from_x(&UnivarPoly::interpolate(&xs, &ys), n as u32)
}

/// `T(x, y) = tr(S adj(x A + y B))`, homogeneous of degree `n - 1`.
pub fn adjugate_trace(p: &Pencil) -> BivarPoly {
    let n = p.n();
    let xs: Vec<Rational> = (0..n as i64).map(|k| Rational::from_integer(k.into())).collect();
    let ys: Vec<Rational> = xs
        .iter()
        .map(|x| {
            let adj = adjugate(&p.sigma(x, &Rational::one()));
            let mut tr = Rational::zero();
            for i in 0..n {
                for j in 0..n {
                    tr += p.s.get(i, j) * &adj[j][i];
                }
            }
            tr
        })
        .collect();
    BivarPoly::homogenize_from_x(&UnivarPoly::interpolate(&xs, &ys), n as u32 - 1)
}

/// Every polynomial that appears in the score equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreSystem {
    pub n: usize,
    pub p: BivarPoly,
    pub px: BivarPoly,
    pub py: BivarPoly,
    pub t: BivarPoly,
    pub tx: BivarPoly,
    pub ty: BivarPoly,
    pub f: BivarPoly,
    pub g: BivarPoly,
    /// `P Tx - T Px`, the degree `2n-2` part of `f`.
    pub q: BivarPoly,
    /// `P Ty - T Py`, the degree `2n-2` part of `g`.
    pub r: BivarPoly,
    /// The pencil the system was built from, if any.
    pub pencil: Option<Pencil>,
}

impl ScoreSystem {
    /// Floating snapshots of `f`, `g` and `P`.
    pub fn numeric(&self) -> NumericBivarSet {
        NumericBivarSet {
            f: self.f.to_numeric(),
            g: self.g.to_numeric(),
            p: self.p.to_numeric(),
        }
    }
}

pub fn build_score_system(pencil: &Pencil) -> Result<ScoreSystem, PencilError> {
    let n = pencil.n();
    let p = pencil_determinant(pencil);
    let t = adjugate_trace(pencil);
    if p.degree() != Some(n as u32) || t.degree() != Some(n as u32 - 1) {
        return Err(PencilError::DegenerateDegrees {
            n,
            p: p.degree(),
            t: t.degree(),
        });
    }
    Ok(ScoreSystem {
        pencil: Some(pencil.clone()),
        ..score_system_from(n, p, t)
    })
}

/// Assembles the score system from `P` and `T`.
pub fn score_system_from(n: usize, p: BivarPoly, t: BivarPoly) -> ScoreSystem {
    let px = p.partial(Var::X);
    let py = p.partial(Var::Y);
    let tx = t.partial(Var::X);
    let ty = t.partial(Var::Y);
    let q = &(&p * &tx) - &(&t * &px);
    let r = &(&p * &ty) - &(&t * &py);
    let f = &(&p * &px) + &q;
    let g = &(&p * &py) + &r;
    ScoreSystem {
        n,
        p,
        px,
        py,
        t,
        tx,
        ty,
        f,
        g,
        q,
        r,
        pencil: None,
    }
}

/// The score `(f / P^2, g / P^2)` evaluated through `K = (x A + y B)^-1`:
///
/// ```text
/// phi_U = tr(K U) - tr(K S K U),   U in {A, B}
/// ```
///
/// Unlike the expanded polynomials this form does not lose accuracy to
/// cancellation between monomials.
#[derive(Debug, Clone)]
pub struct MatrixScore {
    a: DMatrix<Complex64>,
    b: DMatrix<Complex64>,
    s: DMatrix<Complex64>,
}

/// Score value, Jacobian and the relative size of the value at one point.
#[derive(Debug, Clone, Copy)]
pub struct ScoreEval {
    pub value: [Complex64; 2],
    /// `jacobian[i][j]` is the derivative of component `i` in variable `j`.
    pub jacobian: [[Complex64; 2]; 2],
    /// `max_i |phi_i| / (|tr(K U)| + |tr(K S K U)|)`.
    pub relative: f64,
}

impl MatrixScore {
    pub fn new(pencil: &Pencil) -> Self {
        let c = |m: &SymMatrix| m.to_f64().map(|v| Complex64::new(v, 0.0));
        Self {
            a: c(&pencil.a),
            b: c(&pencil.b),
            s: c(&pencil.s),
        }
    }

    /// The same score with `x` and `y` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
            s: self.s.clone(),
        }
    }

    /// `None` on the determinant locus.
    pub fn eval(&self, x: Complex64, y: Complex64) -> Option<ScoreEval> {
        let m = &self.a * x + &self.b * y;
        let k = m.try_inverse()?;
        let ksk = &k * &self.s * &k;
        let us = [&self.a, &self.b];
        let ku: Vec<DMatrix<Complex64>> = us.iter().map(|u| &k * *u).collect();
        let kusk: Vec<DMatrix<Complex64>> = us.iter().map(|u| &ksk * *u).collect();
        let tr = |m: &DMatrix<Complex64>, n: &DMatrix<Complex64>| (m * n).trace();
        let mut value = [Complex64::zero(); 2];
        let mut jacobian = [[Complex64::zero(); 2]; 2];
        let mut relative: f64 = 0.0;
        for i in 0..2 {
            let (t1, t2) = (ku[i].trace(), kusk[i].trace());
            value[i] = t1 - t2;
            let scale = t1.norm() + t2.norm();
            if !(value[i].norm() <= scale) {
                return None;
            }
            relative = relative.max(if scale == 0.0 { 0.0 } else { value[i].norm() / scale });
            for j in 0..2 {
                // d/dv of tr(K U) - tr(K S K U) with dK = -K V K
                jacobian[i][j] = -tr(&ku[j], &ku[i]) + tr(&ku[j], &kusk[i]) + tr(&kusk[j], &ku[i]);
            }
        }
        Some(ScoreEval {
            value,
            jacobian,
            relative,
        })
    }
}

/// Relative threshold on `|P|` below which a point counts as singular.
pub const DETERMINANT_LOCUS_THRESHOLD: f64 = 1e-14;

/// Pivot threshold of the positive definiteness test, relative to the
/// largest diagonal entry.
pub const PD_PIVOT_THRESHOLD: f64 = 1e-12;

/// Cholesky factor of `x A + y B`, or `None` when it is not positive definite.
fn cholesky(pencil: &Pencil, x: f64, y: f64) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let sigma = pencil.sigma_f64(x, y);
    let max_diag = sigma.diagonal().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max_diag > 0.0) {
        return None;
    }
    let chol = sigma.cholesky()?;
    let l = chol.l_dirty();
    let ok = (0..pencil.n()).all(|i| {
        let d = l[(i, i)];
        d * d > PD_PIVOT_THRESHOLD * max_diag
    });
    ok.then_some(chol)
}

pub fn is_positive_definite(pencil: &Pencil, x: f64, y: f64) -> bool {
    cholesky(pencil, x, y).is_some()
}

/// `log det(Sigma) + tr(S Sigma^-1)` at `Sigma = x A + y B`.
///
/// This is the reduced objective: the constant and the `r/2` factor of the
/// full log-likelihood are dropped, which leaves its minimizer unchanged.
pub fn loglik(pencil: &Pencil, x: f64, y: f64) -> Result<f64, PencilError> {
    let chol = cholesky(pencil, x, y).ok_or(PencilError::NotPositiveDefinite { x, y })?;
    let l = chol.l_dirty();
    let log_det: f64 = (0..pencil.n()).map(|i| 2.0 * l[(i, i)].ln()).sum();
    let sol = chol.solve(&pencil.s.to_f64());
    Ok(log_det + sol.trace())
}

/// The gradient of the reduced objective, `(f / P^2, g / P^2)`.
pub fn score_residual(sys: &ScoreSystem, x: Complex64, y: Complex64) -> Result<(Complex64, Complex64), PencilError> {
    let num = sys.numeric();
    score_residual_numeric(&num, x, y)
}

pub fn score_residual_numeric(
    num: &NumericBivarSet,
    x: Complex64,
    y: Complex64,
) -> Result<(Complex64, Complex64), PencilError> {
    let pv = num.p.eval(x, y);
    let scale = num.p.abs_scale(x, y);
    if !(pv.norm() > DETERMINANT_LOCUS_THRESHOLD * scale) {
        return Err(PencilError::OnDeterminantLocus);
    }
    let p2 = pv * pv;
    Ok((num.f.eval(x, y) / p2, num.g.eval(x, y) / p2))
}

/// `S = (1/r) sum u_i u_i^T`, exact.
pub fn sample_covariance(samples: &[Vec<Rational>]) -> Result<SymMatrix, PencilError> {
    let first = samples.first().ok_or(PencilError::EmptyData)?;
    let n = first.len();
    if n == 0 {
        return Err(PencilError::EmptyData);
    }
    let mut acc = vec![vec![Rational::zero(); n]; n];
    for (index, u) in samples.iter().enumerate() {
        if u.len() != n {
            return Err(PencilError::RaggedData {
                index,
                len: u.len(),
                expected: n,
            });
        }
        for i in 0..n {
            for j in 0..n {
                acc[i][j] += &u[i] * &u[j];
            }
        }
    }
    let r = Rational::from_integer(samples.len().into());
    for row in &mut acc {
        for v in row.iter_mut() {
            *v /= &r;
        }
    }
    SymMatrix::new(acc)
}
