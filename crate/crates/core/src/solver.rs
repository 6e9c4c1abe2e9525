//! Off-origin solutions of `f = g = 0` by exact elimination of `y` and
//! numeric back-substitution.
//!
//! `Res_y(f, g)` is computed exactly, the power of `x` carried by the origin
//! is divided out, and the multiplicity of every remaining root comes from
//! the exact square-free decomposition of the quotient. Each `x`-root is
//! then lifted to the unique `y` that solves both equations. When a fiber
//! is not a single point the coordinates are sheared by `x -> x + lambda y`
//! and the elimination is repeated.

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genericity::GenericityCertificate;
use crate::pencil::{is_positive_definite, MatrixScore, Pencil, ScoreSystem};
use crate::ratpoly::modular::resultant_y;
use crate::ratpoly::{
    aberth, numeric_roots, serde_complex, squarefree_decompose, BivarPoly, NumericBivar, PolyError, Rational,
    UnivarPoly, Var, DEFAULT_MAX_ITERS,
};

/// Largest normalized `|f|` for a `y`-candidate to count as a partner.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
/// A candidate that moves further than this (relative) under Newton's
/// method on the sheared system is not a partner.
pub const PARTNER_DRIFT: f64 = 1e-6;
/// `x`-roots closer than this (relative) are treated as a fiber collision.
pub const FIBER_COLLISION: f64 = 1e-9;
/// Points this close to the origin are discarded.
pub const ORIGIN_EXCLUSION: f64 = 1e-9;
/// Relative bound on `|P|` below which a point is on the determinant locus.
pub const DETERMINANT_EXCLUSION: f64 = 1e-8;
/// Shear parameters tried, in order, after the unsheared attempt.
pub const SHEARS: std::ops::RangeInclusive<i64> = 1..=20;

const NEWTON_TARGET: f64 = 1e-12;
const NEWTON_MAX_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("genericity certificate failed: {0:?}")]
    GenericityRequired(Vec<String>),
    #[error("fiber over x = {0} is not a single point in any tried coordinates")]
    AmbiguousFiber(Complex64),
    #[error("f and g share a common component")]
    CommonComponent,
    #[error("root finding did not converge")]
    NoConvergence,
}

impl From<PolyError> for SolverError {
    fn from(_: PolyError) -> Self {
        SolverError::NoConvergence
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    #[serde(with = "serde_complex")]
    pub x: Complex64,
    #[serde(with = "serde_complex")]
    pub y: Complex64,
    pub multiplicity: u32,
    pub residual: f64,
    pub is_real: bool,
    pub is_pd: bool,
    /// Newton stopped on a singular Jacobian.
    #[serde(default)]
    pub singular_jacobian: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub points: Vec<CriticalPoint>,
    pub origin_excess: u64,
    pub ml_degree_observed: u64,
    /// Shear parameter of the successful elimination, `0` if none was needed.
    pub shear: i64,
}

impl SolutionSet {
    pub fn real_points(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.points.iter().filter(|p| p.is_real)
    }

    /// Sets `is_pd` on every real point for the given pencil.
    pub fn classify_definiteness(&mut self, pencil: &Pencil) {
        for p in &mut self.points {
            p.is_pd = p.is_real && is_positive_definite(pencil, p.x.re, p.y.re);
        }
    }
}

/// `|Im| < 1e-8 (1 + |Re|)`.
pub fn is_real_value(z: Complex64) -> bool {
    z.im.abs() < 1e-8 * (1.0 + z.re.abs())
}

/// `max(|f|, |g|)`, each divided by `sum |c| |x|^i |y|^j`.
pub fn normalized_residual(f: &NumericBivar, g: &NumericBivar, x: Complex64, y: Complex64) -> f64 {
    let rel = |h: &NumericBivar| {
        let s = h.abs_scale(x, y);
        if s == 0.0 {
            0.0
        } else {
            h.eval(x, y).norm() / s
        }
    };
    rel(f).max(rel(g))
}

/// Multiplicity of the factor `x` in `Res_y(f, g)`.
pub fn resultant_origin_power(sys: &ScoreSystem) -> u64 {
    resultant_y(&sys.f, &sys.g).x_valuation() as u64
}

fn newton(f: &NumericBivar, g: &NumericBivar, x: Complex64, y: Complex64) -> (Complex64, Complex64, f64, bool) {
    let (mut x, mut y) = (x, y);
    let mut res = normalized_residual(f, g, x, y);
    for _ in 0..NEWTON_MAX_STEPS {
        if res < NEWTON_TARGET {
            break;
        }
        let (fv, fx, fy) = f.eval_with_gradient(x, y);
        let (gv, gx, gy) = g.eval_with_gradient(x, y);
        let det = fx * gy - fy * gx;
        let jscale = (fx.norm() + fy.norm()) * (gx.norm() + gy.norm());
        if !(det.norm() > 1e-14 * jscale) {
            return (x, y, res, true);
        }
        let dx = (fv * gy - gv * fy) / det;
        let dy = (gv * fx - fv * gx) / det;
        let (nx, ny) = (x - dx, y - dy);
        let nres = normalized_residual(f, g, nx, ny);
        if !(nres < res) {
            break;
        }
        x = nx;
        y = ny;
        res = nres;
    }
    (x, y, res, false)
}

/// Newton's method on the matrix form of the score when available, then on
/// the expanded `(f, g)`.
fn refine(
    score: Option<&MatrixScore>,
    f: &NumericBivar,
    g: &NumericBivar,
    x: Complex64,
    y: Complex64,
) -> (Complex64, Complex64, f64, bool) {
    let (x, y) = score
        .and_then(|m| Score::Matrix(m).settle(x, y))
        .unwrap_or((x, y));
    newton(f, g, x, y)
}

/// Newton's method for a simple point.
pub fn newton_refine(sys: &ScoreSystem, p: &CriticalPoint) -> CriticalPoint {
    let num = sys.numeric();
    let score = sys.pencil.as_ref().map(MatrixScore::new);
    let (x, y, residual, singular) = refine(score.as_ref(), &num.f, &num.g, p.x, p.y);
    if singular {
        return CriticalPoint {
            singular_jacobian: true,
            ..p.clone()
        };
    }
    CriticalPoint {
        x,
        y,
        residual,
        is_real: is_real_value(x) && is_real_value(y),
        singular_jacobian: false,
        ..p.clone()
    }
}

/// Input to one elimination attempt.
struct System<'a> {
    f: &'a BivarPoly,
    g: &'a BivarPoly,
    p: &'a BivarPoly,
    score: Option<MatrixScore>,
    tol: f64,
}

enum Attempt {
    Solved(Vec<CriticalPoint>),
    Retry(Complex64),
}

/// The equations Newton's method is run on: the expanded polynomials, or
/// the matrix form of the score when the pencil is known.
#[derive(Clone, Copy)]
enum Score<'a> {
    Poly(&'a NumericBivar, &'a NumericBivar),
    Matrix(&'a MatrixScore),
}

impl Score<'_> {
    /// Newton step `(dx, dy)`, `None` at a singular Jacobian.
    fn step(&self, x: Complex64, y: Complex64) -> Option<(Complex64, Complex64)> {
        let (fv, fx, fy, gv, gx, gy) = match self {
            Score::Poly(f, g) => {
                let (fv, fx, fy) = f.eval_with_gradient(x, y);
                let (gv, gx, gy) = g.eval_with_gradient(x, y);
                (fv, fx, fy, gv, gx, gy)
            }
            Score::Matrix(m) => {
                let e = m.eval(x, y)?;
                let [[fx, fy], [gx, gy]] = e.jacobian;
                (e.value[0], fx, fy, e.value[1], gx, gy)
            }
        };
        let det = fx * gy - fy * gx;
        if !(det.norm() > 1e-14 * (fx.norm() + fy.norm()) * (gx.norm() + gy.norm())) {
            return None;
        }
        let dx = (fv * gy - gv * fy) / det;
        let dy = (gv * fx - fv * gx) / det;
        (dx.re.is_finite() && dx.im.is_finite() && dy.re.is_finite() && dy.im.is_finite()).then_some((dx, dy))
    }

    /// Newton's method until the step stalls; `None` if the Jacobian
    /// becomes singular on the way.
    fn settle(&self, x0: Complex64, y0: Complex64) -> Option<(Complex64, Complex64)> {
        let (mut x, mut y) = (x0, y0);
        for _ in 0..NEWTON_MAX_STEPS {
            let (dx, dy) = self.step(x, y)?;
            x -= dx;
            y -= dy;
            if dx.norm() + dy.norm() <= 1e-15 * (1.0 + x.norm() + y.norm()) {
                break;
            }
        }
        Some((x, y))
    }

    /// How far Newton's method carries a point, relative to its size.
    fn drift(&self, x0: Complex64, y0: Complex64) -> f64 {
        match self.settle(x0, y0) {
            Some((x, y)) => (x - x0).norm() / (1.0 + x0.norm()) + (y - y0).norm() / (1.0 + y0.norm()),
            None => f64::INFINITY,
        }
    }
}

/// Roots of `g(x, .)` at which `f(x, .)` is below `tol` relative to its
/// term scale. For a simple `x`-root, candidates that Newton's method on
/// the score carries away from the fiber are dropped.
fn lifted_partners(
    fs: &NumericBivar,
    gs: &NumericBivar,
    score: Score,
    lambda: f64,
    x: Complex64,
    mult: u32,
    tol: f64,
) -> Result<Vec<Complex64>, SolverError> {
    let mut coeffs = gs.specialize_x(x);
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(Vec::new());
    }
    let normalized: Vec<Complex64> = coeffs.iter().map(|c| c / max).collect();
    let ys = aberth(&normalized, DEFAULT_MAX_ITERS)?;
    let mut partners: Vec<Complex64> = ys
        .into_iter()
        .filter(|&y| {
            let s = fs.abs_scale(x, y);
            s == 0.0 || fs.eval(x, y).norm() / s < tol
        })
        .collect();
    if partners.len() > 1 && mult == 1 {
        partners.retain(|&y| score.drift(x + y * lambda, y) < PARTNER_DRIFT);
    }
    Ok(partners)
}

fn attempt(sys: &System, lambda: i64, res: &UnivarPoly, origin_power: usize) -> Result<Attempt, SolverError> {
    let quotient = res.shift_down(origin_power);
    let mut xs: Vec<(Complex64, u32)> = Vec::new();
    for (factor, mult) in squarefree_decompose(&quotient)? {
        if factor.degree() == Some(0) {
            continue;
        }
        for root in numeric_roots(&factor)?.roots {
            xs.push((root.value, mult));
        }
    }
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let (a, b) = (xs[i].0, xs[j].0);
            if (a - b).norm() < FIBER_COLLISION * (1.0 + a.norm().max(b.norm())) {
                return Ok(Attempt::Retry(a));
            }
        }
    }

    let lam = Rational::from_integer(lambda.into());
    let fs = sys.f.shear(&lam).to_numeric();
    let gs = sys.g.shear(&lam).to_numeric();
    let f = sys.f.to_numeric();
    let g = sys.g.to_numeric();
    let p = sys.p.to_numeric();
    let score = match &sys.score {
        Some(m) => Score::Matrix(m),
        None => Score::Poly(&f, &g),
    };
    let lifted: Vec<Result<Option<CriticalPoint>, SolverError>> = xs
        .par_iter()
        .map(|&(xs_root, mult)| {
            let partners = lifted_partners(&fs, &gs, score, lambda as f64, xs_root, mult, sys.tol)?;
            if partners.len() != 1 {
                return Ok(None);
            }
            let y0 = partners[0];
            let x0 = xs_root + y0 * lambda as f64;
            let (x, y, residual, singular) = if mult == 1 {
                refine(sys.score.as_ref(), &f, &g, x0, y0)
            } else {
                (x0, y0, normalized_residual(&f, &g, x0, y0), false)
            };
            Ok(Some(CriticalPoint {
                x,
                y,
                multiplicity: mult,
                residual,
                is_real: is_real_value(x) && is_real_value(y),
                is_pd: false,
                singular_jacobian: singular,
            }))
        })
        .collect();

    let mut points = Vec::with_capacity(xs.len());
    for ((xs_root, _), r) in xs.iter().zip(lifted) {
        match r? {
            Some(pt) => points.push(pt),
            None => return Ok(Attempt::Retry(*xs_root)),
        }
    }
    points.retain(|pt| {
        let near_origin = pt.x.norm().max(pt.y.norm()) < ORIGIN_EXCLUSION;
        let scale = p.abs_scale(pt.x, pt.y);
        let on_locus = !(p.eval(pt.x, pt.y).norm() > DETERMINANT_EXCLUSION * scale);
        !near_origin && !on_locus
    });
    points.sort_by(|a, b| {
        a.x.re
            .total_cmp(&b.x.re)
            .then(a.x.im.total_cmp(&b.x.im))
            .then(a.y.re.total_cmp(&b.y.re))
            .then(a.y.im.total_cmp(&b.y.im))
    });
    Ok(Attempt::Solved(points))
}

fn leading_in_y_is_constant(h: &BivarPoly) -> bool {
    h.degree().is_some() && h.degree_in(Var::Y) == h.degree()
}

/// Shared driver, also used with the variables exchanged.
fn solve_polys(
    f: &BivarPoly,
    g: &BivarPoly,
    p: &BivarPoly,
    score: Option<MatrixScore>,
    tol: f64,
) -> Result<SolutionSet, SolverError> {
    let expected_origin = match (f.lowest_degree(), g.lowest_degree()) {
        (Some(a), Some(b)) => (a * b) as usize,
        _ => return Err(SolverError::CommonComponent),
    };
    let base = resultant_y(f, g);
    if base.is_zero() {
        return Err(SolverError::CommonComponent);
    }
    let origin_excess = base.x_valuation() as u64;
    let sys = System { f, g, p, score, tol };
    let mut last = Complex64::zero();
    for lambda in std::iter::once(0).chain(SHEARS) {
        let lam = Rational::from_integer(lambda.into());
        let (fs, gs) = (f.shear(&lam), g.shear(&lam));
        if !leading_in_y_is_constant(&fs) || !leading_in_y_is_constant(&gs) {
            continue;
        }
        let res = if lambda == 0 { base.clone() } else { resultant_y(&fs, &gs) };
        let k = res.x_valuation();
        if k != expected_origin {
            continue;
        }
        match attempt(&sys, lambda, &res, k)? {
            Attempt::Solved(points) => {
                let ml_degree_observed = points.iter().map(|p| p.multiplicity as u64).sum();
                return Ok(SolutionSet {
                    points,
                    origin_excess,
                    ml_degree_observed,
                    shear: lambda,
                });
            }
            Attempt::Retry(x) => last = x,
        }
    }
    Err(SolverError::AmbiguousFiber(last))
}

/// All off-origin complex solutions; `is_pd` is left unset.
pub fn solve(sys: &ScoreSystem, cert: &GenericityCertificate) -> Result<SolutionSet, SolverError> {
    solve_with_tolerance(sys, cert, DEFAULT_TOLERANCE)
}

pub fn solve_with_tolerance(
    sys: &ScoreSystem,
    cert: &GenericityCertificate,
    tol: f64,
) -> Result<SolutionSet, SolverError> {
    if !cert.verdict {
        return Err(SolverError::GenericityRequired(
            cert.failures().into_iter().map(String::from).collect(),
        ));
    }
    solve_polys(&sys.f, &sys.g, &sys.p, sys.pencil.as_ref().map(MatrixScore::new), tol)
}

/// Solves with `x` and `y` exchanged, then swaps each point back.
pub fn solve_swapped(sys: &ScoreSystem, cert: &GenericityCertificate) -> Result<SolutionSet, SolverError> {
    if !cert.verdict {
        return Err(SolverError::GenericityRequired(
            cert.failures().into_iter().map(String::from).collect(),
        ));
    }
    let mut sols = solve_polys(
        &sys.f.swap_vars(),
        &sys.g.swap_vars(),
        &sys.p.swap_vars(),
        sys.pencil.as_ref().map(|p| MatrixScore::new(p).swapped()),
        DEFAULT_TOLERANCE,
    )?;
    for p in &mut sols.points {
        std::mem::swap(&mut p.x, &mut p.y);
    }
    Ok(sols)
}

/// Solves and classifies definiteness against the pencil.
pub fn solve_model(
    pencil: &Pencil,
    sys: &ScoreSystem,
    cert: &GenericityCertificate,
    tol: f64,
) -> Result<SolutionSet, SolverError> {
    let mut sols = solve_with_tolerance(sys, cert, tol)?;
    sols.classify_definiteness(pencil);
    Ok(sols)
}
