//! The three terms of the Bézout budget for `F`, `G`, the homogenizations
//! of `f`, `g`: the origin, the `n` points at infinity on `z = 0`, and
//! whatever is left over in the affine plane.

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genericity::GenericityCertificate;
use crate::pencil::ScoreSystem;
use crate::ratpoly::{
    best_rational, numeric_roots, serde_complex, sylvester_resultant, to_f64, BinaryForm, BivarPoly, PolyError,
    Rational, Var,
};

/// Relative threshold below which the closed-form certificate counts as zero.
pub const CERTIFICATE_ZERO_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntersectError {
    #[error("lowest forms of f and g share a factor; the origin product formula does not apply")]
    SharedLowestFactor,
    #[error("det B = 0, so P(1, y) drops degree")]
    DetBZero,
    #[error("P(1, y) has repeated roots")]
    RepeatedRoots,
    #[error("multiplicity certificate vanishes at q2 = {0}")]
    CertificateVanishes(Complex64),
    #[error("F_z vanishes at q2 = {0}")]
    FzVanishes(Complex64),
    #[error("G_z vanishes at q2 = {0}")]
    GzVanishes(Complex64),
    #[error("genericity certificate failed: {0:?}")]
    GenericityRequired(Vec<String>),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A point `[1 : q2 : 0]` of `V(F, G, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfinityPoint {
    #[serde(with = "serde_complex")]
    pub q2: Complex64,
    /// `T^4 Px^2 Py^4 (Py Tx - Px Ty)` at `(1, q2)` with every factor divided
    /// by its absolute evaluation scale, so `|value| <= 1`.
    #[serde(with = "serde_complex")]
    pub closed_form_value: Complex64,
    /// The unnormalized value, when `q2` is rational.
    #[serde(default, with = "serde_opt_rational")]
    pub closed_form_exact: Option<Rational>,
    pub multiplicity: u32,
}

mod serde_opt_rational {
    use crate::ratpoly::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_some(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BezoutDecomposition {
    pub n: usize,
    pub total: i64,
    pub origin: i64,
    #[serde(rename = "infinity")]
    pub infinity_total: i64,
    #[serde(rename = "affine")]
    pub affine_off_origin: i64,
    #[serde(rename = "points_at_infinity")]
    pub infinity_points: Vec<InfinityPoint>,
}

impl BezoutDecomposition {
    pub fn is_balanced(&self) -> bool {
        self.origin + self.infinity_total + self.affine_off_origin == self.total
    }
}

fn lowest_form(p: &BivarPoly) -> Option<BinaryForm> {
    let d = p.lowest_degree()?;
    BinaryForm::from_poly(&p.homogeneous_part(d), d).ok()
}

/// `m_0(f) * m_0(g)`, valid when the lowest forms share no linear factor.
pub fn origin_multiplicity(sys: &ScoreSystem) -> Result<u64, IntersectError> {
    let (Some(lf), Some(lg)) = (lowest_form(&sys.f), lowest_form(&sys.g)) else {
        return Err(IntersectError::SharedLowestFactor);
    };
    let res = sylvester_resultant(&lf, &lg).map_err(|_| IntersectError::SharedLowestFactor)?;
    if res.is_zero() {
        return Err(IntersectError::SharedLowestFactor);
    }
    Ok(lf.degree() as u64 * lg.degree() as u64)
}

fn cplx(r: &Rational) -> Complex64 {
    Complex64::new(to_f64(r), 0.0)
}

/// `T^4 Px^2 Py^4 (Py Tx - Px Ty)` as its list of (factor, power).
fn certificate_factors(sys: &ScoreSystem) -> Vec<(BivarPoly, i32)> {
    let h = &(&sys.py * &sys.tx) - &(&sys.px * &sys.ty);
    vec![(sys.t.clone(), 4), (sys.px.clone(), 2), (sys.py.clone(), 4), (h, 1)]
}

/// `(value, absolute scale, power)` of each certificate factor at `(1, q2)`.
fn factor_values(sys: &ScoreSystem, q2: Complex64) -> Vec<(Complex64, f64, i32)> {
    let one = Complex64::new(1.0, 0.0);
    certificate_factors(sys)
        .into_iter()
        .map(|(h, e)| {
            let num = h.to_numeric();
            (num.eval(one, q2), num.abs_scale(one, q2), e)
        })
        .collect()
}

/// Normalized certificate value and the smallest relative factor magnitude.
/// The product vanishes exactly when one of its factors does, so the zero
/// test is applied to that ratio.
fn certificate_numeric(sys: &ScoreSystem, q2: Complex64) -> (Complex64, f64) {
    let mut value = Complex64::new(1.0, 0.0);
    let mut min_ratio = f64::INFINITY;
    for (v, scale, e) in factor_values(sys, q2) {
        let rel = if scale == 0.0 { Complex64::zero() } else { v / scale };
        value *= rel.powi(e);
        min_ratio = min_ratio.min(rel.norm());
    }
    (value, min_ratio)
}

fn certificate_exact(sys: &ScoreSystem, q2: &Rational) -> Rational {
    let one = Rational::from_integer(1.into());
    certificate_factors(sys)
        .into_iter()
        .fold(one.clone(), |acc, (h, e)| acc * num_traits::pow(h.eval(&one, q2), e as usize))
}

/// Multiplicity of `[1:q2:0]` in `F . G`, with the certificate value.
pub fn infinity_multiplicity(sys: &ScoreSystem, q2: Complex64) -> Result<(u32, Complex64), IntersectError> {
    let (value, ratio) = certificate_numeric(sys, q2);
    if !(ratio > CERTIFICATE_ZERO_THRESHOLD) {
        return Err(IntersectError::CertificateVanishes(q2));
    }
    Ok((2, value))
}

/// Rational root of `p1` near `z`, confirmed by exact evaluation.
fn exact_rational_root(p1: &crate::ratpoly::UnivarPoly, z: Complex64) -> Option<Rational> {
    if z.im.abs() > 1e-8 * (1.0 + z.re.abs()) {
        return None;
    }
    let lead = p1.primitive().leading()?.abs();
    let max_den = lead.to_integer().to_i64().unwrap_or(i64::MAX).clamp(1, 1 << 40);
    let r = best_rational(z.re, max_den)?;
    p1.eval(&r).is_zero().then_some(r)
}

/// The `n` points `[1:q2:0]` with `P(1, q2) = 0`, each with its certified
/// multiplicity.
pub fn points_at_infinity(sys: &ScoreSystem) -> Result<Vec<InfinityPoint>, IntersectError> {
    if sys.p.coeff(0, sys.n as u32).is_zero() {
        return Err(IntersectError::DetBZero);
    }
    let p1 = sys.p.dehomogenize_x();
    if p1.gcd(&p1.derivative()).degree() != Some(0) {
        return Err(IntersectError::RepeatedRoots);
    }
    let roots = numeric_roots(&p1)?;
    let mut out = Vec::with_capacity(roots.roots.len());
    for root in roots.roots {
        let point = match exact_rational_root(&p1, root.value) {
            Some(r) => {
                let value = certificate_exact(sys, &r);
                if value.is_zero() {
                    return Err(IntersectError::CertificateVanishes(cplx(&r)));
                }
                InfinityPoint {
                    q2: cplx(&r),
                    closed_form_value: certificate_numeric(sys, cplx(&r)).0,
                    closed_form_exact: Some(value),
                    multiplicity: 2,
                }
            }
            None => {
                let (multiplicity, value) = infinity_multiplicity(sys, root.value)?;
                InfinityPoint {
                    q2: root.value,
                    closed_form_value: value,
                    closed_form_exact: None,
                    multiplicity,
                }
            }
        };
        out.push(point);
    }
    out.sort_by(|a, b| a.q2.re.total_cmp(&b.q2.re).then(a.q2.im.total_cmp(&b.q2.im)));
    Ok(out)
}

/// Local data of a curve `H(1, y, z) = 0` at `(q2, 0)`, written as
/// `z = c1 (y - q2) + c2 (y - q2)^2 + ...`.
fn branch_coefficients(h: &BivarPoly, q2: Complex64) -> Option<(Complex64, Complex64)> {
    let top = h.degree()?;
    let one = Complex64::new(1.0, 0.0);
    let part = |k: u32| {
        if k > top {
            BivarPoly::zero()
        } else {
            h.homogeneous_part(top - k)
        }
    };
    // z^k multiplies the component of degree top - k
    let (h0, h1, h2) = (part(0), part(1), part(2));
    let s = h1.to_numeric().abs_scale(one, q2);
    if s == 0.0 {
        return None;
    }
    // c1 and c2 are invariant under scaling h, which keeps the cubes finite
    let at = |p: &BivarPoly| p.eval_complex(one, q2) / s;
    let hy = at(&h0.partial(Var::Y));
    let hyy = at(&h0.partial(Var::Y).partial(Var::Y));
    let hz = at(&h1);
    let hyz = at(&h1.partial(Var::Y));
    let hzz = at(&h2) * 2.0;
    if hz.norm() <= 1e-12 {
        return None;
    }
    let c1 = -hy / hz;
    let c2 = (-hyy * hz * hz + hyz * hy * hz * 2.0 - hzz * hy * hy) / (hz.powi(3) * 2.0);
    Some((c1, c2))
}

/// Branch expansions of `F` and `G` at `[1:q2:0]`: returns `(a1, b1, a2 - b2)`.
pub fn series_cross_check(
    sys: &ScoreSystem,
    q2: Complex64,
) -> Result<(Complex64, Complex64, Complex64), IntersectError> {
    let (a1, a2) = branch_coefficients(&sys.f, q2).ok_or(IntersectError::FzVanishes(q2))?;
    let (b1, b2) = branch_coefficients(&sys.g, q2).ok_or(IntersectError::GzVanishes(q2))?;
    Ok((a1, b1, a2 - b2))
}

/// Both multiplicity certificates at one point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPathCheck {
    /// Normalized closed-form value.
    pub product: Complex64,
    pub product_nonzero: bool,
    pub a1_minus_b1: Complex64,
    pub a2_minus_b2: Complex64,
    pub series_nonzero: bool,
    /// `(a2 - b2) T^6 Px^3 Py^3` divided by the closed-form product, which
    /// is identically one where both are defined.
    pub series_ratio: Complex64,
}

impl DualPathCheck {
    /// Zero flags agree and, when nonzero, the two values agree to `rel_tol`.
    pub fn agrees(&self, rel_tol: f64) -> bool {
        if self.product_nonzero != self.series_nonzero {
            return false;
        }
        !self.product_nonzero || (self.series_ratio - 1.0).norm() <= rel_tol
    }
}

pub fn dual_path_check(sys: &ScoreSystem, q2: Complex64) -> Result<DualPathCheck, IntersectError> {
    let (product, ratio) = certificate_numeric(sys, q2);
    let (a1, b1, diff) = series_cross_check(sys, q2)?;
    let (_, a2) = branch_coefficients(&sys.f, q2).expect("checked above");
    let (_, b2) = branch_coefficients(&sys.g, q2).expect("checked above");
    let series_scale = a2.norm().max(b2.norm());

    // (a2 - b2) T^2 Px / (Py H), with every factor normalized by its scale
    let fv = factor_values(sys, q2);
    let [(t, st, _), (px, spx, _), (py, spy, _), (h, sh, _)] = fv[..] else {
        unreachable!("four certificate factors")
    };
    let log_scale = 2.0 * st.ln() + spx.ln() - spy.ln() - sh.ln();
    let rel = (t / st).powi(2) * (px / spx) / ((py / spy) * (h / sh));
    let series_ratio = diff * rel * log_scale.exp();
    Ok(DualPathCheck {
        product,
        product_nonzero: ratio > CERTIFICATE_ZERO_THRESHOLD,
        a1_minus_b1: a1 - b1,
        a2_minus_b2: diff,
        series_nonzero: diff.norm() > CERTIFICATE_ZERO_THRESHOLD * series_scale,
        series_ratio,
    })
}

/// Full budget `(2n-1)^2 = origin + infinity + affine`.
pub fn decompose(sys: &ScoreSystem, cert: &GenericityCertificate) -> Result<BezoutDecomposition, IntersectError> {
    if !cert.verdict {
        return Err(IntersectError::GenericityRequired(
            cert.failures().into_iter().map(String::from).collect(),
        ));
    }
    let n = sys.n;
    let total = ((2 * n - 1) * (2 * n - 1)) as i64;
    let origin = origin_multiplicity(sys)? as i64;
    let infinity_points = points_at_infinity(sys)?;
    let infinity_total: i64 = infinity_points.iter().map(|p| p.multiplicity as i64).sum();
    Ok(BezoutDecomposition {
        n,
        total,
        origin,
        infinity_total,
        affine_off_origin: total - origin - infinity_total,
        infinity_points,
    })
}
