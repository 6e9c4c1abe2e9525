//! Selection of the maximum likelihood estimate among the critical points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genericity::{certify, GenericityCertificate};
use crate::pencil::{build_score_system, is_positive_definite, loglik, Pencil, PencilError, ScoreSystem};
use crate::solver::{newton_refine, solve_model, SolutionSet, SolverError, DEFAULT_TOLERANCE};

/// Objective values closer than this are treated as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MleError {
    #[error("genericity certificate failed: {0:?}")]
    GenericityRequired(Vec<String>),
    #[error("none of the {real} real critical points gives a positive definite covariance")]
    NoFeasibleCriticalPoint { real: usize },
    #[error(transparent)]
    Solver(SolverError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
}

impl From<SolverError> for MleError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::GenericityRequired(names) => MleError::GenericityRequired(names),
            other => MleError::Solver(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    pub x: f64,
    pub y: f64,
    pub sigma_hat: Vec<Vec<f64>>,
    pub loglik_tilde: f64,
    pub candidates_considered: usize,
    pub feasible_candidates: usize,
}

/// Minimizer of the reduced objective over the real critical points with
/// positive definite covariance. Ties go to the lexicographically smaller
/// `(x, y)`.
pub fn compute_mle(pencil: &Pencil, sys: &ScoreSystem, sols: &SolutionSet) -> Result<MleResult, MleError> {
    let mut considered = 0;
    let mut feasible: Vec<(f64, f64, f64)> = Vec::new();
    for p in sols.real_points() {
        considered += 1;
        let p = if p.multiplicity == 1 { newton_refine(sys, p) } else { p.clone() };
        let (x, y) = (p.x.re, p.y.re);
        if !is_positive_definite(pencil, x, y) {
            continue;
        }
        feasible.push((x, y, loglik(pencil, x, y)?));
    }
    let best = feasible
        .iter()
        .copied()
        .reduce(|a, b| {
            if (a.2 - b.2).abs() <= TIE_TOLERANCE * (1.0 + a.2.abs()) {
                if (b.0, b.1) < (a.0, a.1) {
                    b
                } else {
                    a
                }
            } else if b.2 < a.2 {
                b
            } else {
                a
            }
        })
        .ok_or(MleError::NoFeasibleCriticalPoint { real: considered })?;
    let sigma = pencil.sigma_f64(best.0, best.1);
    let n = pencil.n();
    Ok(MleResult {
        x: best.0,
        y: best.1,
        sigma_hat: (0..n).map(|i| (0..n).map(|j| sigma[(i, j)]).collect()).collect(),
        loglik_tilde: best.2,
        candidates_considered: considered,
        feasible_candidates: feasible.len(),
    })
}

/// Everything the full pipeline produces for one pencil.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub system: ScoreSystem,
    pub certificate: GenericityCertificate,
    pub solutions: SolutionSet,
    pub mle: MleResult,
}

/// Score system, certificate, critical points and the estimate.
pub fn estimate(pencil: &Pencil) -> Result<Estimate, MleError> {
    let system = build_score_system(pencil)?;
    let certificate = certify(&system);
    if !certificate.verdict {
        return Err(MleError::GenericityRequired(
            certificate.failures().into_iter().map(String::from).collect(),
        ));
    }
    let solutions = solve_model(pencil, &system, &certificate, DEFAULT_TOLERANCE)?;
    let mle = compute_mle(pencil, &system, &solutions)?;
    Ok(Estimate {
        system,
        certificate,
        solutions,
        mle,
    })
}

/// Value of both score components at a real point, relative to the scale
/// of the terms that make them up.
pub fn relative_score(sys: &ScoreSystem, x: f64, y: f64) -> f64 {
    let num = sys.numeric();
    let (x, y) = (Complex64::new(x, 0.0), Complex64::new(y, 0.0));
    crate::solver::normalized_residual(&num.f, &num.g, x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::SymMatrix;
    use crate::ratpoly::Rational;

    fn example_one() -> Pencil {
        Pencil::new(
            SymMatrix::from_ints(&[&[5, 1, 0], &[1, 3, -2], &[0, -2, 6]]).unwrap(),
            SymMatrix::from_ints(&[&[1, -1, 0], &[-1, 6, -2], &[0, -2, 1]]).unwrap(),
            SymMatrix::from_ints(&[&[1, 2, -2], &[2, 6, -7], &[-2, -7, 9]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn example_one_estimate() {
        let est = estimate(&example_one()).unwrap();
        let want = [
            [3.6257, 0.5124, 0.0],
            [0.5124, 3.1329, -1.7340],
            [0.0, -1.7340, 4.3154],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((est.mle.sigma_hat[i][j] - want[i][j]).abs() < 1e-4, "{i},{j}");
            }
        }
        assert!((est.mle.x - 0.6897).abs() < 5e-5 && (est.mle.y - 0.1773).abs() < 5e-5);
        assert_eq!((est.mle.candidates_considered, est.mle.feasible_candidates), (1, 1));
        assert!(relative_score(&est.system, est.mle.x, est.mle.y) < 1e-8);
    }

    #[test]
    fn grid_neighbours_are_not_better() {
        let pencil = example_one();
        let m = estimate(&pencil).unwrap().mle;
        let h = 1e-3;
        for k in 0..8 {
            let a = std::f64::consts::TAU * k as f64 / 8.0;
            let (x, y) = (m.x + h * a.cos(), m.y + h * a.sin());
            if is_positive_definite(&pencil, x, y) {
                assert!(m.loglik_tilde <= loglik(&pencil, x, y).unwrap());
            }
        }
    }

    #[test]
    fn two_by_two_estimate_is_identity() {
        let pencil = Pencil::new(
            SymMatrix::identity(2),
            SymMatrix::diagonal(vec![Rational::from_integer(1.into()), Rational::from_integer(2.into())]),
            SymMatrix::identity(2),
        )
        .unwrap();
        let m = estimate(&pencil).unwrap().mle;
        assert!((m.x - 1.0).abs() < 1e-12 && m.y.abs() < 1e-12);
        assert!((m.sigma_hat[0][0] - 1.0).abs() < 1e-12 && m.sigma_hat[0][1].abs() < 1e-12);
        assert!((m.sigma_hat[1][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_matrices_propagate_genericity_failure() {
        let a = SymMatrix::from_ints(&[&[2, 1], &[1, 3]]).unwrap();
        let pencil = Pencil::new(a.clone(), a, SymMatrix::identity(2)).unwrap();
        assert!(matches!(estimate(&pencil), Err(MleError::GenericityRequired(_))));
    }

    #[test]
    fn no_positive_definite_candidate() {
        let pencil = example_one();
        let sys = build_score_system(&pencil).unwrap();
        let mut sols = solve_model(&pencil, &sys, &certify(&sys), DEFAULT_TOLERANCE).unwrap();
        sols.points.retain(|p| !p.is_real);
        assert_eq!(
            compute_mle(&pencil, &sys, &sols).unwrap_err(),
            MleError::NoFeasibleCriticalPoint { real: 0 }
        );
    }
}
