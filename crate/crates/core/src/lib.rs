//! Maximum likelihood degree certificates for two-dimensional linear
//! Gaussian covariance models `Sigma = x A + y B`.
//!
//! The pipeline builds the exact score polynomials `f`, `g` from a pencil,
//! certifies the genericity conditions with resultants, splits the Bezout
//! number `(2n-1)^2` into origin, infinity and affine contributions, solves
//! the system by exact elimination, and picks the maximum likelihood
//! estimate among the real critical points.

pub mod genericity;
pub mod intersect;
pub mod mle;
pub mod pencil;
pub mod ratpoly;
pub mod solver;

pub use pencil::{build_score_system, Pencil, ScoreSystem, SymMatrix};
pub use genericity::{certify, GenericityCertificate};
pub use intersect::{decompose, BezoutDecomposition, InfinityPoint};
pub use mle::{compute_mle, estimate, MleResult};
pub use solver::{solve, CriticalPoint, SolutionSet};
pub use ratpoly::{BivarPoly, Rational};
