//! Per-instance genericity certificate.
//!
//! Every generic hypothesis behind the degree count is an emptiness
//! statement `V(p, q) = {}` in the projective line, which holds exactly when
//! the resultant of the two binary forms is nonzero. The certificate lists
//! those resultants for one concrete `(A, B, S)`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::pencil::{Pencil, ScoreSystem, SymMatrix};
use crate::ratpoly::{serde_rational, sylvester_resultant, BinaryForm, BivarPoly, Rational};

pub const CHECK_NAMES: [&str; 12] = [
    "Res(P,Px)",
    "Res(P,Py)",
    "Res(P,T)",
    "Res(Px,Py)",
    "Res(Px,Tx)",
    "Res(Py,Ty)",
    "Res(T,Tx)",
    "Res(T,Ty)",
    "Res(Q,R)",
    "Res(P,PyTx-PxTy)",
    "disc(P)",
    "detB_nonzero",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub nonzero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityCertificate {
    pub checks: Vec<Check>,
    pub verdict: bool,
}

impl GenericityCertificate {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Names of the checks whose value vanished.
    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.nonzero)
            .map(|c| c.name.as_str())
            .collect()
    }
}

fn form(p: &BivarPoly, degree: usize) -> BinaryForm {
    BinaryForm::from_poly(p, degree as u32).expect("score system polynomials are homogeneous")
}

/// A vanishing form yields the value zero rather than an error.
fn res(p: &BinaryForm, q: &BinaryForm) -> Rational {
    sylvester_resultant(p, q).unwrap_or_else(|_| Rational::zero())
}

/// Computes every resultant of the certificate exactly.
pub fn certify(sys: &ScoreSystem) -> GenericityCertificate {
    let n = sys.n;
    let p = form(&sys.p, n);
    let px = form(&sys.px, n - 1);
    let py = form(&sys.py, n - 1);
    let t = form(&sys.t, n - 1);
    let tx = form(&sys.tx, n - 2);
    let ty = form(&sys.ty, n - 2);
    let q = form(&sys.q, 2 * n - 2);
    let r = form(&sys.r, 2 * n - 2);
    let h = &(&sys.py * &sys.tx) - &(&sys.px * &sys.ty);
    let h = form(&h, 2 * n - 3);

    let res_p_px = res(&p, &px);
    let det_b = sys.p.coeff(0, n as u32);
    let values = [
        res_p_px.clone(),
        res(&p, &py),
        res(&p, &t),
        res(&px, &py),
        res(&px, &tx),
        res(&py, &ty),
        res(&t, &tx),
        res(&t, &ty),
        res(&q, &r),
        res(&p, &h),
        res_p_px,
        det_b,
    ];
    let checks: Vec<Check> = CHECK_NAMES
        .iter()
        .zip(values)
        .map(|(name, value)| Check {
            name: (*name).to_string(),
            nonzero: !value.is_zero(),
            value,
        })
        .collect();
    let verdict = checks.iter().all(|c| c.nonzero);
    GenericityCertificate { checks, verdict }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessFamily {
    /// `S = u u^T` with `u` all ones, so that `T = Px`.
    AllOnes,
    /// `S = e1 e1^T`, so that `T = prod_{k != 1} (x + k y)`.
    FirstBasis,
}

/// `A = I`, `B = diag(1..n)` with the sample matrix of the given family.
pub fn witness_pencil(n: usize, family: WitnessFamily) -> Pencil {
    let u: Vec<Rational> = (0..n)
        .map(|i| match family {
            WitnessFamily::AllOnes => Rational::one(),
            WitnessFamily::FirstBasis if i == 0 => Rational::one(),
            WitnessFamily::FirstBasis => Rational::zero(),
        })
        .collect();
    Pencil::new(
        SymMatrix::identity(n),
        SymMatrix::diagonal((1..=n as i64).map(|k| Rational::from_integer(k.into())).collect()),
        SymMatrix::outer(&u),
    )
    .expect("witness dimensions agree")
}

/// A diagonal witness with the outcomes its construction guarantees.
#[derive(Debug, Clone)]
pub struct Witness {
    pub n: usize,
    pub family: WitnessFamily,
    pub pencil: Pencil,
    pub expected_verdict: bool,
    pub expected_nonzero: Vec<&'static str>,
    pub expected_zero: Vec<&'static str>,
}

/// Both diagonal witness families for `n = 2..=8`.
///
/// The all-ones family satisfies every check. The first-basis family is
/// only a witness for the checks involving `Tx`, `Ty`; there `T` divides
/// `P`, so `Res(P,T)`, `Res(Q,R)` and `Res(P, PyTx - PxTy)` vanish.
pub fn is_generic_witness_suite() -> Vec<Witness> {
    let mut out = Vec::new();
    for n in 2..=8 {
        out.push(Witness {
            n,
            family: WitnessFamily::AllOnes,
            pencil: witness_pencil(n, WitnessFamily::AllOnes),
            expected_verdict: true,
            expected_nonzero: CHECK_NAMES.to_vec(),
            expected_zero: Vec::new(),
        });
        out.push(Witness {
            n,
            family: WitnessFamily::FirstBasis,
            pencil: witness_pencil(n, WitnessFamily::FirstBasis),
            expected_verdict: false,
            expected_nonzero: vec![
                "Res(P,Px)",
                "Res(P,Py)",
                "Res(Px,Py)",
                "Res(Px,Tx)",
                "Res(Py,Ty)",
                "Res(T,Tx)",
                "Res(T,Ty)",
                "disc(P)",
                "detB_nonzero",
            ],
            expected_zero: vec!["Res(P,T)", "Res(Q,R)", "Res(P,PyTx-PxTy)"],
        });
    }
    out
}
