//! The machine-readable report written by `--json`.

use std::collections::BTreeMap;

use covdeg_core::genericity::GenericityCertificate;
use covdeg_core::intersect::BezoutDecomposition;
use covdeg_core::mle::MleResult;
use covdeg_core::solver::CriticalPoint;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Stages that were not run are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub certificate: Option<GenericityCertificate>,
    pub decomposition: Option<BezoutDecomposition>,
    pub solutions: Option<Vec<CriticalPoint>>,
    pub mle: Option<MleResult>,
    pub meta: Meta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub tolerance: f64,
    pub solver: Option<SolverSummary>,
    /// Wall-clock milliseconds per stage; the only nondeterministic field.
    pub timings_ms: BTreeMap<String, f64>,
    /// The model as parsed, with `S` explicit.
    pub model: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub ml_degree: u64,
    pub real_points: usize,
    pub origin_excess: u64,
    pub shear: i64,
}

impl Report {
    pub fn new(command: &str, tolerance: f64, model: Value) -> Self {
        Self {
            certificate: None,
            decomposition: None,
            solutions: None,
            mle: None,
            meta: Meta {
                version: env!("CARGO_PKG_VERSION").to_string(),
                command: command.to_string(),
                seed: None,
                tolerance,
                solver: None,
                timings_ms: BTreeMap::new(),
                model,
            },
        }
    }
}
