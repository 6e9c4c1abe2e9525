use covdeg_core::pencil::PencilError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{context}: {message}")]
    Parse { context: String, message: String },
    #[error("{field}: {source}")]
    Model { field: String, source: PencilError },
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("genericity certificate failed: {}", .failed.join(", "))]
    Genericity { failed: Vec<String> },
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("no feasible maximum likelihood estimate: none of the {real} real critical points is positive definite")]
    NoFeasible { real: usize },
    #[error("{failed} sweep trial(s) did not confirm the expected ML-degree")]
    SweepFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Model { .. } | CliError::Usage(_) => 1,
            CliError::Genericity { .. } => 2,
            CliError::Solver(_) | CliError::SweepFailed { .. } => 3,
            CliError::NoFeasible { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Model { source, .. } => match source {
                PencilError::AsymmetricMatrix { .. } => "asymmetric_matrix",
                PencilError::DimensionMismatch { .. } => "dimension_mismatch",
                _ => "invalid_model",
            },
            CliError::Usage(_) => "usage",
            CliError::Genericity { .. } => "genericity",
            CliError::Solver(_) => "solver",
            CliError::NoFeasible { .. } => "no_feasible_mle",
            CliError::SweepFailed { .. } => "sweep_failed",
        }
    }

    /// The structured form written to stderr under `--json`.
    pub fn to_json(&self) -> Value {
        let mut details = json!({});
        match self {
            CliError::Io { path, .. } => details = json!({ "path": path }),
            CliError::Parse { context, .. } => details = json!({ "context": context }),
            CliError::Model { field, source } => {
                details = json!({ "field": field });
                match source {
                    PencilError::AsymmetricMatrix { row, col } => {
                        details["entry"] = json!([row, col]);
                        details["mirror"] = json!([col, row]);
                    }
                    PencilError::DimensionMismatch { expected, found } => {
                        details["expected"] = json!(expected);
                        details["found"] = json!(found);
                    }
                    _ => {}
                }
            }
            CliError::Genericity { failed } => details = json!({ "failed_checks": failed }),
            CliError::NoFeasible { real } => details = json!({ "real_critical_points": real }),
            CliError::SweepFailed { failed } => details = json!({ "failed_trials": failed }),
            CliError::Usage(_) | CliError::Solver(_) => {}
        }
        json!({
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
                "details": details,
            }
        })
    }
}
