//! Command-line front end: model files, reports and random sweeps.

pub mod app;
pub mod error;
pub mod model;
pub mod report;
pub mod sweep;

pub use app::run;
pub use error::CliError;
pub use model::{load_model, model_json, parse_model};
pub use report::Report;
