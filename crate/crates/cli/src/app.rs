use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use covdeg_core::genericity::{certify, witness_pencil, WitnessFamily};
use covdeg_core::intersect::{decompose, IntersectError};
use covdeg_core::mle::{compute_mle, MleError};
use covdeg_core::pencil::{build_score_system, Pencil, PencilError};
use covdeg_core::ratpoly::Rational;
use covdeg_core::solver::{solve_model, SolverError, DEFAULT_TOLERANCE};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::model::{load_model, model_json};
use crate::report::{Report, SolverSummary};
use crate::sweep::{run_sweep, SweepConfig, SweepReport};

#[derive(Debug, Parser)]
#[command(name = "covdeg", version, about = "ML-degree certificates for two-dimensional linear Gaussian covariance models")]
struct Cli {
    /// Write the machine-readable report to PATH (`-` for stdout) and print
    /// errors as JSON on stderr.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Largest normalized |f| for a lifted y to count as a partner of an
    /// x-root in the solver.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Suppress the human-readable output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact genericity certificate.
    Certify { model: PathBuf },
    /// Certificate and the intersection count at origin, infinity and the
    /// affine part.
    Decompose { model: PathBuf },
    /// Certificate, decomposition and all critical points.
    Solve { model: PathBuf },
    /// The full pipeline up to the maximum likelihood estimate.
    Mle { model: PathBuf },
    /// Confirm the ML-degree on random integer pencils.
    Sweep {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long, env = "COVDEG_JOBS")]
        jobs: Option<usize>,
    },
    /// Print a diagonal witness model.
    Witness {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Family::AllOnes)]
        family: Family,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// `S` all ones.
    AllOnes,
    /// `S = e1 e1^T`.
    E1,
}

impl From<Family> for WitnessFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::AllOnes => WitnessFamily::AllOnes,
            Family::E1 => WitnessFamily::FirstBasis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Stage {
    Certify,
    Decompose,
    Solve,
    Mle,
}

struct Output<'a> {
    out: &'a mut dyn Write,
    quiet: bool,
}

impl Output<'_> {
    fn line(&mut self, s: impl AsRef<str>) {
        if !self.quiet {
            let _ = writeln!(self.out, "{}", s.as_ref());
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let json_errors = cli.json.is_some();
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            if json_errors {
                let _ = writeln!(err, "{}", e.to_json());
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    let mut o = Output { out, quiet: cli.quiet };
    match &cli.command {
        Command::Certify { model } => analyze(cli, &mut o, model, Stage::Certify),
        Command::Decompose { model } => analyze(cli, &mut o, model, Stage::Decompose),
        Command::Solve { model } => analyze(cli, &mut o, model, Stage::Solve),
        Command::Mle { model } => analyze(cli, &mut o, model, Stage::Mle),
        Command::Sweep {
            n_min,
            n_max,
            trials,
            seed,
            jobs,
        } => {
            let jobs = jobs
                .filter(|&j| j > 0)
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let cfg = SweepConfig {
                n_min: *n_min,
                n_max: *n_max,
                trials: *trials,
                seed: *seed,
                jobs,
                tol: cli.tol,
            };
            let start = Instant::now();
            let report = run_sweep(&cfg)?;
            let ms = elapsed_ms(start);
            print_sweep(&mut o, &report, ms);
            if let Some(path) = &cli.json {
                let doc = json!({
                    "sweep": report,
                    "meta": {
                        "version": env!("CARGO_PKG_VERSION"),
                        "command": "sweep",
                        "seed": seed,
                        "tolerance": cli.tol,
                        "timings_ms": { "sweep": ms },
                    },
                });
                write_json(path, &doc, o.out)?;
            }
            match report.failed() {
                0 => Ok(()),
                failed => Err(CliError::SweepFailed { failed }),
            }
        }
        Command::Witness { n, family } => {
            if *n < 2 {
                return Err(CliError::Usage(format!("--n must be at least 2, got {n}")));
            }
            let model = model_json(&witness_pencil(*n, (*family).into()));
            o.line(serde_json::to_string_pretty(&model).expect("JSON values serialize"));
            if let Some(path) = &cli.json {
                write_json(path, &model, o.out)?;
            }
            Ok(())
        }
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn write_json<T: Serialize>(path: &Path, value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if path == Path::new("-") {
        out.write_all(text.as_bytes()).map_err(io)
    } else {
        std::fs::write(path, text).map_err(io)
    }
}

fn analyze(cli: &Cli, o: &mut Output, path: &Path, last: Stage) -> Result<(), CliError> {
    let start = Instant::now();
    let pencil = load_model(path)?;
    let command = match last {
        Stage::Certify => "certify",
        Stage::Decompose => "decompose",
        Stage::Solve => "solve",
        Stage::Mle => "mle",
    };
    let mut report = Report::new(command, cli.tol, model_json(&pencil));
    report.meta.timings_ms.insert("load".into(), elapsed_ms(start));
    let result = pipeline(&pencil, cli.tol, last, &mut report, o);
    if let Some(json) = &cli.json {
        write_json(json, &report, o.out)?;
    }
    result
}

fn pipeline(pencil: &Pencil, tol: f64, last: Stage, report: &mut Report, o: &mut Output) -> Result<(), CliError> {
    let n = pencil.n();
    o.line(format!("model: n = {n}"));

    let start = Instant::now();
    let system = build_score_system(pencil).map_err(|e| match e {
        PencilError::DegenerateDegrees { .. } => CliError::Genericity {
            failed: vec![e.to_string()],
        },
        other => CliError::Model {
            field: "model".into(),
            source: other,
        },
    })?;
    let cert = certify(&system);
    report.meta.timings_ms.insert("certify".into(), elapsed_ms(start));
    o.line("genericity certificate:");
    for c in &cert.checks {
        let state = if c.nonzero { "nonzero" } else { "ZERO" };
        o.line(format!("  {:<18} {:<8} {}", c.name, state, approx(&c.value)));
    }
    o.line(format!("  verdict: {}", if cert.verdict { "generic" } else { "NOT generic" }));
    report.certificate = Some(cert.clone());
    if !cert.verdict {
        return Err(CliError::Genericity {
            failed: cert.failures().into_iter().map(String::from).collect(),
        });
    }
    if last == Stage::Certify {
        return Ok(());
    }

    let start = Instant::now();
    let decomposition = decompose(&system, &cert).map_err(|e| match e {
        IntersectError::GenericityRequired(failed) => CliError::Genericity { failed },
        IntersectError::Poly(p) => CliError::Solver(p.to_string()),
        other => CliError::Genericity {
            failed: vec![other.to_string()],
        },
    })?;
    report.meta.timings_ms.insert("decompose".into(), elapsed_ms(start));
    o.line(format!(
        "intersection count: {} = {} (origin) + {} (infinity) + {} (affine)",
        decomposition.total, decomposition.origin, decomposition.infinity_total, decomposition.affine_off_origin
    ));
    for p in &decomposition.infinity_points {
        o.line(format!(
            "  [1 : {} : 0]  multiplicity {}",
            complex(p.q2.re, p.q2.im),
            p.multiplicity
        ));
    }
    report.decomposition = Some(decomposition);
    if last == Stage::Decompose {
        return Ok(());
    }

    let start = Instant::now();
    let sols = solve_model(pencil, &system, &cert, tol).map_err(|e| match e {
        SolverError::GenericityRequired(failed) => CliError::Genericity { failed },
        other => CliError::Solver(other.to_string()),
    })?;
    report.meta.timings_ms.insert("solve".into(), elapsed_ms(start));
    let real = sols.real_points().count();
    o.line(format!(
        "critical points: {} off the origin ({} real)",
        sols.ml_degree_observed, real
    ));
    for p in &sols.points {
        let tag = match (p.is_real, p.is_pd) {
            (true, true) => "real, positive definite",
            (true, false) => "real",
            _ => "complex",
        };
        o.line(format!(
            "  x = {}  y = {}  mult {}  residual {:.1e}  {tag}",
            complex(p.x.re, p.x.im),
            complex(p.y.re, p.y.im),
            p.multiplicity,
            p.residual
        ));
    }
    report.meta.solver = Some(SolverSummary {
        ml_degree: sols.ml_degree_observed,
        real_points: real,
        origin_excess: sols.origin_excess,
        shear: sols.shear,
    });
    report.solutions = Some(sols.points.clone());
    if last == Stage::Solve {
        return Ok(());
    }

    let start = Instant::now();
    let mle = compute_mle(pencil, &system, &sols).map_err(|e| match e {
        MleError::NoFeasibleCriticalPoint { real } => CliError::NoFeasible { real },
        MleError::GenericityRequired(failed) => CliError::Genericity { failed },
        other => CliError::Solver(other.to_string()),
    })?;
    report.meta.timings_ms.insert("mle".into(), elapsed_ms(start));
    o.line(format!(
        "maximum likelihood estimate: x = {:.6}, y = {:.6} ({} of {} real points feasible)",
        mle.x, mle.y, mle.feasible_candidates, mle.candidates_considered
    ));
    o.line(format!("  reduced objective {:.10}", mle.loglik_tilde));
    o.line("  Sigma_hat =");
    for row in &mle.sigma_hat {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>10.4}")).collect();
        o.line(format!("   {}", cells.join(" ")));
    }
    report.mle = Some(mle);
    Ok(())
}

fn print_sweep(o: &mut Output, r: &SweepReport, ms: f64) {
    o.line(format!("sweep: n = {}..{}, {} trials each, seed {}", r.n_min, r.n_max, r.trials, r.seed));
    for s in &r.sizes {
        o.line(format!(
            "  n = {}  expected {:>2}  confirmed {:>3}/{}  inconclusive {}  failed {}  re-draws {}",
            s.n, s.expected, s.confirmed, s.trials, s.inconclusive, s.failed, s.redraws
        ));
    }
    for e in &r.exceptions {
        o.line(format!(
            "  n = {} trial {}: {:?} {}",
            e.n,
            e.trial,
            e.status,
            e.detail.as_deref().unwrap_or("")
        ));
    }
    let confirmed: usize = r.sizes.iter().map(|s| s.confirmed).sum();
    let total: usize = r.sizes.iter().map(|s| s.trials).sum();
    o.line(format!("confirmed {confirmed} of {total} trials in {:.1} s", ms / 1e3));
}

fn complex(re: f64, im: f64) -> String {
    if im.abs() <= 1e-12 * (1.0 + re.abs()) {
        format!("{re:.6}")
    } else {
        format!("{re:.6}{}{:.6}i", if im < 0.0 { "-" } else { "+" }, im.abs())
    }
}

/// Short display of a possibly huge rational: exact when short, otherwise
/// a six-digit scientific approximation.
fn approx(r: &Rational) -> String {
    let exact = r.to_string();
    if exact.len() <= 24 {
        return exact;
    }
    let lead = |v: &BigInt| {
        let digits = v.magnitude().to_string();
        let head: f64 = digits[..digits.len().min(17)].parse().unwrap_or(0.0);
        (head / 10f64.powi(digits.len().min(17) as i32 - 1), digits.len() as i64 - 1)
    };
    let (nm, ne) = lead(r.numer());
    let (dm, de) = lead(r.denom());
    let (mut m, mut e) = (nm / dm, ne - de);
    if m < 1.0 {
        m *= 10.0;
        e -= 1;
    }
    let sign = if r.numer().sign() == num_bigint::Sign::Minus { "-" } else { "" };
    format!("{sign}{m:.6}e{e}")
}
