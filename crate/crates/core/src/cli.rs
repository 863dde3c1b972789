//! Command-line frontend. [`run`] parses arguments, dispatches, writes output
//! and returns the process exit code: 0 on success, 1 on usage or numerical
//! failure, 2 when an unconditional check is violated.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::basis::OperatorParams;
use crate::catalog::{durrmeyer_coeffs, profile, ConvolutionKernel, Grid, OperatorDescriptor, ProfileRow};
use crate::error::{Error, Result};
use crate::formats::{format_float, parse_report_json, parse_shape_list, write_profile_csv, ReportDocument, RunManifest};
use crate::legendre::{
    crossover_t, legendre_p, log_derivative, poly_upper_2_16, poly_upper_2_17, ratio_lower_bound,
    ratio_upper_2_11, ratio_upper_2_14, ratio_upper_2_15,
};
use crate::multivariate::{
    axial_convexity_scan, equivalence_check, full_convexity_findings, r_n, r_n_reduction, SimplexPoint,
};
use crate::report::{Location, ViolationReport};
use crate::verifier::{relative_margin, run_suite, scan_durrmeyer_convexity, ScanConfig, SuiteReport, SuiteSelector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Tolerance for the `R_n` reduction identity.
const REDUCTION_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "kernel-entropy",
    version,
    about = "Kernel energy, variance and quadratic entropies of positive linear operators",
    long_about = "Computes S(x) = sum of squared basis weights, the variance V(x), the Rényi \
                  entropy -log S and the Tsallis entropy 1 - S for Bernstein, Szász-Mirakjan, \
                  Baskakov-type and related operators, and verifies a registry of analytic \
                  inequalities and conjectures about them.\n\n\
                  Exit status: 0 success, 1 usage or numerical failure, 2 an unconditional \
                  check was violated."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate S, V and both entropies over a grid (CSV or JSON)
    Entropy(EntropyArgs),
    /// Run registered inequality and conjecture checks (JSON report)
    Verify(VerifyArgs),
    /// Exact Durrmeyer coefficients c_{n,k} and their second differences
    Durrmeyer(DurrmeyerArgs),
    /// Legendre ratio and polynomial bounds, or the crossover point t*
    Legendre(LegendreArgs),
    /// Simplex scans of R_n and the square-grid equivalence check (JSON report)
    Multivariate(MultivariateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Family {
    Bernstein,
    Szasz,
    Baskakov,
    Kantorovich,
    GaussWeierstrass,
    UniformConvolution,
    PostWidder,
    Durrmeyer,
    GenuineBd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args, Serialize)]
struct Output {
    /// Write to this file instead of standard output
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Manifest path for CSV output [default: <output>.manifest.json, or standard error]
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct EntropyArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Degree n (all families except gauss-weierstrass and uniform-convolution)
    #[arg(long)]
    n: Option<u32>,
    /// Shape parameter c for --family baskakov (-1 or >= 0)
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Parameter r > 0 for --family gauss-weierstrass
    #[arg(long)]
    r: Option<f64>,
    /// Kernel width for --family uniform-convolution
    #[arg(long)]
    width: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    x_max: f64,
    /// Number of grid points, endpoints included
    #[arg(long, default_value_t = 101)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    /// `all` or a comma-separated list of check ids
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 1)]
    n_min: u32,
    #[arg(long, default_value_t = 30)]
    n_max: u32,
    /// Shape parameters for the log-convexity and synchronicity scans
    #[arg(long = "c", default_value = "-1,0,1", allow_hyphen_values = true)]
    c_values: String,
    #[arg(long, default_value_t = 129)]
    grid_points: usize,
    /// Right end of the x window for families on [0, inf)
    #[arg(long, default_value_t = 4.0)]
    x_max: f64,
    /// Right end of the x window for the Szász and Bessel bounds
    #[arg(long, default_value_t = 20.0)]
    bound_x_max: f64,
    /// Right end of the Legendre window [1, t_max]
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    /// Relative tolerance; smaller margins are failures
    #[arg(long, default_value_t = 1e-9)]
    hard_tol: f64,
    #[arg(long, default_value_t = 40)]
    durrmeyer_n_max: u32,
    #[arg(long, default_value_t = 15)]
    multivariate_n_max: u32,
    #[arg(long, default_value_t = 0.0625)]
    multivariate_step: f64,
    /// Re-check a saved report instead of running checks; the exit status
    /// follows the report's contents
    #[arg(long)]
    replay: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct DurrmeyerArgs {
    #[arg(long)]
    n: u32,
    /// Also scan convexity of the coefficient sequences for every degree up to n
    #[arg(long)]
    check_convexity: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args, Serialize)]
struct LegendreArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 1.0)]
    t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// Print only the crossover point t* of the two ratio bounds
    #[arg(long)]
    crossover: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MultivariateCheck {
    /// Convexity of R_n along lines parallel to the sides of the triangle
    Axial,
    /// Agreement of the three convexity criteria for Q_n on the unit square
    Equivalence,
    /// R_n against its one-variable reduction
    Reduction,
    /// Full Hessian of R_n (informational)
    Full,
}

#[derive(Debug, Args, Serialize)]
struct MultivariateArgs {
    #[arg(long)]
    n: u32,
    /// Grid step; 1/step must be an integer
    #[arg(long, default_value_t = 0.0625)]
    step: f64,
    #[arg(long, value_enum, default_value_t = MultivariateCheck::Axial)]
    check: MultivariateCheck,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    let start = Instant::now();
    match command {
        Command::Entropy(a) => cmd_entropy(a, start),
        Command::Verify(a) => cmd_verify(a, start),
        Command::Durrmeyer(a) => cmd_durrmeyer(a, start),
        Command::Legendre(a) => cmd_legendre(a, start),
        Command::Multivariate(a) => cmd_multivariate(a, start),
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn manifest<A: Serialize>(command: &str, args: &A, start: Instant) -> RunManifest {
    let config = serde_json::to_value(args).unwrap_or(serde_json::Value::Null);
    let mut m = RunManifest::new(command, config);
    m.wall_time_seconds = start.elapsed().as_secs_f64();
    m
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Parse(format!("{}: {e}", path.display()))
}

fn json_string<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Parse(format!("json: {e}")))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_error(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Parse(format!("stdout: {e}"))),
    }
}

/// Writes CSV data plus its manifest: next to the output file, at `--manifest`,
/// or as one JSON line on standard error when writing to standard output.
fn emit_csv(out: &Output, csv: &str, manifest: &RunManifest) -> Result<()> {
    emit(out.output.as_deref(), csv)?;
    let sidecar = out.manifest.clone().or_else(|| {
        out.output.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    match sidecar {
        Some(p) => fs::write(&p, json_string(manifest)?).map_err(|e| io_error(&p, e)),
        None => {
            let line = serde_json::to_string(manifest).map_err(|e| Error::Parse(e.to_string()))?;
            eprintln!("{line}");
            Ok(())
        }
    }
}

fn need<T>(v: Option<T>, flag: &str, family: Family) -> Result<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required for this family ({family:?})")))
}

fn descriptor(a: &EntropyArgs) -> Result<OperatorDescriptor> {
    let f = a.family;
    let n = || need(a.n, "n", f);
    Ok(match f {
        Family::Bernstein => OperatorDescriptor::Baskakov(OperatorParams::bernstein(n()?)?),
        Family::Szasz => OperatorDescriptor::Baskakov(OperatorParams::szasz(n()?)?),
        Family::Baskakov => OperatorDescriptor::Baskakov(OperatorParams::new(n()?, need(a.c, "c", f)?)?),
        Family::Kantorovich => OperatorDescriptor::Kantorovich { n: n()? },
        Family::GaussWeierstrass => OperatorDescriptor::GaussWeierstrass { r: need(a.r, "r", f)? },
        Family::UniformConvolution => {
            OperatorDescriptor::Convolution(ConvolutionKernel::uniform(need(a.width, "width", f)?)?)
        }
        Family::PostWidder => OperatorDescriptor::PostWidder { n: n()? },
        Family::Durrmeyer => OperatorDescriptor::Durrmeyer { n: n()? },
        Family::GenuineBd => OperatorDescriptor::GenuineBernsteinDurrmeyer { n: n()? },
    })
}

fn cmd_entropy(a: EntropyArgs, start: Instant) -> Result<i32> {
    let d = descriptor(&a)?;
    d.validate()?;
    let grid = Grid::new(a.x_min, a.x_max, a.steps)?;
    let rows = profile(&d, &grid)?.rows;
    let m = manifest("entropy", &a, start);
    match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_profile_csv(&rows, &mut buf)?;
            emit_csv(&a.out, &String::from_utf8_lossy(&buf), &m)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                manifest: RunManifest,
                family: String,
                rows: &'a [ProfileRow],
            }
            let doc = Doc { manifest: m, family: d.label(), rows: &rows };
            emit(a.out.output.as_deref(), &json_string(&doc)?)?;
        }
    }
    Ok(EXIT_OK)
}

fn exit_code(report: &SuiteReport) -> i32 {
    if report.has_unconditional_violations() {
        EXIT_VIOLATION
    } else if !report.numerical_failures.is_empty() {
        EXIT_FAILURE
    } else {
        EXIT_OK
    }
}

fn summarize(report: &SuiteReport) {
    eprintln!(
        "{} evaluations: {} violations, {} findings, {} grazing, {} numerical failures",
        report.evaluations,
        report.violations.len(),
        report.findings.len(),
        report.grazing.len(),
        report.numerical_failures.len()
    );
}

fn cmd_verify(a: VerifyArgs, start: Instant) -> Result<i32> {
    if let Some(path) = &a.replay {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let doc = parse_report_json(&text)?;
        let report = SuiteReport {
            violations: doc.violations,
            findings: doc.findings,
            grazing: doc.grazing,
            numerical_failures: doc.numerical_failures,
            evaluations: 0,
        };
        for v in &report.violations {
            eprintln!("violation: {} n={:?} c={:?} at {:?}, margin {:e}", v.check_id, v.n, v.c, v.location, v.margin);
        }
        summarize(&report);
        return Ok(exit_code(&report));
    }
    let selector: SuiteSelector = a.suite.parse()?;
    let config = ScanConfig {
        n_min: a.n_min,
        n_max: a.n_max,
        c_values: parse_shape_list(&a.c_values)?,
        grid_points: a.grid_points,
        x_max: a.x_max,
        bound_x_max: a.bound_x_max,
        t_max: a.t_max,
        hard_tol: a.hard_tol,
        durrmeyer_n_max: a.durrmeyer_n_max,
        multivariate_n_max: a.multivariate_n_max,
        multivariate_step: a.multivariate_step,
    };
    let report = run_suite(&selector, &config)?;
    summarize(&report);
    let code = exit_code(&report);
    let resolved = json!({
        "suite": selector.checks().iter().map(|c| c.name()).collect::<Vec<_>>(),
        "scan": config,
    });
    let mut m = manifest("verify", &resolved, start);
    m.wall_time_seconds = start.elapsed().as_secs_f64();
    emit(a.output.as_deref(), &json_string(&ReportDocument::new(m, report))?)?;
    Ok(code)
}

fn cmd_durrmeyer(a: DurrmeyerArgs, start: Instant) -> Result<i32> {
    let seq = durrmeyer_coeffs(a.n)?;
    let diffs: Vec<Option<String>> = {
        let mut d = vec![None; seq.coeffs.len()];
        for (k, v) in seq.second_differences() {
            d[k] = Some(v.to_string());
        }
        d
    };
    let approx = seq.to_f64();
    let scan = if a.check_convexity {
        let r = scan_durrmeyer_convexity(a.n)?;
        summarize(&r);
        Some(r)
    } else {
        None
    };
    let code = scan.as_ref().map(exit_code).unwrap_or(EXIT_OK);
    let mut m = manifest("durrmeyer", &a, start);
    if let Some(r) = &scan {
        m.counts = crate::formats::Counts::of(r);
    }
    match a.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::Parse(e.to_string());
            w.write_record(["k", "c", "c_approx", "second_difference"]).map_err(csv_err)?;
            for (k, c) in seq.coeffs.iter().enumerate() {
                w.write_record([
                    k.to_string(),
                    c.to_string(),
                    format_float(approx[k]),
                    diffs[k].clone().unwrap_or_default(),
                ])
                .map_err(csv_err)?;
            }
            let buf = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            emit_csv(&a.out, &String::from_utf8_lossy(&buf), &m)?;
        }
        Format::Json => {
            let coefficients: Vec<_> = seq
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    json!({
                        "k": k,
                        "c": c.to_string(),
                        "c_approx": approx[k],
                        "second_difference": diffs[k],
                    })
                })
                .collect();
            let doc = json!({
                "manifest": m,
                "n": a.n,
                "symmetric": seq.is_symmetric(),
                "coefficients": coefficients,
                "convexity": scan,
            });
            emit(a.out.output.as_deref(), &json_string(&doc)?)?;
        }
    }
    Ok(code)
}

/// One row of the Legendre bound table.
#[derive(Debug, Serialize)]
struct LegendreRow {
    t: f64,
    p: f64,
    ratio: f64,
    lower_ratio: f64,
    upper_ratio_a: f64,
    upper_ratio_b: f64,
    upper_ratio_conditional: Option<f64>,
    poly_bound_a: f64,
    poly_bound_b: Option<f64>,
}

impl LegendreRow {
    fn compute(n: u32, t: f64) -> Result<Self> {
        Ok(Self {
            t,
            p: legendre_p(n, t)?,
            ratio: log_derivative(n, t)?,
            lower_ratio: ratio_lower_bound(n, t)?,
            upper_ratio_a: ratio_upper_2_14(n, t)?,
            upper_ratio_b: ratio_upper_2_15(n, t)?,
            upper_ratio_conditional: if t > 1.0 { Some(ratio_upper_2_11(n, t)?) } else { None },
            poly_bound_a: poly_upper_2_16(n, t)?,
            poly_bound_b: if n >= 2 { Some(poly_upper_2_17(n, t)?) } else { None },
        })
    }

    /// Margins of the unconditional bounds, in table order.
    fn unconditional_margins(&self) -> [Option<f64>; 5] {
        [
            Some(relative_margin(self.lower_ratio, self.ratio)),
            Some(relative_margin(self.ratio, self.upper_ratio_a)),
            Some(relative_margin(self.ratio, self.upper_ratio_b)),
            Some(relative_margin(self.p, self.poly_bound_a)),
            self.poly_bound_b.map(|b| relative_margin(self.p, b)),
        ]
    }

    fn conditional_margin(&self) -> Option<f64> {
        self.upper_ratio_conditional.map(|b| relative_margin(self.ratio, b))
    }
}

const LEGENDRE_HEADER: [&str; 15] = [
    "t",
    "p",
    "ratio",
    "lower_ratio",
    "upper_ratio_a",
    "upper_ratio_b",
    "upper_ratio_conditional",
    "poly_bound_a",
    "poly_bound_b",
    "margin_lower_ratio",
    "margin_upper_ratio_a",
    "margin_upper_ratio_b",
    "margin_poly_bound_a",
    "margin_poly_bound_b",
    "margin_upper_ratio_conditional",
];

fn cmd_legendre(a: LegendreArgs, start: Instant) -> Result<i32> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let m = manifest("legendre", &a, start);
    if a.crossover {
        let t = crossover_t(a.n);
        let text = match a.format {
            Format::Csv => format!("n,t_star\n{},{}\n", a.n, format_float(t)),
            Format::Json => json_string(&json!({"manifest": m, "n": a.n, "t_star": t}))?,
        };
        emit(a.out.output.as_deref(), &text)?;
        if a.format == Format::Csv && a.out.output.is_none() {
            eprintln!("t* = {t:.6}");
        }
        return Ok(EXIT_OK);
    }
    if !(a.t_min >= 1.0 && a.t_min <= a.t_max && a.t_max.is_finite()) {
        return Err(usage(format!("need 1 <= t_min <= t_max, got [{}, {}]", a.t_min, a.t_max)));
    }
    let grid = Grid::new(a.t_min, a.t_max, a.steps)?;
    let rows = grid
        .points()
        .into_iter()
        .map(|t| LegendreRow::compute(a.n, t))
        .collect::<Result<Vec<_>>>()?;
    let hard_tol = ScanConfig::default().hard_tol;
    let violated = rows
        .iter()
        .flat_map(|r| r.unconditional_margins())
        .flatten()
        .any(|m| m < -hard_tol);
    match a.format {
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
            let mut text = LEGENDRE_HEADER.join(",");
            text.push('\n');
            for r in &rows {
                let mut cells = vec![
                    format_float(r.t),
                    format_float(r.p),
                    format_float(r.ratio),
                    format_float(r.lower_ratio),
                    format_float(r.upper_ratio_a),
                    format_float(r.upper_ratio_b),
                    opt(r.upper_ratio_conditional),
                    format_float(r.poly_bound_a),
                    opt(r.poly_bound_b),
                ];
                cells.extend(r.unconditional_margins().into_iter().map(opt));
                cells.push(opt(r.conditional_margin()));
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            emit_csv(&a.out, &text, &m)?;
        }
        Format::Json => {
            let doc = json!({"manifest": m, "n": a.n, "rows": rows});
            emit(a.out.output.as_deref(), &json_string(&doc)?)?;
        }
    }
    Ok(if violated { EXIT_VIOLATION } else { EXIT_OK })
}

fn reduction_report(n: u32, step: f64) -> Result<SuiteReport> {
    crate::multivariate::check_step(step, 0.125)?;
    let m = (1.0 / step).round() as usize;
    let h = 1.0 / m as f64;
    let mut report = SuiteReport::default();
    // the reduction divides by 1 - y, so the vertex y = 1 is left out
    for j in 0..m {
        for i in 0..=m - j {
            let p = SimplexPoint::new(i as f64 * h, j as f64 * h)?;
            let (direct, reduced) = (r_n(n, p)?, r_n_reduction(n, p)?);
            report.evaluations += 1;
            let defect = (direct - reduced).abs() / direct.abs().max(reduced.abs());
            if defect > REDUCTION_TOL {
                report.violations.push(
                    ViolationReport::new("reduction", Location::Point { x: p.x(), y: p.y() }, -defect, false)
                        .with_n(n),
                );
            }
        }
    }
    Ok(report)
}

fn cmd_multivariate(a: MultivariateArgs, start: Instant) -> Result<i32> {
    let mut report = SuiteReport::default();
    let mut details = serde_json::Value::Null;
    match a.check {
        MultivariateCheck::Axial => report.violations = axial_convexity_scan(a.n, a.step)?,
        MultivariateCheck::Full => report.findings = full_convexity_findings(a.n, a.step)?,
        MultivariateCheck::Reduction => report = reduction_report(a.n, a.step)?,
        MultivariateCheck::Equivalence => {
            let eq = equivalence_check(a.n, a.step)?;
            report.findings = eq
                .disagreements
                .iter()
                .map(|p| {
                    ViolationReport::new("equivalence-3", Location::Point { x: p.x, y: p.y }, -1.0, true).with_n(a.n)
                })
                .collect();
            details = json!({
                "log_f_convex": eq.log_f_convex,
                "q_convex": eq.q_convex,
                "log_q_convex": eq.log_q_convex,
                "interior_points": eq.interior_points,
                "consistent": eq.consistent(),
            });
        }
    }
    summarize(&report);
    let code = exit_code(&report);
    let doc = ReportDocument::new(manifest("multivariate", &a, start), report);
    let mut value = serde_json::to_value(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    value["details"] = details;
    emit(a.output.as_deref(), &json_string(&value)?)?;
    Ok(code)
}
