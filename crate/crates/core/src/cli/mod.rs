//! Command-line front end.
//!
//! Exit codes: 0 success, 2 domain-guard rejection, 3 numerical
//! non-convergence, 4 pipeline failure (or a positive-part violation),
//! 64 usage errors.

pub mod bodyspec;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bodies::{direction, fold_angle, ConvexBody};
use crate::buspetty::{
    build_counterexample, check_condition, positive_verify, scan_counterexample, BuildOptions, ConditionReport,
    PositiveVerdict,
};
use crate::error::{Error, Result};
use crate::fourier::{frac_laplacian_section, frac_laplacian_spectral, DEFAULT_MAX_DEGREE};
use crate::fracderiv::{cos_profile, exp_profile, frac_deriv_at_zero, integer_deriv_at_zero, ProfileFunction};
use crate::par;
use crate::sections::{build_profile, central_section, section_value};
use output::{emit, fmt_num, to_json, Chart, Csv, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_PIPELINE: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

const THREADS_ENV: &str = "GEOTOMO_THREADS";

#[derive(Debug, Parser)]
#[command(name = "geotomo", version, about = "Section functions, fractional derivatives and Busemann-Petty comparisons for bodies of revolution")]
pub struct Cli {
    /// Worker threads for grids and scans (default: GEOTOMO_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// key=value file merged under the command-line flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; stdout when absent. A `.meta.json` sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG chart (next to --out, or plot.svg).
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, Args)]
pub struct Direction {
    /// Polar angle of xi from the axis, radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub xi_angle: f64,
    /// Explicit direction xi (comma separated, n components); overrides --xi-angle.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Option<Vec<f64>>,
}

impl Direction {
    fn vector(&self, n: usize) -> Vec<f64> {
        self.xi.clone().unwrap_or_else(|| direction(n, self.xi_angle))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Body utilities.
    Body {
        #[command(subcommand)]
        command: BodyCommand,
    },
    /// One value of the weighted section function A_{K,xi,p}(t).
    #[command(allow_negative_numbers = true)]
    Section(SectionArgs),
    /// Table of A_{K,xi,p}(t) over [0, t_max].
    #[command(allow_negative_numbers = true)]
    Sprofile(SprofileArgs),
    /// Fractional derivatives at zero of a test function or a section function.
    #[command(allow_negative_numbers = true)]
    Fracderiv(FracderivArgs),
    /// (-Delta)^((n-alpha-4)/2) of the central-section function over polar angles.
    #[command(allow_negative_numbers = true)]
    Laplacian(LaplacianArgs),
    /// Busemann-Petty pipelines.
    Bp {
        #[command(subcommand)]
        command: BpCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum BodyCommand {
    /// Volume, radii, central section and convexity of a body.
    Info(InfoArgs),
}

#[derive(Debug, Subcommand)]
pub enum BpCommand {
    /// Compare the fractional Laplacians of S_K and S_L on an angle grid.
    #[command(allow_negative_numbers = true)]
    Check(CheckArgs),
    /// Volume comparison for alpha in (-3, 0] under the condition.
    #[command(allow_negative_numbers = true)]
    VerifyPositive(CheckArgs),
    /// Scan the critical integral I(N) over a geometric grid.
    #[command(allow_negative_numbers = true)]
    Scan(ScanArgs),
    /// Construct a counterexample pair (L, K).
    #[command(allow_negative_numbers = true)]
    Build(BuildArgs),
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long)]
    pub body: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SectionArgs {
    #[arg(long)]
    pub body: String,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub t: f64,
    #[command(flatten)]
    pub direction: Direction,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SprofileArgs {
    #[arg(long)]
    pub body: String,
    #[arg(long)]
    pub p: f64,
    #[command(flatten)]
    pub direction: Direction,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestFunction {
    Exp,
    Cos,
}

#[derive(Debug, Args)]
pub struct FracderivArgs {
    /// Built-in test function.
    #[arg(long, value_enum, conflicts_with = "body")]
    pub f: Option<TestFunction>,
    /// Section function of this body instead.
    #[arg(long, requires = "p")]
    pub body: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[command(flatten)]
    pub direction: Direction,
    /// Orders (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub q: Vec<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Spectral,
    Section,
}

#[derive(Debug, Args)]
pub struct LaplacianArgs {
    #[arg(long)]
    pub body: String,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 91)]
    pub grid: usize,
    #[arg(long, value_enum, default_value = "spectral")]
    pub route: Route,
    #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
    pub max_degree: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub k: String,
    #[arg(long)]
    pub l: String,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = crate::buspetty::DEFAULT_GRID)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha: f64,
    /// Range min:max.
    #[arg(long = "N", default_value = "1:1e12")]
    pub big_n: String,
    #[arg(long, default_value_t = 4)]
    pub per_decade: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "N")]
    pub big_n: f64,
    #[arg(long)]
    pub bump_center: Option<f64>,
    #[arg(long)]
    pub bump_width: Option<f64>,
    #[arg(long)]
    pub eps_start: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Write K as a JSON body description.
    #[arg(long)]
    pub save_k: Option<PathBuf>,
    /// Write L as a JSON body description.
    #[arg(long)]
    pub save_l: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => EXIT_DOMAIN,
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        Error::Pipeline(_) | Error::Io(_) => EXIT_PIPELINE,
        Error::Parse(_) => EXIT_USAGE,
    }
}

/// Append `--key=value` for config entries whose flag is absent from `args`.
fn merge_config(mut args: Vec<String>) -> std::result::Result<Vec<String>, String> {
    let path = args.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            args.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut extra = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", i + 1))?;
        let flag = format!("--{}", k.trim().replace('_', "-"));
        let flag = if flag == "--n-big" { "--N".to_string() } else { flag };
        let present = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        match v.trim() {
            "true" => extra.push(flag),
            "false" => {}
            v => extra.push(format!("{flag}={v}")),
        }
    }
    args.extend(extra);
    Ok(args)
}

fn env_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

/// Parse `args` (program name first), run and return the exit code.
pub fn run(args: Vec<String>) -> i32 {
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.threads.or_else(env_threads);
    let started = Instant::now();
    let result = par::with_threads(threads, || execute(&cli.command));
    match result {
        Ok(outcome) => {
            if let Some(out) = outcome.out.as_deref() {
                let meta = Meta {
                    command: args.iter().skip(1).cloned().collect(),
                    version: env!("CARGO_PKG_VERSION"),
                    threads,
                    elapsed_seconds: started.elapsed().as_secs_f64(),
                    finished_unix: SystemTime::now()
                        .duration_since(UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0),
                    exit_code: outcome.code,
                };
                let written = serde_json::to_string_pretty(&meta)
                    .map_err(|e| Error::Io(e.to_string()))
                    .and_then(|s| Ok(std::fs::write(out.with_extension("meta.json"), s + "\n")?));
                if let Err(e) = written {
                    eprintln!("error: {e}");
                    return exit_code(&e);
                }
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[derive(Serialize)]
struct Meta {
    command: Vec<String>,
    version: &'static str,
    threads: Option<usize>,
    elapsed_seconds: f64,
    finished_unix: u64,
    exit_code: i32,
}

struct Outcome {
    code: i32,
    out: Option<PathBuf>,
}

fn body_arg(spec: &str) -> Result<ConvexBody> {
    bodyspec::parse_body(spec, Path::new("."))
}

/// Write CSV or JSON and the optional chart.
fn finish<T: Serialize>(o: &OutputArgs, csv: Csv, json: &T, chart: Option<Chart>) -> Result<Outcome> {
    finish_with(o, csv, json, chart, EXIT_OK)
}

fn finish_with<T: Serialize>(o: &OutputArgs, csv: Csv, json: &T, chart: Option<Chart>, code: i32) -> Result<Outcome> {
    let data = match o.format {
        Format::Csv => csv.render(),
        Format::Json => to_json(json)?,
    };
    emit(o.out.as_deref(), &data)?;
    if o.plot {
        if let Some(chart) = chart {
            let path = o
                .out
                .as_ref()
                .map(|p| p.with_extension("svg"))
                .unwrap_or_else(|| PathBuf::from("plot.svg"));
            std::fs::write(path, chart.to_svg())?;
        }
    }
    Ok(Outcome {
        code,
        out: o.out.clone(),
    })
}

fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Body {
            command: BodyCommand::Info(a),
        } => body_info(a),
        Command::Section(a) => section(a),
        Command::Sprofile(a) => sprofile(a),
        Command::Fracderiv(a) => fracderiv(a),
        Command::Laplacian(a) => laplacian(a),
        Command::Bp { command } => match command {
            BpCommand::Check(a) => bp_check(a),
            BpCommand::VerifyPositive(a) => bp_verify(a),
            BpCommand::Scan(a) => bp_scan(a),
            BpCommand::Build(a) => bp_build(a),
        },
    }
}

#[derive(Serialize)]
struct BodyInfo {
    n: usize,
    description: String,
    volume: f64,
    radial_axis: f64,
    radial_equator: f64,
    central_section_axis: f64,
    convex: bool,
}

fn body_info(a: &InfoArgs) -> Result<Outcome> {
    let body = body_arg(&a.body)?;
    let n = body.n;
    let info = BodyInfo {
        n,
        description: body.describe(),
        volume: body.volume(a.tol)?,
        radial_axis: body.radial_at(0.0),
        radial_equator: body.radial_at(std::f64::consts::FRAC_PI_2),
        central_section_axis: central_section(&body, &direction(n, 0.0))?,
        convex: body.check_convexity(2001).passed(),
    };
    let mut csv = Csv::new(&["quantity", "value"]);
    csv.comment(format!("body: {}", info.description));
    for (k, v) in [
        ("n", n as f64),
        ("volume", info.volume),
        ("radial_axis", info.radial_axis),
        ("radial_equator", info.radial_equator),
        ("central_section_axis", info.central_section_axis),
        ("convex", if info.convex { 1.0 } else { 0.0 }),
    ] {
        csv.text_row(vec![k.into(), fmt_num(v)]);
    }
    finish(&a.output, csv, &info, None)
}

#[derive(Serialize)]
struct SectionOut {
    xi: Vec<f64>,
    p: f64,
    t: f64,
    value: f64,
}

fn section(a: &SectionArgs) -> Result<Outcome> {
    let body = body_arg(&a.body)?;
    let xi = a.direction.vector(body.n);
    let value = section_value(&body, &xi, a.p, a.t, a.tol)?;
    let mut csv = Csv::new(&["p", "t", "value"]);
    csv.comment(format!("body: {}", body.describe()));
    csv.comment(format!("xi: {}", join(&xi)));
    csv.row(&[a.p, a.t, value]);
    let out = SectionOut { xi, p: a.p, t: a.t, value };
    finish(&a.output, csv, &out, None)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct Point {
    t: f64,
    value: f64,
}

#[derive(Serialize)]
struct SprofileOut {
    xi: Vec<f64>,
    p: f64,
    t_max: f64,
    a0: f64,
    a2: Option<f64>,
    rows: Vec<Point>,
}

fn sprofile(a: &SprofileArgs) -> Result<Outcome> {
    let body = body_arg(&a.body)?;
    let xi = a.direction.vector(body.n);
    let prof = build_profile(&body, &xi, a.p, a.tol)?;
    let table = prof.table(a.points.max(2))?;
    let mut csv = Csv::new(&["t", "value"]);
    csv.comment(format!("body: {}", body.describe()));
    csv.comment(format!("xi: {}", join(&xi)));
    csv.comment(format!("p: {}", fmt_num(a.p)));
    csv.comment(format!("A(0): {}", fmt_num(prof.a0)));
    csv.comment(format!("A''(0): {}", prof.a2.map(fmt_num).unwrap_or_else(|| "unavailable".into())));
    for &(t, v) in &table {
        csv.row(&[t, v]);
    }
    let chart = Chart {
        title: format!("A(t), p = {}", a.p),
        x_label: "t".into(),
        y_label: "A(t)".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            name: "A".into(),
            points: table.clone(),
        }],
    };
    let out = SprofileOut {
        xi,
        p: a.p,
        t_max: prof.t_max,
        a0: prof.a0,
        a2: prof.a2,
        rows: table.into_iter().map(|(t, value)| Point { t, value }).collect(),
    };
    finish(&a.output, csv, &out, Some(chart))
}

#[derive(Serialize)]
struct FracRow {
    q: f64,
    value: f64,
    abs_err: f64,
}

fn fracderiv(a: &FracderivArgs) -> Result<Outcome> {
    let (source, label): (Box<dyn ProfileFunction>, String) = match (&a.f, &a.body) {
        (Some(TestFunction::Exp), None) => (Box::new(exp_profile()), "exp(-t)".into()),
        (Some(TestFunction::Cos), None) => (Box::new(cos_profile()), "cos(t)".into()),
        (None, Some(spec)) => {
            let body = body_arg(spec)?;
            let p = a.p.ok_or_else(|| Error::Parse("--body needs --p".into()))?;
            let xi = a.direction.vector(body.n);
            let label = format!("A_(K,xi,p), p = {p}, body: {}", body.describe());
            (Box::new(build_profile(&body, &xi, p, a.tol)?), label)
        }
        _ => return Err(Error::Parse("give exactly one of --f or --body".into())),
    };
    let mut rows = Vec::with_capacity(a.q.len());
    for &q in &a.q {
        let r = if (q - q.round()).abs() < 1e-12 && q >= 0.0 {
            FracRow {
                q,
                value: integer_deriv_at_zero(source.as_ref(), q.round() as usize)?,
                abs_err: 0.0,
            }
        } else {
            let r = frac_deriv_at_zero(source.as_ref(), q)?;
            FracRow {
                q,
                value: r.value,
                abs_err: r.abs_error_estimate,
            }
        };
        rows.push(r);
    }
    let mut csv = Csv::new(&["q", "value", "abs_err"]);
    csv.comment(format!("function: {label}"));
    for r in &rows {
        csv.row(&[r.q, r.value, r.abs_err]);
    }
    let chart = Chart {
        title: format!("q-th derivative at 0 of {label}"),
        x_label: "q".into(),
        y_label: "value".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            name: "f^(q)(0)".into(),
            points: rows.iter().map(|r| (r.q, r.value)).collect(),
        }],
    };
    finish(&a.output, csv, &rows, Some(chart))
}

#[derive(Serialize)]
struct AngleValue {
    angle_rad: f64,
    value: f64,
}

#[derive(Serialize)]
struct LaplacianOut {
    alpha: f64,
    route: &'static str,
    rows: Vec<AngleValue>,
}

fn angle_grid(size: usize) -> Vec<f64> {
    let size = size.max(2);
    (0..size)
        .map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / (size - 1) as f64)
        .collect()
}

fn laplacian(a: &LaplacianArgs) -> Result<Outcome> {
    let body = body_arg(&a.body)?;
    let grid = angle_grid(a.grid);
    let (values, route) = match a.route {
        Route::Spectral => {
            let s = frac_laplacian_spectral(&body, a.alpha, a.max_degree)?;
            (grid.iter().map(|&phi| s.eval(phi)).collect::<Vec<_>>(), "spectral")
        }
        Route::Section => {
            let vals = par::map(&grid, |&phi| frac_laplacian_section(&body, a.alpha, &direction(body.n, phi)));
            (vals.into_iter().collect::<Result<Vec<_>>>()?, "section")
        }
    };
    let mut csv = Csv::new(&["angle_rad", "value"]);
    csv.comment(format!("body: {}", body.describe()));
    csv.comment(format!("alpha: {}  order: {}  route: {route}", fmt_num(a.alpha), fmt_num(body.n as f64 - a.alpha - 4.0)));
    for (&phi, &v) in grid.iter().zip(&values) {
        csv.row(&[phi, v]);
    }
    let chart = Chart {
        title: format!("fractional Laplacian of S_K, alpha = {}", a.alpha),
        x_label: "polar angle (rad)".into(),
        y_label: "value".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            name: route.into(),
            points: grid.iter().copied().zip(values.iter().copied()).collect(),
        }],
    };
    let out = LaplacianOut {
        alpha: a.alpha,
        route,
        rows: grid
            .into_iter()
            .zip(values)
            .map(|(angle_rad, value)| AngleValue { angle_rad, value })
            .collect(),
    };
    finish(&a.output, csv, &out, Some(chart))
}

fn condition_csv(report: &ConditionReport) -> Csv {
    let mut csv = Csv::new(&["angle_rad", "lhs", "rhs", "difference"]);
    csv.comment(format!("alpha: {}", fmt_num(report.alpha)));
    csv.comment(format!("satisfied: {}", report.satisfied));
    csv.comment(format!("margin: {}", fmt_num(report.margin)));
    for ((&phi, &l), &r) in report.grid.iter().zip(&report.lhs).zip(&report.rhs) {
        csv.row(&[phi, l, r, r - l]);
    }
    csv
}

fn condition_chart(report: &ConditionReport) -> Chart {
    Chart {
        title: format!("condition margin, alpha = {}", report.alpha),
        x_label: "polar angle (rad)".into(),
        y_label: "rhs - lhs".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            name: "rhs - lhs".into(),
            points: report
                .grid
                .iter()
                .zip(report.lhs.iter().zip(&report.rhs))
                .map(|(&phi, (l, r))| (phi, r - l))
                .collect(),
        }],
    }
}

fn bp_check(a: &CheckArgs) -> Result<Outcome> {
    let k = body_arg(&a.k)?;
    let l = body_arg(&a.l)?;
    let report = check_condition(&k, &l, a.alpha, a.grid)?;
    let chart = condition_chart(&report);
    finish(&a.output, condition_csv(&report), &report, Some(chart))
}

fn bp_verify(a: &CheckArgs) -> Result<Outcome> {
    let k = body_arg(&a.k)?;
    let l = body_arg(&a.l)?;
    let verdict = positive_verify(&k, &l, a.alpha, a.grid)?;
    let mut csv = Csv::new(&["verdict", "vol_k", "vol_l"]);
    let code = match &verdict {
        PositiveVerdict::Consistent { vol_k, vol_l } => {
            csv.text_row(vec!["consistent".into(), fmt_num(*vol_k), fmt_num(*vol_l)]);
            EXIT_OK
        }
        PositiveVerdict::Violation { vol_k, vol_l, details } => {
            csv.comment(details.clone());
            csv.text_row(vec!["violation".into(), fmt_num(*vol_k), fmt_num(*vol_l)]);
            eprintln!("VIOLATION: {details}");
            EXIT_PIPELINE
        }
    };
    finish_with(&a.output, csv, &verdict, None, code)
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Parse(format!("--N expects min:max, got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn bp_scan(a: &ScanArgs) -> Result<Outcome> {
    let (lo, hi) = parse_range(&a.big_n)?;
    let report = scan_counterexample(a.n, a.alpha, lo, hi, a.per_decade)?;
    let mut csv = Csv::new(&["N", "I", "sign"]);
    csv.comment(format!(
        "n: {}  alpha: {}  p: {}  q: {}",
        report.n,
        fmt_num(report.alpha),
        fmt_num(report.p),
        fmt_num(report.q)
    ));
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_else(|| "none".into());
    csv.comment(format!("threshold_N: {}", opt(report.threshold_n)));
    csv.comment(format!("fitted_exponent: {}", opt(report.fitted_exponent)));
    for row in &report.rows {
        csv.text_row(vec![fmt_num(row.big_n), fmt_num(row.integral), row.sign.to_string()]);
    }
    let part = |sign: i8| -> Vec<(f64, f64)> {
        report
            .rows
            .iter()
            .filter(|r| r.sign == sign)
            .map(|r| (r.big_n, r.integral.abs()))
            .collect()
    };
    let chart = Chart {
        title: format!("|I(N)|, n = {}, alpha = {}", report.n, report.alpha),
        x_label: "N".into(),
        y_label: "|I(N)|".into(),
        log_x: true,
        log_y: true,
        series: vec![
            Series {
                name: "I > 0".into(),
                points: part(1),
            },
            Series {
                name: "I < 0".into(),
                points: part(-1),
            },
        ],
    };
    finish(&a.output, csv, &report, Some(chart))
}

fn bp_build(a: &BuildArgs) -> Result<Outcome> {
    let opts = BuildOptions {
        bump_center: a.bump_center,
        bump_width: a.bump_width,
        eps_start: a.eps_start,
        grid_size: a.grid,
    };
    let pair = build_counterexample(a.n, a.alpha, a.big_n, opts)?;
    for (path, body) in [(&a.save_k, &pair.k), (&a.save_l, &pair.l)] {
        if let Some(path) = path {
            std::fs::write(path, to_json(body)?)?;
        }
    }
    let mut csv = condition_csv(&pair.condition);
    csv.comment(format!("N: {}", fmt_num(a.big_n)));
    csv.comment(format!("epsilon: {}", fmt_num(pair.epsilon)));
    csv.comment(format!(
        "bump: center {} width {}",
        fmt_num(fold_angle(pair.bump.center)),
        fmt_num(pair.bump.width)
    ));
    csv.comment(format!("vol_L: {}", fmt_num(pair.vol_l)));
    csv.comment(format!("vol_K: {}", fmt_num(pair.vol_k)));
    csv.comment(format!("relative gain: {}", fmt_num((pair.vol_k - pair.vol_l) / pair.vol_l)));
    let chart = condition_chart(&pair.condition);
    finish(&a.output, csv, &pair, Some(chart))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_fills_missing_flags_only() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "# recipe\nalpha = 0.5\nper_decade=8\nplot=true\n").unwrap();
        let args: Vec<String> = ["geotomo", "bp", "scan", "--per-decade", "4", "--config", cfg.to_str().unwrap()]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let merged = merge_config(args).unwrap();
        assert!(merged.contains(&"--alpha=0.5".to_string()));
        assert!(merged.contains(&"--plot".to_string()));
        assert!(!merged.iter().any(|a| a.starts_with("--per-decade=")));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1:1e12").unwrap(), (1.0, 1e12));
        assert!(parse_range("1-2").is_err());
    }
}
