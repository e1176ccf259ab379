//! Command-line front end.
//!
//! Every subcommand parses its inputs, calls the library, and hands a
//! finished artifact to [`emit_report`]. Rational parameters stay strings
//! until [`exact::parse_rational`] reads them, so no decimal rounding happens
//! at the shell boundary.

use std::fmt::Write as _;
use std::io::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::beta::{self, beta_squared_sum, bnv_sum};
use crate::cantor::{self, ScaleSchedule, ScheduleDoc, SideExponents, Variant};
use crate::covering::{box_count_samples, box_dim_fit, build_chain, dini_report, CoverChain};
use crate::covertree::{build_tree, euler_tour};
use crate::curve::{build_curve, HolderCurve};
use crate::error::Error;
use crate::exact::{self, format_rational, parse_rational};
use crate::geometry::{format_real, points_from_json, points_to_json, Point2};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "holdercover", version, about = "Hölder curves through doubling sets and Cantor-type counterexamples")]
pub struct RunConfig {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of generated points.
    #[arg(long, global = true, env = "HOLDERCOVER_BUDGET", default_value_t = cantor::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Precision ceiling, in bits, for logarithm enclosures.
    #[arg(long, global = true, default_value_t = exact::DEFAULT_MAX_BITS)]
    pub precision_bits: u32,
    /// Output format; each command has a natural default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scale schedules and corner sets.
    #[command(subcommand)]
    Cantor(CantorCommand),
    /// Nested cover chain of a point cloud.
    Chain(ChainArgs),
    /// Hölder curve through a point cloud.
    Curve(CurveArgs),
    /// Beta-number sums.
    #[command(subcommand)]
    Beta(BetaCommand),
    /// Dini partial sums of a cover chain.
    Dini(ChainArgs),
    /// Box-counting dimension fit.
    Dims(DimsArgs),
    /// Exact checks on a scale schedule.
    Check {
        #[arg(value_enum)]
        which: CheckKind,
        #[command(flatten)]
        schedule: ScheduleArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ScheduleArgs {
    #[arg(long, default_value = "3/4")]
    pub gamma: String,
    #[arg(long, default_value_t = 3)]
    pub stages: usize,
    #[arg(long, default_value = "corrected")]
    pub variant: String,
    /// Exponent of the primed family.
    #[arg(long)]
    pub delta: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum CantorCommand {
    Schedule {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Corners {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long)]
        depth: usize,
        /// Corners of the primed family (needs --delta).
        #[arg(long)]
        primed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Point cloud JSON.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub eps0: String,
    #[arg(long)]
    pub levels: usize,
    #[arg(long)]
    pub d: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value = "0.002")]
    pub stroke_width: String,
}

#[derive(Debug, Subcommand)]
pub enum BetaCommand {
    /// `sum beta^2(3Q) side(Q)` per level.
    Sum {
        #[arg(long)]
        input: PathBuf,
        /// Inclusive level range `a:b`.
        #[arg(long, default_value = "0:6")]
        levels: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Counts of squares with `beta(Q) >= beta0`, weighted by `2^{-kd}`.
    Bnv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        beta0: String,
        #[arg(long)]
        d: String,
        #[arg(long, default_value = "0:6")]
        levels: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct DimsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "1:6")]
    pub levels: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Eq5,
    Lemma31,
    Lemma33,
    BetaBound,
}

/// A failed run: exit code plus a one-line diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } | Error::PrecisionExhausted { .. } => EXIT_EXHAUSTED,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

/// Write `contents` to `path` atomically, or to `stdout` when no path is
/// given.
pub fn emit_report(contents: &str, path: Option<&Path>, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    let exhausted = |what: &str, e: std::io::Error| Failure {
        code: EXIT_EXHAUSTED,
        message: format!("{what}: {e}"),
    };
    match path {
        None => stdout
            .write_all(contents.as_bytes())
            .map_err(|e| exhausted("cannot write output", e)),
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .map_err(|e| exhausted(&format!("cannot write {}", path.display()), e))?;
            tmp.write_all(contents.as_bytes())
                .map_err(|e| exhausted(&format!("cannot write {}", path.display()), e))?;
            tmp.persist(path)
                .map_err(|e| exhausted(&format!("cannot write {}", path.display()), e.error))?;
            Ok(())
        }
    }
}

fn read_points(path: &Path) -> CliResult<Vec<Point2>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    Ok(points_from_json(&text)?)
}

fn parse_positive(name: &str, s: &str) -> CliResult<f64> {
    let v = exact::to_f64(&parse_rational(s)?);
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(format!("--{name} must be positive, got {s}")));
    }
    Ok(v)
}

fn parse_levels(s: &str) -> CliResult<RangeInclusive<u32>> {
    let bad = || invalid(format!("--levels must look like a:b, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn build_schedule(args: &ScheduleArgs, max_bits: u32) -> CliResult<(ScaleSchedule, SideExponents)> {
    let gamma = parse_rational(&args.gamma)?;
    let variant: Variant = args.variant.parse()?;
    let s = cantor::schedule_with_precision(&gamma, args.stages, variant, max_bits)?;
    let delta = args.delta.as_deref().map(parse_rational).transpose()?;
    let e = cantor::side_exponents(&s, delta.as_ref())?;
    Ok((s, e))
}

fn chain_from(args: &ChainArgs) -> CliResult<(Vec<Point2>, CoverChain)> {
    let points = read_points(&args.input)?;
    let eps0 = parse_positive("eps0", &args.eps0)?;
    let d = parse_positive("d", &args.d)?;
    let chain = build_chain(&points, eps0, args.levels, d)?;
    Ok((points, chain))
}

fn q(v: &BigRational) -> Value {
    Value::String(format_rational(v))
}

fn r(v: f64) -> Value {
    Value::String(format_real(v))
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("json value serializes");
    s.push('\n');
    s
}

/// Fixed-width text table, one row per line.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|row| row[c].len())
                .chain([header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn check_report(kind: CheckKind, e: &SideExponents, stages: usize, json_out: bool) -> CliResult<String> {
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let header: &[&str] = match kind {
        CheckKind::Eq5 => {
            for n in 1..=stages {
                let nl = cantor::normalized_length(e, n)?;
                rows.push(vec![
                    n.to_string(),
                    nl.k.to_string(),
                    format_rational(&nl.exponent),
                    format_real(nl.value),
                    nl.in_window.to_string(),
                ]);
                records.push(json!({
                    "n": n, "k": nl.k, "exponent": q(&nl.exponent),
                    "value": r(nl.value), "in_window": nl.in_window,
                }));
            }
            &["n", "k", "k-e_k", "n*4^k*ell_k", "in_window"]
        }
        CheckKind::Lemma31 => {
            for n in 1..=stages {
                let b = cantor::sidelength_bounds(e, n)?;
                let triple = |lo: &BigRational, a: &BigRational, hi: &BigRational| {
                    format!("{} <= {} <= {}", format_rational(lo), format_rational(a), format_rational(hi))
                };
                rows.push(vec![
                    n.to_string(),
                    triple(&b.even_lower, &b.even_actual, &b.even_upper),
                    triple(&b.odd_lower, &b.odd_actual, &b.odd_upper),
                    b.holds().to_string(),
                ]);
                records.push(json!({
                    "n": n,
                    "even": [q(&b.even_lower), q(&b.even_actual), q(&b.even_upper)],
                    "odd": [q(&b.odd_lower), q(&b.odd_actual), q(&b.odd_upper)],
                    "holds": b.holds(),
                }));
            }
            &["n", "log4 ell_{k_2n}", "log4 ell_{k_2n+1}", "holds"]
        }
        CheckKind::Lemma33 => {
            let one = exact::int(1);
            for n in 1..=stages {
                let k = e.ks[2 * n];
                let counts = cantor::analytic_counts(e, k)?;
                let ratio = counts.lower_box_ratio.expect("k_2n > 0");
                let h = cantor::hausdorff_premeasure_bound(e, n, &one)?;
                rows.push(vec![
                    n.to_string(),
                    k.to_string(),
                    format_rational(&ratio),
                    format_rational(&h),
                ]);
                records.push(json!({
                    "n": n, "k": k, "lower_box_ratio": q(&ratio), "hausdorff_exponent": q(&h),
                }));
            }
            &["n", "k_2n", "k/e_k", "log4 H^1 bound"]
        }
        CheckKind::BetaBound => {
            for n in 1..=stages {
                let b = beta::cantor_beta_bound(e, n)?;
                let i = beta::dyadic_scale_for(e, n)?;
                let scale_ok = beta::dyadic_scale_check(e, n)?;
                rows.push(vec![
                    n.to_string(),
                    i.to_string(),
                    scale_ok.to_string(),
                    format_rational(&b.exponent),
                    format_real(b.value),
                    format_real(b.ratio_to_harmonic()),
                    b.in_window.to_string(),
                ]);
                records.push(json!({
                    "n": n, "i_n": i, "scale_check": scale_ok,
                    "coefficient": q(&b.coefficient), "exponent": q(&b.exponent),
                    "bound": r(b.value), "ratio_to_harmonic": r(b.ratio_to_harmonic()),
                    "in_window": b.in_window,
                }));
            }
            &["n", "i_n", "scale_ok", "k-e_k", "bound", "n*bound", "in_window"]
        }
    };
    Ok(if json_out {
        json_line(&Value::Array(records))
    } else {
        table(header, &rows)
    })
}

/// Execute a parsed configuration, writing artifacts to their paths and
/// everything else to `stdout`.
pub fn run(cfg: &RunConfig, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    let json_out = cfg.format == Some(Format::Json);
    match &cfg.command {
        Command::Cantor(CantorCommand::Schedule { schedule, out }) => {
            let (s, e) = build_schedule(schedule, cfg.precision_bits)?;
            let mut doc = ScheduleDoc::new(&s, &e).to_json();
            doc.push('\n');
            emit_report(&doc, out.as_deref(), stdout)
        }
        Command::Cantor(CantorCommand::Corners {
            schedule,
            depth,
            primed,
            out,
        }) => {
            let (_, e) = build_schedule(schedule, cfg.precision_bits)?;
            let pts = cantor::corners(&e, *depth, *primed, cfg.budget)?;
            emit_report(&(points_to_json(&pts) + "\n"), out.as_deref(), stdout)
        }
        Command::Chain(args) => {
            let (_, chain) = chain_from(args)?;
            emit_report(&(chain.to_json() + "\n"), args.out.as_deref(), stdout)
        }
        Command::Curve(args) => {
            let (_, chain) = chain_from(&args.chain)?;
            let tree = build_tree(&chain)?;
            let curve = build_curve(&tree, &chain)?;
            let stroke = parse_positive("stroke-width", &args.stroke_width)?;
            if let Some(svg) = &args.svg {
                emit_report(&curve.to_svg(stroke), Some(svg), stdout)?;
            }
            let body = if cfg.format == Some(Format::Svg) {
                curve.to_svg(stroke)
            } else {
                curve_summary(&curve, euler_tour(&tree).total_length())
            };
            emit_report(&body, args.chain.out.as_deref(), stdout)
        }
        Command::Beta(BetaCommand::Sum { input, levels, out }) => {
            let points = read_points(input)?;
            let report = beta_squared_sum(&points, parse_levels(levels)?)?;
            let body = if json_out {
                report.to_json() + "\n"
            } else {
                report.to_csv()
            };
            emit_report(&body, out.as_deref(), stdout)
        }
        Command::Beta(BetaCommand::Bnv {
            input,
            beta0,
            d,
            levels,
            out,
        }) => {
            let points = read_points(input)?;
            let rows = bnv_sum(
                &points,
                parse_positive("d", d)?,
                parse_levels(levels)?,
                parse_positive("beta0", beta0)?,
            )?;
            let body = if json_out {
                json_line(&Value::Array(
                    rows.iter()
                        .map(|l| {
                            json!({
                                "level": l.level, "squares": l.squares, "count": l.count,
                                "term": r(l.term), "partial_sum": r(l.partial_sum),
                            })
                        })
                        .collect(),
                ))
            } else {
                let mut s = String::from("level,squares,count,term,partial_sum\n");
                for l in &rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        l.level,
                        l.squares,
                        l.count,
                        format_real(l.term),
                        format_real(l.partial_sum)
                    );
                }
                s
            };
            emit_report(&body, out.as_deref(), stdout)
        }
        Command::Dini(args) => {
            let (_, chain) = chain_from(args)?;
            let report = dini_report(&chain.counts(), chain.d)?;
            let doc = json!({
                "d": r(chain.d),
                "terms": report.terms.iter().map(|t| json!({"k": t.k, "count": t.count, "term": r(t.term)})).collect::<Vec<_>>(),
                "partial_sums": report.partial_sums.iter().map(|v| r(*v)).collect::<Vec<_>>(),
                "ratio": report.ratio.map(r),
                "tail_estimate": r(report.tail_estimate),
                "verdict": report.verdict,
            });
            emit_report(&json_line(&doc), args.out.as_deref(), stdout)
        }
        Command::Dims(args) => {
            let points = read_points(&args.input)?;
            let samples = box_count_samples(&points, parse_levels(&args.levels)?);
            let fit = box_dim_fit(&samples)?;
            let doc = json!({
                "samples": fit.samples.iter().map(|(e, n)| json!({"eps": r(*e), "count": n})).collect::<Vec<_>>(),
                "slope": r(fit.slope),
                "intercept": r(fit.intercept),
                "residual": r(fit.residual),
            });
            emit_report(&json_line(&doc), args.out.as_deref(), stdout)
        }
        Command::Check { which, schedule } => {
            let (_, e) = build_schedule(schedule, cfg.precision_bits)?;
            let body = check_report(*which, &e, schedule.stages, json_out)?;
            emit_report(&body, None, stdout)
        }
    }
}

fn curve_summary(curve: &HolderCurve, tour_length: f64) -> String {
    let mut doc: Value = serde_json::from_str(&curve.to_json()).expect("curve json parses");
    doc["tour_length"] = r(tour_length);
    json_line(&doc)
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match run(&cfg, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(
            std::iter::once("holdercover").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn schedule_command() {
        let (code, out, _) = run_args(&["cantor", "schedule", "--gamma", "3/4", "--stages", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"ks\":[0,1,4,5,40,176,2112,17599]"));
    }

    #[test]
    fn eq5_table() {
        let (code, out, _) = run_args(&["check", "eq5", "--gamma", "3/4", "--stages", "3"]);
        assert_eq!(code, 0, "{out}");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[2].ends_with("true"));
    }

    #[test]
    fn validation_errors_exit_two() {
        assert_eq!(run_args(&["cantor", "schedule", "--gamma", "1/3"]).0, EXIT_INVALID);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_INVALID);
        let (code, _, err) = run_args(&["beta", "sum", "--input", "/nonexistent/pts.json"]);
        assert_eq!(code, EXIT_INVALID);
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn budget_exhaustion_exits_three() {
        let (code, _, err) = run_args(&["cantor", "corners", "--depth", "9", "--budget", "1000"]);
        assert_eq!(code, EXIT_EXHAUSTED);
        assert!(err.contains("depth too deep"));
    }

    #[test]
    fn levels_parse() {
        assert_eq!(parse_levels("0:10").unwrap(), 0..=10);
        assert!(parse_levels("3:1").is_err());
        assert!(parse_levels("3").is_err());
    }

    #[test]
    fn table_alignment() {
        let t = table(&["a", "bb"], &[vec!["100".into(), "x".into()]]);
        assert_eq!(t, "  a  bb\n100   x\n");
    }
}
