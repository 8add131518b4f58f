//! `qpin`: quasipinning analysis of fermionic natural occupation numbers.
//!
//! Exit codes: 0 success, 1 parse or validation failure, 2 spectrum outside
//! the polytope, 3 catalog verification mismatch.

mod input;
mod output;

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qpin_core::catalog::{decode_pair_notation, format_pair_cell, ConstraintCatalog};
use qpin_core::geometry::{q_overall, GeometryError, QReport, QValue};
use qpin_core::lp::{describe_bound, DerivedBound, Membership, PolytopeModel, RowReport, VerifyReport};
use qpin_core::selection::{natural_occupations, pc_configurations, pinned_configurations, CIState, NaturalOccupations};
use qpin_core::spectra::{validate_spectrum, Spectrum};
use qpin_core::truncation::{auto_truncate, max_abs_kappa, truncate, Truncation, TruncationPlan};
use qpin_core::{load_setting, ClassBound, FacetPair, Setting};
use rand::seq::index::sample;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use input::{infer_setting, looks_like_ci, parse_ci, parse_spectra, read_source, LabeledSpectrum};
use output::{csv_field, f17, f17_vec, json_line, short, F17};

#[derive(Parser)]
#[command(name = "qpin", version, about = "Quasipinning analysis with generalized Pauli constraints")]
struct Cli {
    /// Setting `N,d`; overrides inference from the input.
    #[arg(long, global = true, value_parser = parse_setting)]
    setting: Option<Setting>,
    /// Validation and membership tolerance.
    #[arg(long, global = true, default_value_t = qpin_core::DEFAULT_TOL)]
    tol: f64,
    /// Truncation budget: largest admissible neglected ℓ¹ mass.
    #[arg(long, global = true)]
    budget: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Write every LP solved by `verify` to this file.
    #[arg(long = "lp-dump", global = true)]
    lp_dump: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    JsonLines,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InputKind {
    Spectrum,
    CiState,
    Batch,
}

#[derive(Subcommand)]
enum Command {
    /// Q-parameter report for a spectrum, a CI state, or a batch of spectra.
    Analyze {
        /// Input file (`-` for stdin).
        input: Option<String>,
        /// Inline spectrum, e.g. `1,0.5,0.5,0.5,0.5,0`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Input kind; inferred from the content when omitted.
        #[arg(long, value_enum)]
        kind: Option<InputKind>,
    },
    /// Re-derive the embedded tables with exact LPs and diff them.
    Verify {
        /// Setting `N,d` (alternative to --setting).
        target: Option<String>,
        /// Verify all four embedded settings.
        #[arg(long)]
        all: bool,
        /// Only these 1-based rows.
        #[arg(long, value_delimiter = ',')]
        rows: Vec<usize>,
        /// Verify this many uniformly sampled rows.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Verify a catalog export file instead of the embedded table.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Per-spectrum summary rows for a batch file.
    Scan {
        /// Batch file (`-` for stdin).
        input: String,
    },
    /// Configurations compatible with pinning a constraint or a Pauli facet.
    PinStructure {
        /// 1-based constraint index (lists I_D).
        #[arg(long)]
        constraint: Option<usize>,
        /// Facet pair `r,s` (lists I_S).
        #[arg(long, value_parser = parse_pair)]
        pair: Option<(usize, usize)>,
        /// Facet pair in table notation, e.g. `1,8` for {1, 8}.
        #[arg(long)]
        cell: Option<String>,
    },
    /// Dump an embedded constraint table.
    Catalog {
        /// Setting `N,d` (alternative to --setting).
        target: Option<String>,
    },
    /// Truncate a spectrum to a smaller setting.
    Truncate {
        input: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long)]
        delta_n: Option<usize>,
        #[arg(long)]
        delta_d: Option<usize>,
    },
}

fn parse_setting(s: &str) -> Result<Setting, String> {
    s.parse::<Setting>().map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (r, t) = s.split_once(',').ok_or("expected `r,s`")?;
    Ok((r.trim().parse().map_err(|_| "bad r")?, t.trim().parse().map_err(|_| "bad s")?))
}

/// An error with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl std::fmt::Display) -> Self {
        Self { code: 1, message: message.to_string() }
    }
}

fn geometry_failure(e: GeometryError) -> Failure {
    match &e {
        GeometryError::NotInPolytope { violations } => {
            let mut m = e.to_string();
            for v in violations {
                let _ = write!(m, "\n  {:?}: {}", v.kind, f17(v.value));
            }
            Failure { code: 2, message: m }
        }
        _ => Failure::input(e),
    }
}

type CliResult<T> = Result<T, Failure>;

struct Opts {
    setting: Option<Setting>,
    tol: f64,
    budget: Option<f64>,
    format: Format,
    lp_dump: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Opts { setting: cli.setting, tol: cli.tol, budget: cli.budget, format: cli.format, lp_dump: cli.lp_dump };
    let result = match cli.command {
        Command::Analyze { input, lambda, kind } => cmd_analyze(&opts, input, lambda, kind),
        Command::Verify { target, all, rows, sample, seed, catalog } => cmd_verify(&opts, target, all, rows, sample, seed, catalog),
        Command::Scan { input } => cmd_scan(&opts, &input),
        Command::PinStructure { constraint, pair, cell } => cmd_pin_structure(&opts, constraint, pair, cell),
        Command::Catalog { target } => cmd_catalog(&opts, target),
        Command::Truncate { input, lambda, delta_n, delta_d } => cmd_truncate(&opts, input, lambda, delta_n, delta_d),
    };
    let (text, code) = match result {
        Ok((text, code)) => (text, code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

/// Output text and exit code.
type Outcome = CliResult<(String, u8)>;

// ---------------------------------------------------------------- analysis

struct Analysis {
    input_setting: Setting,
    /// The spectrum the report refers to (truncated when a plan was used).
    spectrum: Spectrum,
    truncation: Option<Truncation>,
    report: QReport,
}

fn load_input(input: Option<String>, lambda: Option<String>) -> CliResult<String> {
    match (input, lambda) {
        (Some(_), Some(_)) => Err(Failure::input("give either an input file or --lambda, not both")),
        (None, None) => Err(Failure::input("no input: give a file, `-` for stdin, or --lambda")),
        (Some(path), None) => read_source(&path).map_err(Failure::input),
        (None, Some(l)) => Ok(l),
    }
}

fn validate(values: &[f64], opts: &Opts) -> CliResult<Spectrum> {
    let setting = match opts.setting {
        Some(s) => s,
        None => infer_setting(values, opts.tol).map_err(Failure::input)?,
    };
    validate_spectrum(values, setting, opts.tol).map_err(Failure::input)
}

fn analyze_spectrum(spectrum: Spectrum, opts: &Opts) -> CliResult<Analysis> {
    let setting = spectrum.setting();
    if setting.is_known() {
        let report = q_overall(&spectrum, load_setting(setting).map_err(Failure::input)?, opts.tol).map_err(geometry_failure)?;
        return Ok(Analysis { input_setting: setting, spectrum, truncation: None, report });
    }
    let Some(budget) = opts.budget else {
        return Err(Failure::input(format!("no constraint table for {setting}; pass --budget to truncate to a known setting")));
    };
    let t = auto_truncate(&spectrum, budget, opts.tol).map_err(Failure::input)?;
    let catalog = load_setting(t.plan.target).map_err(Failure::input)?;
    // Truncation moves every D by at most max|κ| times the neglected mass.
    let kappa = catalog.inequalities.iter().map(max_abs_kappa).max().unwrap_or(0) as f64;
    let tol = opts.tol + kappa * t.plan.error_bound;
    let report = q_overall(&t.spectrum, catalog, tol).map_err(geometry_failure)?;
    Ok(Analysis { input_setting: setting, spectrum: t.spectrum.clone(), truncation: Some(t), report })
}

fn verdict(q: Option<f64>) -> &'static str {
    match q {
        None => "no finite Q_j",
        Some(q) if q <= 1.0 => "quasipinning is rather trivial (Q <= 1)",
        Some(q) if q >= 2.0 => "quasipinning is quite nontrivial (Q >= 2)",
        Some(_) => "quasipinning is moderately nontrivial (1 < Q < 2)",
    }
}

fn q_state(q: &QValue) -> &'static str {
    match q {
        QValue::Finite(_) => "finite",
        QValue::Pinned => "pinned",
        QValue::Indeterminate => "indeterminate",
    }
}

#[derive(Serialize)]
struct BoundRecord {
    r: usize,
    s: usize,
    c: String,
    dist: F17,
    bound: F17,
}

#[derive(Serialize)]
struct ConstraintRecord<'a> {
    record: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
    index: usize,
    d: F17,
    facet_distance: Option<F17>,
    bounds: Vec<BoundRecord>,
    scalar_bound: Option<String>,
    denominator: F17,
    q: Option<F17>,
    q_state: &'static str,
    pinned: bool,
    empty_class: bool,
}

#[derive(Serialize)]
struct TruncationRecord {
    delta_n: usize,
    delta_d: usize,
    target: [usize; 2],
    error_bound: F17,
}

#[derive(Serialize)]
struct CiInfo {
    aligned: bool,
    ordered: bool,
    max_offdiag: F17,
}

#[derive(Serialize)]
struct SummaryRecord<'a> {
    record: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
    setting: [usize; 2],
    analyzed_setting: [usize; 2],
    lambda: Vec<F17>,
    q: Option<F17>,
    argmax: Option<usize>,
    d_min: F17,
    d_min_index: usize,
    pinned: &'a [usize],
    indeterminate: &'a [usize],
    truncation: Option<TruncationRecord>,
    ci: Option<CiInfo>,
}

fn pair_of(s: Setting) -> [usize; 2] {
    [s.n_particles(), s.dim()]
}

fn truncation_record(t: &Truncation) -> TruncationRecord {
    TruncationRecord {
        delta_n: t.plan.delta_n,
        delta_d: t.plan.delta_d,
        target: pair_of(t.plan.target),
        error_bound: F17(t.plan.error_bound),
    }
}

const ANALYZE_CSV_HEADER: &str = "label,index,d,facet_distance,denominator,q,q_state,pinned,empty_class\n";

fn render_analysis(a: &Analysis, label: Option<&str>, ci: Option<&NaturalOccupations>, format: Format) -> String {
    let r = &a.report;
    let mut out = String::new();
    match format {
        Format::JsonLines => {
            for e in &r.entries {
                let rec = ConstraintRecord {
                    record: "constraint",
                    label,
                    index: e.index,
                    d: F17(e.d_value),
                    facet_distance: e.facet_distance.map(F17),
                    bounds: e
                        .pair_bounds
                        .iter()
                        .map(|b| BoundRecord { r: b.pair.r, s: b.pair.s, c: b.c.to_string(), dist: F17(b.dist), bound: F17(b.bound) })
                        .collect(),
                    scalar_bound: e.scalar_bound.as_ref().map(|c| c.to_string()),
                    denominator: F17(e.denominator),
                    q: e.q.finite().map(F17),
                    q_state: q_state(&e.q),
                    pinned: e.pinned,
                    empty_class: e.empty_class,
                };
                out.push_str(&json_line(&rec));
            }
            let summary = SummaryRecord {
                record: "summary",
                label,
                setting: pair_of(a.input_setting),
                analyzed_setting: pair_of(a.spectrum.setting()),
                lambda: f17_vec(a.spectrum.values()),
                q: r.q.map(F17),
                argmax: r.argmax,
                d_min: F17(r.d_min),
                d_min_index: r.d_min_index,
                pinned: &r.pinned,
                indeterminate: &r.indeterminate,
                truncation: a.truncation.as_ref().map(truncation_record),
                ci: ci.map(|c| CiInfo { aligned: c.aligned, ordered: c.ordered, max_offdiag: F17(c.max_offdiag) }),
            };
            out.push_str(&json_line(&summary));
        }
        Format::Csv => {
            for e in &r.entries {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    csv_field(label.unwrap_or("")),
                    e.index,
                    f17(e.d_value),
                    e.facet_distance.map(f17).unwrap_or_default(),
                    f17(e.denominator),
                    e.q.finite().map(f17).unwrap_or_default(),
                    q_state(&e.q),
                    e.pinned,
                    e.empty_class
                );
            }
        }
        Format::Human => {
            if let Some(l) = label {
                let _ = writeln!(out, "== {l}");
            }
            let _ = writeln!(out, "setting {}", a.input_setting);
            if let Some(c) = ci {
                let _ = writeln!(
                    out,
                    "CI state: aligned={} ordered={} max|rho_pq|={}",
                    c.aligned,
                    c.ordered,
                    short(c.max_offdiag)
                );
            }
            if let Some(t) = &a.truncation {
                let _ = writeln!(
                    out,
                    "truncated to {} (dN={}, dd={}), error bound {}",
                    t.plan.target,
                    t.plan.delta_n,
                    t.plan.delta_d,
                    short(t.plan.error_bound)
                );
            }
            let vals: Vec<String> = a.spectrum.values().iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "lambda = [{}]", vals.join(", "));
            let _ = writeln!(out, "{:>4}  {:>13}  {:>13}  {:>13}  {:>13}  flags", "j", "D_j", "dist(F_j)", "bound", "Q_j");
            for e in &r.entries {
                let q = match e.q {
                    QValue::Finite(q) => format!("{q:.6}"),
                    QValue::Pinned => "pinned".into(),
                    QValue::Indeterminate => "indeterminate".into(),
                };
                let mut flags = Vec::new();
                if e.pinned {
                    flags.push("pinned");
                }
                if e.empty_class {
                    flags.push("empty-class");
                }
                let _ = writeln!(
                    out,
                    "{:>4}  {:>13}  {:>13}  {:>13}  {:>13}  {}",
                    e.index,
                    short(e.d_value),
                    e.facet_distance.map(short).unwrap_or_else(|| "-".into()),
                    short(e.denominator),
                    q,
                    flags.join(",")
                );
            }
            match (r.q, r.argmax) {
                (Some(q), Some(j)) => {
                    let _ = writeln!(out, "Q = {q:.6} (constraint {j}): {}", verdict(Some(q)));
                }
                _ => {
                    let _ = writeln!(out, "Q undefined: {}", verdict(None));
                }
            }
            let _ = writeln!(out, "D_min = {} (constraint {})", short(r.d_min), r.d_min_index);
            let pinned: Vec<String> = r.pinned.iter().map(|j| j.to_string()).collect();
            let _ = writeln!(out, "pinned constraints: {}", if pinned.is_empty() { "none".into() } else { pinned.join(" ") });
        }
    }
    out
}

fn cmd_analyze(opts: &Opts, input: Option<String>, lambda: Option<String>, kind: Option<InputKind>) -> Outcome {
    let text = load_input(input, lambda)?;
    let kind = kind.unwrap_or_else(|| {
        if looks_like_ci(&text) {
            InputKind::CiState
        } else if parse_spectra(&text).len() > 1 {
            InputKind::Batch
        } else {
            InputKind::Spectrum
        }
    });
    let header = if opts.format == Format::Csv { ANALYZE_CSV_HEADER } else { "" };
    match kind {
        InputKind::CiState => {
            let setting = opts.setting.ok_or_else(|| Failure::input("CI-state input needs --setting N,d"))?;
            let records = parse_ci(&text).map_err(Failure::input)?;
            let state = CIState::from_records(setting, &records).map_err(Failure::input)?;
            let no = natural_occupations(&state, opts.tol).map_err(Failure::input)?;
            let a = analyze_spectrum(no.spectrum.clone(), opts)?;
            Ok((format!("{header}{}", render_analysis(&a, None, Some(&no), opts.format)), 0))
        }
        InputKind::Spectrum => {
            let rows = parse_spectra(&text);
            let [(ln, row)] = rows.as_slice() else {
                return Err(Failure::input(format!("expected exactly one spectrum, found {}", rows.len())));
            };
            let row = row.as_ref().map_err(|e| Failure::input(format!("line {ln}: {e}")))?;
            let a = analyze_spectrum(validate(&row.values, opts)?, opts)?;
            Ok((format!("{header}{}", render_analysis(&a, None, None, opts.format)), 0))
        }
        InputKind::Batch => {
            // Every row must succeed; the first failure decides the exit code.
            let rows = parse_spectra(&text);
            if rows.is_empty() {
                return Err(Failure::input("empty batch"));
            }
            let results: Vec<CliResult<String>> = rows
                .par_iter()
                .map(|(ln, row)| {
                    let row = row.as_ref().map_err(|e| Failure::input(format!("line {ln}: {e}")))?;
                    let a = analyze_spectrum(validate(&row.values, opts)?, opts)
                        .map_err(|f| Failure { code: f.code, message: format!("line {ln}: {}", f.message) })?;
                    Ok(render_analysis(&a, Some(&row.label), None, opts.format))
                })
                .collect();
            let mut out = header.to_string();
            for r in results {
                out.push_str(&r?);
            }
            Ok((out, 0))
        }
    }
}

// ------------------------------------------------------------------- scan

struct ScanRow {
    label: String,
    result: Result<Analysis, String>,
}

#[derive(Serialize)]
struct ScanRecord<'a> {
    label: &'a str,
    d_min: Option<F17>,
    q: Option<F17>,
    argmax: Option<usize>,
    truncation: Option<TruncationRecord>,
    error: Option<&'a str>,
}

fn cmd_scan(opts: &Opts, path: &str) -> Outcome {
    let text = read_source(path).map_err(Failure::input)?;
    let rows = parse_spectra(&text);
    if rows.is_empty() {
        return Err(Failure::input("empty batch"));
    }
    let results: Vec<ScanRow> = rows
        .par_iter()
        .map(|(ln, row)| match row {
            Err(e) => ScanRow { label: format!("line {ln}"), result: Err(e.clone()) },
            Ok(LabeledSpectrum { label, values }) => ScanRow {
                label: label.clone(),
                result: validate(values, opts).and_then(|s| analyze_spectrum(s, opts)).map_err(|f| f.message),
            },
        })
        .collect();
    let mut out = String::new();
    match opts.format {
        Format::Csv => out.push_str("label,d_min,q,argmax,target,delta_n,delta_d,truncation_error,error\n"),
        Format::Human => {
            let _ = writeln!(out, "{:<16} {:>13} {:>10} {:>6}  {:<8} {:>13}  error", "label", "D_min", "Q", "argmax", "target", "trunc_error");
        }
        Format::JsonLines => {}
    }
    for row in &results {
        let (a, err) = match &row.result {
            Ok(a) => (Some(a), None),
            Err(e) => (None, Some(e.as_str())),
        };
        let t = a.and_then(|a| a.truncation.as_ref());
        match opts.format {
            Format::JsonLines => out.push_str(&json_line(&ScanRecord {
                label: &row.label,
                d_min: a.map(|a| F17(a.report.d_min)),
                q: a.and_then(|a| a.report.q).map(F17),
                argmax: a.and_then(|a| a.report.argmax),
                truncation: t.map(truncation_record),
                error: err,
            })),
            Format::Csv => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    csv_field(&row.label),
                    a.map(|a| f17(a.report.d_min)).unwrap_or_default(),
                    a.and_then(|a| a.report.q).map(f17).unwrap_or_default(),
                    a.and_then(|a| a.report.argmax).map(|j| j.to_string()).unwrap_or_default(),
                    a.map(|a| format!("{}:{}", a.spectrum.setting().n_particles(), a.spectrum.setting().dim())).unwrap_or_default(),
                    t.map(|t| t.plan.delta_n.to_string()).unwrap_or_default(),
                    t.map(|t| t.plan.delta_d.to_string()).unwrap_or_default(),
                    t.map(|t| f17(t.plan.error_bound)).unwrap_or_default(),
                    csv_field(err.unwrap_or("")),
                );
            }
            Format::Human => {
                let _ = writeln!(
                    out,
                    "{:<16} {:>13} {:>10} {:>6}  {:<8} {:>13}  {}",
                    row.label,
                    a.map(|a| short(a.report.d_min)).unwrap_or_default(),
                    a.and_then(|a| a.report.q).map(|q| format!("{q:.6}")).unwrap_or_default(),
                    a.and_then(|a| a.report.argmax).map(|j| j.to_string()).unwrap_or_default(),
                    a.map(|a| a.spectrum.setting().to_string()).unwrap_or_default(),
                    t.map(|t| short(t.plan.error_bound)).unwrap_or_default(),
                    err.unwrap_or(""),
                );
            }
        }
    }
    let code = if results.iter().all(|r| r.result.is_err()) { 1 } else { 0 };
    if code != 0 {
        eprintln!("error: every row of the batch failed");
    }
    Ok((out, code))
}

// ----------------------------------------------------------------- verify

fn setting_arg(opts: &Opts, positional: Option<String>) -> CliResult<Option<Setting>> {
    match (positional, opts.setting) {
        (Some(p), _) => Ok(Some(parse_setting(&p).map_err(Failure::input)?)),
        (None, s) => Ok(s),
    }
}

#[derive(Serialize)]
struct BoundJson {
    pairs: Vec<[usize; 2]>,
    c: Vec<String>,
}

fn bound_json(b: &ClassBound) -> BoundJson {
    match b {
        ClassBound::Pairs(p) => BoundJson { pairs: p.iter().map(|(q, _)| [q.r, q.s]).collect(), c: p.iter().map(|(_, c)| c.to_string()).collect() },
        ClassBound::Scalar(c) => BoundJson { pairs: Vec::new(), c: vec![c.to_string()] },
    }
}

#[derive(Serialize)]
struct VerifyRowRecord {
    record: &'static str,
    setting: [usize; 2],
    index: usize,
    #[serde(rename = "match")]
    matches: bool,
    table: BoundJson,
    derived: BoundJson,
    non_closed_table_pairs: Vec<[usize; 2]>,
}

#[derive(Serialize)]
struct VerifySummaryRecord {
    record: &'static str,
    setting: [usize; 2],
    matched: usize,
    total: usize,
}

fn render_verify(report: &VerifyReport, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Human => out.push_str(&report.to_string()),
        Format::JsonLines => {
            for r in &report.rows {
                out.push_str(&json_line(&row_record(report.setting, r)));
            }
            out.push_str(&json_line(&VerifySummaryRecord {
                record: "summary",
                setting: pair_of(report.setting),
                matched: report.matched(),
                total: report.rows.len(),
            }));
        }
        Format::Csv => {
            for r in &report.rows {
                let nc: Vec<String> = r.non_closed_table_pairs.iter().map(|p| p.to_string()).collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    csv_field(&report.setting.to_string()),
                    r.index,
                    r.matches,
                    csv_field(&describe_bound(&r.table)),
                    csv_field(&describe_bound(&r.derived)),
                    csv_field(&nc.join(" "))
                );
            }
        }
    }
    out
}

fn row_record(setting: Setting, r: &RowReport) -> VerifyRowRecord {
    VerifyRowRecord {
        record: "row",
        setting: pair_of(setting),
        index: r.index,
        matches: r.matches,
        table: bound_json(&r.table),
        derived: bound_json(&r.derived),
        non_closed_table_pairs: r.non_closed_table_pairs.iter().map(|p| [p.r, p.s]).collect(),
    }
}

/// The §V narrative for the Borland–Dennis setting: memberships over the
/// admissible pairs, the minimal pair and the tightness witness.
fn borland_dennis_details(model: &PolytopeModel) -> CliResult<String> {
    let mut out = String::new();
    let d = &model.catalog().inequalities[0];
    for k in 1..=3 {
        let p = FacetPair { r: k, s: k };
        let m = model.class_membership(d, p).map_err(Failure::input)?;
        let _ = writeln!(out, "class C{p}: {}", if m == Membership::Member { "member" } else { "not member" });
    }
    let res = model.derive_class(d).map_err(Failure::input)?;
    let pairs: Vec<String> = res.minimal_pairs.iter().map(|p| p.to_string()).collect();
    let _ = writeln!(out, "minimal pairs: {}", pairs.join(" "));
    if let Some(DerivedBound::Pairs(pf)) = &res.bound {
        for p in pf {
            let w: Vec<String> = p.witness.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "prefactor c{} = {}, attained at lambda = ({})", p.pair, p.c, w.join(", "));
        }
    }
    let _ = writeln!(out, "facet F_D: 2 - l1 - l2 - l4 = 0, Delta kappa_max = 1, dist(F_D) = 2 D");
    Ok(out)
}

fn cmd_verify(
    opts: &Opts,
    target: Option<String>,
    all: bool,
    rows: Vec<usize>,
    sample_size: Option<usize>,
    seed: u64,
    catalog_path: Option<PathBuf>,
) -> Outcome {
    let settings: Vec<Setting> = match (all, setting_arg(opts, target)?) {
        (true, None) => Setting::KNOWN.to_vec(),
        (false, Some(s)) => vec![s],
        (true, Some(_)) => return Err(Failure::input("--all conflicts with an explicit setting")),
        (false, None) => return Err(Failure::input("verify needs a setting (N,d, --setting or --all)")),
    };
    let dump: Option<std::sync::Arc<std::sync::Mutex<BufWriter<File>>>> = match &opts.lp_dump {
        Some(p) => Some(std::sync::Arc::new(std::sync::Mutex::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::input(format!("creating {}: {e}", p.display())))?,
        )))),
        None => None,
    };
    let mut out = String::new();
    let mut all_match = true;
    for setting in settings {
        let imported: ConstraintCatalog;
        let catalog: &ConstraintCatalog = match &catalog_path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Failure::input(format!("reading {}: {e}", p.display())))?;
                imported = ConstraintCatalog::import(setting, &text).map_err(Failure::input)?;
                &imported
            }
            None => load_setting(setting).map_err(Failure::input)?,
        };
        let mut model = PolytopeModel::new(catalog);
        if let Some(d) = &dump {
            model = model.with_dump(Box::new(SharedWriter(d.clone())));
        }
        let indices: Vec<usize> = if !rows.is_empty() {
            rows.clone()
        } else if let Some(k) = sample_size {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<usize> = sample(&mut rng, catalog.len(), k.min(catalog.len())).into_iter().map(|i| i + 1).collect();
            v.sort_unstable();
            v
        } else {
            catalog.inequalities.iter().map(|c| c.index).collect()
        };
        let report = model.verify_rows(&indices).map_err(Failure::input)?;
        all_match &= report.all_match();
        out.push_str(&render_verify(&report, opts.format));
        if setting == Setting::BORLAND_DENNIS && opts.format == Format::Human {
            out.push_str(&borland_dennis_details(&model)?);
        }
    }
    if let Some(d) = dump {
        d.lock().expect("dump writer").flush().map_err(|e| Failure::input(format!("writing LP dump: {e}")))?;
    }
    if !all_match {
        eprintln!("error: catalog verification found mismatches");
    }
    Ok((out, if all_match { 0 } else { 3 }))
}

struct SharedWriter(std::sync::Arc<std::sync::Mutex<BufWriter<File>>>);

impl std::io::Write for SharedWriter {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.lock().expect("dump writer").write(buf)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.0.lock().expect("dump writer").flush()
    }
}

// ---------------------------------------------------------- pin-structure

#[derive(Serialize)]
struct ConfigRecord<'a> {
    record: &'static str,
    set: &'a str,
    orbitals: Vec<usize>,
}

#[derive(Serialize)]
struct PinSummary {
    record: &'static str,
    setting: [usize; 2],
    constraint: Option<usize>,
    pair: Option<[usize; 2]>,
    i_d: Option<usize>,
    i_s: Option<usize>,
    inclusion: Option<bool>,
    s_minus_d: Option<usize>,
}

fn cmd_pin_structure(opts: &Opts, constraint: Option<usize>, pair: Option<(usize, usize)>, cell: Option<String>) -> Outcome {
    let setting = opts.setting.ok_or_else(|| Failure::input("pin-structure needs --setting N,d"))?;
    let pair = match (pair, cell) {
        (Some(_), Some(_)) => return Err(Failure::input("give --pair or --cell, not both")),
        (Some((r, s)), None) => Some(FacetPair::new(r, s, setting).map_err(Failure::input)?),
        (None, Some(c)) => {
            let entry: Vec<usize> = c
                .trim_matches(|ch| ch == '{' || ch == '}')
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Failure::input(format!("bad cell `{c}`"))))
                .collect::<CliResult<_>>()?;
            Some(decode_pair_notation(&entry, setting).map_err(Failure::input)?)
        }
        (None, None) => None,
    };
    if constraint.is_none() && pair.is_none() {
        return Err(Failure::input("give --constraint J and/or --pair r,s"));
    }
    let i_d = match constraint {
        Some(j) => {
            let catalog = load_setting(setting).map_err(Failure::input)?;
            let c = catalog.get(j).ok_or_else(|| Failure::input(format!("UnknownConstraint: {setting} has no constraint {j}")))?;
            Some(pinned_configurations(c, setting).map_err(Failure::input)?)
        }
        None => None,
    };
    let i_s = match pair {
        Some(p) => Some(pc_configurations(p, setting).map_err(Failure::input)?),
        None => None,
    };
    let s_minus_d: Option<Vec<_>> = match (&i_d, &i_s) {
        (Some(d), Some(s)) => Some(s.iter().filter(|c| !d.contains(c)).copied().collect()),
        _ => None,
    };
    let mut out = String::new();
    let sets: Vec<(&str, &Vec<_>)> = [("I_D", i_d.as_ref()), ("I_S", i_s.as_ref())]
        .into_iter()
        .filter_map(|(n, v)| v.map(|v| (n, v)))
        .collect();
    match opts.format {
        Format::Human => {
            for (name, v) in &sets {
                let what = if *name == "I_D" {
                    format!("constraint {}", constraint.unwrap_or_default())
                } else {
                    format!("pair {}", pair.expect("pair set"))
                };
                let _ = writeln!(out, "{name} ({what}): {} configurations", v.len());
                for c in v.iter() {
                    let _ = writeln!(out, "  {c}");
                }
            }
            if let Some(sd) = &s_minus_d {
                let _ = writeln!(out, "I_S subset of I_D: {}", sd.is_empty());
                for c in sd {
                    let _ = writeln!(out, "  in I_S but not I_D: {c}");
                }
            }
        }
        Format::JsonLines => {
            for (name, v) in &sets {
                for c in v.iter() {
                    out.push_str(&json_line(&ConfigRecord { record: "configuration", set: name, orbitals: c.orbitals() }));
                }
            }
            out.push_str(&json_line(&PinSummary {
                record: "summary",
                setting: pair_of(setting),
                constraint,
                pair: pair.map(|p| [p.r, p.s]),
                i_d: i_d.as_ref().map(|v| v.len()),
                i_s: i_s.as_ref().map(|v| v.len()),
                inclusion: s_minus_d.as_ref().map(|v| v.is_empty()),
                s_minus_d: s_minus_d.as_ref().map(|v| v.len()),
            }));
        }
        Format::Csv => {
            out.push_str("set,orbitals\n");
            for (name, v) in &sets {
                for c in v.iter() {
                    let o: Vec<String> = c.orbitals().iter().map(|x| x.to_string()).collect();
                    let _ = writeln!(out, "{name},{}", o.join(" "));
                }
            }
        }
    }
    Ok((out, 0))
}

// ---------------------------------------------------------------- catalog

fn cmd_catalog(opts: &Opts, target: Option<String>) -> Outcome {
    let setting = setting_arg(opts, target)?.ok_or_else(|| Failure::input("catalog needs a setting (N,d or --setting)"))?;
    let cat = load_setting(setting).map_err(Failure::input)?;
    let mut out = String::new();
    match opts.format {
        Format::JsonLines => out.push_str(&cat.export()),
        Format::Csv => {
            out.push_str("kind,index,kappa,pairs,cell,c\n");
            for c in &cat.inequalities {
                let kappa: Vec<String> = c.coeffs.iter().map(|k| k.to_string()).collect();
                let pairs: Vec<String> = c.minimal_pairs().iter().map(|p| p.to_string()).collect();
                let cs = match &c.bound {
                    ClassBound::Pairs(p) => p.iter().map(|(_, c)| c.to_string()).collect::<Vec<_>>().join(" "),
                    ClassBound::Scalar(s) => s.to_string(),
                };
                let _ = writeln!(
                    out,
                    "inequality,{},{},{},{},{}",
                    c.index,
                    kappa.join(" "),
                    csv_field(&pairs.join(" ")),
                    csv_field(&format_pair_cell(&c.minimal_pairs(), setting)),
                    cs
                );
            }
            for (k, e) in cat.equalities.iter().enumerate() {
                let kappa: Vec<String> = e.iter().map(|k| k.to_string()).collect();
                let _ = writeln!(out, "equality,{},{},,,", k + 1, kappa.join(" "));
            }
        }
        Format::Human => {
            let _ = writeln!(out, "# {} generalized Pauli constraints for {}", cat.len(), setting);
            let _ = writeln!(out, "# D_j = kappa0 + sum_i kappa_i l_i >= 0 | minimal pairs (r,s) [table cell] | prefactors");
            for c in &cat.inequalities {
                let kappa: Vec<String> = c.coeffs.iter().map(|k| format!("{k:>2}")).collect();
                let pairs: Vec<String> = c.minimal_pairs().iter().map(|p| p.to_string()).collect();
                let cell = format_pair_cell(&c.minimal_pairs(), setting);
                let _ = writeln!(out, "{:>4} | {} | {} [{}] | {}", c.index, kappa.join(" "), pairs.join(" "), cell, describe_bound(&c.bound));
            }
            for (k, e) in cat.equalities.iter().enumerate() {
                let kappa: Vec<String> = e.iter().map(|k| format!("{k:>2}")).collect();
                let _ = writeln!(out, "  e{} | {} | equality", k + 1, kappa.join(" "));
            }
        }
    }
    Ok((out, 0))
}

// --------------------------------------------------------------- truncate

#[derive(Serialize)]
struct TruncateRecord {
    record: &'static str,
    source: [usize; 2],
    target: [usize; 2],
    delta_n: usize,
    delta_d: usize,
    error_bound: F17,
    lambda: Vec<F17>,
}

#[derive(Serialize)]
struct ConstraintErrorRecord {
    record: &'static str,
    index: usize,
    max_abs_kappa: i64,
    error_bound: F17,
}

fn cmd_truncate(opts: &Opts, input: Option<String>, lambda: Option<String>, delta_n: Option<usize>, delta_d: Option<usize>) -> Outcome {
    let text = load_input(input, lambda)?;
    let rows = parse_spectra(&text);
    let [(ln, row)] = rows.as_slice() else {
        return Err(Failure::input(format!("expected exactly one spectrum, found {}", rows.len())));
    };
    let row = row.as_ref().map_err(|e| Failure::input(format!("line {ln}: {e}")))?;
    let spectrum = validate(&row.values, opts)?;
    let t = match (delta_n, delta_d) {
        (Some(dn), Some(dd)) => {
            let plan = TruncationPlan::new(spectrum.setting(), dn, dd).map_err(Failure::input)?;
            truncate(&spectrum, plan, opts.budget, opts.tol).map_err(Failure::input)?
        }
        (None, None) => {
            let budget = opts.budget.ok_or_else(|| Failure::input("automatic truncation needs --budget"))?;
            auto_truncate(&spectrum, budget, opts.tol).map_err(Failure::input)?
        }
        _ => return Err(Failure::input("give both --delta-n and --delta-d, or neither")),
    };
    let per_constraint: Vec<(usize, i64, f64)> = match load_setting(t.plan.target) {
        Ok(cat) => cat
            .inequalities
            .iter()
            .map(|c| (c.index, max_abs_kappa(c), max_abs_kappa(c) as f64 * t.plan.error_bound))
            .collect(),
        Err(_) => Vec::new(),
    };
    let mut out = String::new();
    match opts.format {
        Format::JsonLines => {
            out.push_str(&json_line(&TruncateRecord {
                record: "truncation",
                source: pair_of(t.plan.source),
                target: pair_of(t.plan.target),
                delta_n: t.plan.delta_n,
                delta_d: t.plan.delta_d,
                error_bound: F17(t.plan.error_bound),
                lambda: f17_vec(t.spectrum.values()),
            }));
            for (index, k, e) in &per_constraint {
                out.push_str(&json_line(&ConstraintErrorRecord { record: "constraint", index: *index, max_abs_kappa: *k, error_bound: F17(*e) }));
            }
        }
        Format::Csv => {
            out.push_str("source,target,delta_n,delta_d,error_bound,lambda\n");
            let l: Vec<String> = t.spectrum.values().iter().map(|v| f17(*v)).collect();
            let _ = writeln!(
                out,
                "{}:{},{}:{},{},{},{},{}",
                t.plan.source.n_particles(),
                t.plan.source.dim(),
                t.plan.target.n_particles(),
                t.plan.target.dim(),
                t.plan.delta_n,
                t.plan.delta_d,
                f17(t.plan.error_bound),
                l.join(" ")
            );
        }
        Format::Human => {
            let _ = writeln!(
                out,
                "{} -> {} (dN={}, dd={}), error bound {}",
                t.plan.source,
                t.plan.target,
                t.plan.delta_n,
                t.plan.delta_d,
                short(t.plan.error_bound)
            );
            let vals: Vec<String> = t.spectrum.values().iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "lambda' = [{}]", vals.join(", "));
            if !per_constraint.is_empty() {
                let worst = per_constraint.iter().map(|x| x.2).fold(0.0, f64::max);
                let _ = writeln!(out, "largest per-constraint bound max|kappa| * error: {}", short(worst));
            }
        }
    }
    Ok((out, 0))
}
