//! Subcommands and the process-level entry point.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nfib_core::charpoly::{
    characteristic_polynomial, classify_dominance, exact_multiplicity_structure, find_roots, DEFAULT_RESIDUAL_TOL,
    DEFAULT_TIE_TOL,
};
use nfib_core::criteria::{dubeau_certified, dubeau_check, ostrowski_check};
use nfib_core::ratio::{
    audit_part_i, audit_part_ii, batch_audit, condition_11_estimate, default_condition_11_samples, degeneracy_check,
    estimate_ratio_limit_in, preferred_mode, AuditOptions, EntryKind, EvidenceStatus, InstanceSource, RatioOptions,
    RatioStatus, DEFAULT_DEGENERACY_TOL, DEFAULT_EXACT_MAX_K,
};
use nfib_core::recurrence::{generate, zero_run_stats, SequenceWindow};
use nfib_core::{Error, ExactComplex, InitialConditions, Mode, Recurrence, Scalar};
use serde_json::{json, Value};

use crate::config::{self, ConfigError, FileConfig};
use crate::family::family_table;
use crate::oeis::{self, batch_verify, signature_query, OeisClient, OeisError};
use crate::report::{opt_complex, sig, sig_complex, Finding, ReportDocument, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNAVAILABLE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nfib", version, about = "Weighted n-generalized Fibonacci sequences: generation, roots, ratio limits, audits")]
pub struct Cli {
    /// JSON file with default values for any option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Integer,
    Rational,
    GaussianRational,
    Float,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the terms F_{-n+1}..F_count.
    Generate(GenerateArgs),
    /// Characteristic roots, dominance and the two criteria.
    Analyze(AnalyzeArgs),
    /// Estimate lim F_{k+1}/F_k.
    Ratio(RatioArgs),
    /// Check both parts of the ratio-limit theorem on one instance.
    Audit(AuditArgs),
    /// Audit a reproducible batch of random instances.
    AuditRandom(AuditRandomArgs),
    /// Dominant roots of the weights (p, ..., p) as the order grows.
    Family(FamilyArgs),
    /// Check OEIS sequences against their signatures.
    #[command(subcommand)]
    Oeis(OeisCommand),
}

#[derive(Args, Debug, Clone, Default)]
pub struct WeightsArgs {
    /// Comma-separated weights b_1..b_n, e.g. 1,-2,3/2+1/3i.
    #[arg(long, allow_hyphen_values = true)]
    pub weights: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct InstanceArgs {
    #[command(flatten)]
    pub weights: WeightsArgs,
    /// Comma-separated initial values a_{-n+1}..a_0.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RootArgs {
    #[arg(long)]
    pub residual_tol: Option<f64>,
    #[arg(long)]
    pub tie_tol: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RatioTolArgs {
    #[arg(long)]
    pub ratio_tol: Option<f64>,
    #[arg(long)]
    pub max_k: Option<usize>,
    #[arg(long)]
    pub stability_window: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Number of terms past F_0 [default: 20]
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub weights: WeightsArgs,
    #[command(flatten)]
    pub roots: RootArgs,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Args, Debug)]
pub struct RatioArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub ratio: RatioTolArgs,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub roots: RootArgs,
    #[command(flatten)]
    pub ratio: RatioTolArgs,
    #[arg(long)]
    pub degeneracy_tol: Option<f64>,
    /// Horizon for the zero-term scan and the growth samples (at least 4n).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Arithmetic for ratios and growth samples; exact when the inputs allow it.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Exit with status 3 when a claim is violated.
    #[arg(long)]
    pub fail_on_violation: bool,
}

#[derive(Args, Debug)]
pub struct AuditRandomArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Order range, e.g. 2..4.
    #[arg(long, default_value = "2..4")]
    pub n: String,
    #[arg(long, value_enum, default_value = "integer")]
    pub kind: KindArg,
    #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
    pub lo: i64,
    #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
    pub hi: i64,
    #[arg(long, default_value_t = 4)]
    pub max_denominator: i64,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[command(flatten)]
    pub roots: RootArgs,
    #[command(flatten)]
    pub ratio: RatioTolArgs,
    #[arg(long)]
    pub degeneracy_tol: Option<f64>,
    #[arg(long)]
    pub fail_on_violation: bool,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    /// The common weight, a positive real literal such as 1 or 1/2.
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[command(flatten)]
    pub roots: RootArgs,
    #[command(flatten)]
    pub ratio: RatioTolArgs,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OeisSourceArgs {
    /// Read only from the cache directory.
    #[arg(long)]
    pub offline: bool,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Search results fetched per signature.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Relative tolerance for the tail ratio against lambda0.
    #[arg(long)]
    pub tail_tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum OeisCommand {
    /// Verify the entries found for one signature.
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        signature: String,
        #[command(flatten)]
        source: OeisSourceArgs,
    },
    /// Verify the signatures (m, ..., m) over ranges of m and lengths.
    Batch {
        #[arg(long, default_value = "1..3")]
        m: String,
        #[arg(long, default_value = "2..4")]
        lengths: String,
        #[command(flatten)]
        source: OeisSourceArgs,
    },
}

/// A failure together with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } | Error::ZeroRunBoundViolated { .. } => EXIT_UNAVAILABLE,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<OeisError> for Failure {
    fn from(e: OeisError) -> Self {
        let code = match e {
            OeisError::InvalidSignature(_) => EXIT_USAGE,
            _ => EXIT_UNAVAILABLE,
        };
        Failure { code, message: e.to_string() }
    }
}

/// What a command produced: a document, a table and the exit status.
pub struct Outcome {
    pub document: ReportDocument,
    pub table: String,
    pub code: i32,
}

/// Parses `args` (program name first), runs the command and writes to `out`
/// and `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli) {
        Ok((format, outcome)) => {
            let text = match format {
                Format::Json => outcome.document.to_json(),
                Format::Table => outcome.table,
            };
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            outcome.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: Cli) -> Result<(Format, Outcome), Failure> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let format = match (cli.format, file.format.as_deref()) {
        (Some(f), _) => f,
        (None, Some("json")) | (None, None) => Format::Json,
        (None, Some("table")) => Format::Table,
        (None, Some(other)) => return Err(Failure::usage(format!("format must be json or table, got {other:?}"))),
    };
    let outcome = match cli.command {
        Command::Generate(a) => cmd_generate(&a, &file),
        Command::Analyze(a) => cmd_analyze(&a, &file),
        Command::Ratio(a) => cmd_ratio(&a, &file),
        Command::Audit(a) => cmd_audit(&a, &file),
        Command::AuditRandom(a) => cmd_audit_random(&a, &file),
        Command::Family(a) => cmd_family(&a, &file),
        Command::Oeis(OeisCommand::Verify { signature, source }) => cmd_oeis_verify(&signature, &source, &file),
        Command::Oeis(OeisCommand::Batch { m, lengths, source }) => cmd_oeis_batch(&m, &lengths, &source, &file),
    }?;
    Ok((format, outcome))
}

struct Instance {
    weights: Vec<ExactComplex>,
    init: Vec<ExactComplex>,
    rec: Recurrence<ExactComplex>,
    ic: InitialConditions<ExactComplex>,
}

fn load_weights(args: &WeightsArgs, file: &FileConfig) -> Result<(Vec<ExactComplex>, Recurrence<ExactComplex>), Failure> {
    let text = args
        .weights
        .clone()
        .or_else(|| file.weights.as_ref().map(|w| w.to_text()))
        .ok_or_else(|| Failure::usage("--weights is required"))?;
    let weights = config::parse_scalar_list("weights", &text)?;
    let rec = Recurrence::new(weights.clone())?;
    Ok((weights, rec))
}

fn load_instance(args: &InstanceArgs, file: &FileConfig) -> Result<Instance, Failure> {
    let (weights, rec) = load_weights(&args.weights, file)?;
    let text = args
        .init
        .clone()
        .or_else(|| file.init.as_ref().map(|w| w.to_text()))
        .ok_or_else(|| Failure::usage("--init is required"))?;
    let init = config::parse_scalar_list("init", &text)?;
    let ic = InitialConditions::new(&rec, init.clone())?;
    Ok(Instance { weights, init, rec, ic })
}

fn literals(values: &[ExactComplex]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

fn tolerance(name: &str, flag: Option<f64>, file: Option<f64>, default: f64) -> Result<f64, Failure> {
    Ok(config::positive(name, flag.or(file).unwrap_or(default))?)
}

fn mode_choice(flag: Option<ModeArg>, file: &FileConfig) -> Result<Option<Mode>, Failure> {
    match (flag, file.mode.as_deref()) {
        (Some(m), _) => Ok(Some(m.into())),
        (None, Some(text)) => Ok(Some(config::parse_mode(text)?)),
        (None, None) => Ok(None),
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

fn ratio_options(args: &RatioTolArgs, file: &FileConfig) -> Result<RatioOptions, Failure> {
    let d = RatioOptions::default();
    Ok(RatioOptions {
        tol: tolerance("ratio tolerance", args.ratio_tol, file.ratio_tol, d.tol)?,
        max_k: args.max_k.or(file.max_k).unwrap_or(d.max_k),
        stability_window: args.stability_window.or(file.stability_window).unwrap_or(d.stability_window),
    })
}

fn root_tolerances(args: &RootArgs, file: &FileConfig) -> Result<(f64, f64), Failure> {
    Ok((
        tolerance("residual tolerance", args.residual_tol, file.residual_tol, DEFAULT_RESIDUAL_TOL)?,
        tolerance("tie tolerance", args.tie_tol, file.tie_tol, DEFAULT_TIE_TOL)?,
    ))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn cmd_generate(args: &GenerateArgs, file: &FileConfig) -> Result<Outcome, Failure> {
    let inst = load_instance(&args.instance, file)?;
    let count = args.count.or(file.count).unwrap_or(20);
    if count < 1 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    let mode = mode_choice(args.mode, file)?.unwrap_or(Mode::Exact);
    let win = generate(&inst.rec, &inst.ic, count, mode)?;
    let zeros = zero_run_stats(&win, inst.rec.order())?;
    let mut terms = Vec::with_capacity(win.len());
    let mut rows = Vec::with_capacity(win.len());
    for k in win.start_index()..=win.end_index() {
        match &win {
            SequenceWindow::Exact(w) => {
                let t = w.term(k);
                terms.push(json!({ "k": k, "exact": t, "value": t.to_approx() }));
                rows.push(vec![k.to_string(), t.to_string()]);
            }
            SequenceWindow::Float(w) => {
                let t = w.term(k);
                terms.push(json!({ "k": k, "value": t, "ln_modulus": w.ln_modulus(k) }));
                rows.push(vec![k.to_string(), sig_complex(t)]);
            }
        }
    }
    let inputs = json!({
        "weights": literals(&inst.weights),
        "init": literals(&inst.init),
        "count": count,
        "mode": mode_name(mode),
    });
    let results = json!({
        "mode": mode_name(mode),
        "start_index": win.start_index(),
        "end_index": win.end_index(),
        "terms": terms,
        "zero_runs": zeros,
    });
    let mut table = Table::new();
    table.field("mode", mode_name(mode)).rows(&["k", "F_k"], &rows);
    Ok(Outcome { document: ReportDocument::new("generate", inputs, results, vec![]), table: table.finish(), code: EXIT_OK })
}

fn analyze_with<S: Scalar>(
    rec: &Recurrence<S>,
    residual_tol: f64,
    tie_tol: f64,
) -> Result<(Value, Table), Failure> {
    let poly = characteristic_polynomial(rec);
    let roots = find_roots(&poly, residual_tol)?;
    let dominance = classify_dominance(&roots, tie_tol);
    let ostrowski = ostrowski_check(rec);
    let dubeau = dubeau_check(rec, &roots)?;
    let certified = dubeau_certified(&dubeau);
    let exact_structure = poly.to_exact().map(|p| {
        exact_multiplicity_structure(&p)
            .into_iter()
            .map(|(degree, multiplicity)| json!({ "factor_degree": degree, "multiplicity": multiplicity }))
            .collect::<Vec<_>>()
    });
    let results = json!({
        "polynomial": poly.to_string(),
        "roots": roots,
        "exact_multiplicity_structure": exact_structure,
        "dominance": dominance,
        "criteria": { "ostrowski": ostrowski, "dubeau": dubeau, "dubeau_certified": certified },
    });
    let mut table = Table::new();
    table
        .field("polynomial", poly.to_string())
        .field("asymptotically simple", dominance.is_asymptotically_simple)
        .field("lambda0", opt_complex(dominance.lambda0))
        .field("nu", dominance.nu.map(|v| v.to_string()).unwrap_or_else(|| "-".into()))
        .field("max modulus", sig(dominance.max_modulus))
        .field("ostrowski", format!("{:?}", ostrowski.status))
        .field("dubeau certified", opt_complex(certified));
    let rows: Vec<Vec<String>> = roots
        .roots
        .iter()
        .zip(&dubeau)
        .map(|(r, d)| {
            let lhs = match d.detail {
                nfib_core::criteria::CriterionDetail::Dubeau { lhs, .. } => sig(lhs),
                _ => "-".into(),
            };
            vec![sig_complex(r.value), sig(r.value.norm()), r.multiplicity.to_string(), lhs, format!("{:?}", d.status)]
        })
        .collect();
    table.rows(&["root", "modulus", "mult", "dubeau L", "dubeau"], &rows);
    Ok((results, table))
}

fn cmd_analyze(args: &AnalyzeArgs, file: &FileConfig) -> Result<Outcome, Failure> {
    let (weights, rec) = load_weights(&args.weights, file)?;
    let (residual_tol, tie_tol) = root_tolerances(&args.roots, file)?;
    let mode = mode_choice(args.mode, file)?.unwrap_or(Mode::Exact);
    let (results, table) = match mode {
        Mode::Exact => analyze_with(&rec, residual_tol, tie_tol)?,
        Mode::Float => analyze_with(&rec.to_approx(), residual_tol, tie_tol)?,
    };
    let inputs = json!({
        "weights": literals(&weights),
        "mode": mode_name(mode),
        "residual_tol": residual_tol,
        "tie_tol": tie_tol,
    });
    Ok(Outcome { document: ReportDocument::new("analyze", inputs, results, vec![]), table: table.finish(), code: EXIT_OK })
}

fn cmd_ratio(args: &RatioArgs, file: &FileConfig) -> Result<Outcome, Failure> {
    let inst = load_instance(&args.instance, file)?;
    let opts = ratio_options(&args.ratio, file)?;
    let mode = mode_choice(args.mode, file)?.unwrap_or(Mode::Float);
    let estimate = estimate_ratio_limit_in(&inst.rec, &inst.ic, &opts, mode)?;
    let code = if estimate.status == RatioStatus::Converged { EXIT_OK } else { EXIT_UNAVAILABLE };
    let inputs = json!({
        "weights": literals(&inst.weights),
        "init": literals(&inst.init),
        "mode": mode_name(mode),
        "ratio": opts,
    });
    let mut table = Table::new();
    table
        .field("status", format!("{:?}", estimate.status))
        .field("value", opt_complex(estimate.value))
        .field("k converged", estimate.k_converged.map(|k| k.to_string()).unwrap_or_else(|| "-".into()))
        .field("last residual", sig(estimate.last_residual))
        .field("skipped zero indices", abbreviate(&estimate.skipped_zero_indices))
        .field("empirical k0", estimate.empirical_k0.map(|k| k.to_string()).unwrap_or_else(|| "-".into()))
        .field("horizon", estimate.horizon)
        .field("mode", mode_name(mode));
    let results = json!({ "estimate": estimate });
    Ok(Outcome { document: ReportDocument::new("ratio", inputs, results, vec![]), table: table.finish(), code })
}

fn abbreviate(ks: &[i64]) -> String {
    const SHOWN: usize = 8;
    if ks.len() <= SHOWN {
        return format!("{ks:?}");
    }
    let head: Vec<String> = ks[..SHOWN].iter().map(|k| k.to_string()).collect();
    format!("[{}, ... ({} total)]", head.join(", "), ks.len())
}

fn cmd_audit(args: &AuditArgs, file: &FileConfig) -> Result<Outcome, Failure> {
    let inst = load_instance(&args.instance, file)?;
    let n = inst.rec.order();
    let (residual_tol, tie_tol) = root_tolerances(&args.roots, file)?;
    let ratio = ratio_options(&args.ratio, file)?;
    let degeneracy_tol =
        tolerance("degeneracy tolerance", args.degeneracy_tol, file.degeneracy_tol, DEFAULT_DEGENERACY_TOL)?;
    let horizon = args.horizon.or(file.horizon).unwrap_or(60);
    if horizon < 4 * n {
        return Err(Failure::usage(format!("horizon must be at least 4n = {}, got {horizon}", 4 * n)));
    }
    let natural = preferred_mode(&inst.rec, &inst.ic);
    let mode = mode_choice(args.mode, file)?.unwrap_or(natural);
    let opts = AuditOptions { ratio, tie_tol, degeneracy_tol, exact_max_k: DEFAULT_EXACT_MAX_K, prefer_exact: mode == Mode::Exact };

    let part_i = audit_part_i(&inst.rec, &inst.ic, horizon)?;
    let part_ii = match mode {
        Mode::Exact => audit_part_ii(&inst.rec, &inst.ic, &opts)?,
        Mode::Float => audit_part_ii(&inst.rec.to_approx(), &inst.ic.to_approx(), &opts)?,
    };
    let roots = find_roots(&characteristic_polynomial(&inst.rec), residual_tol)?;
    let dominance = classify_dominance(&roots, tie_tol);
    let simple = dominance.lambda0.zip(dominance.nu).filter(|_| dominance.is_asymptotically_simple);
    let (degeneracy, condition_11) = match simple {
        Some((lambda0, nu)) => {
            let ks = default_condition_11_samples(horizon as i64, 12);
            let c11 = match mode {
                Mode::Exact => condition_11_estimate(&inst.rec, &inst.ic, lambda0, nu, &ks, Mode::Exact)?,
                Mode::Float => {
                    condition_11_estimate(&inst.rec.to_approx(), &inst.ic.to_approx(), lambda0, nu, &ks, Mode::Float)?
                }
            };
            (Some(degeneracy_check(&inst.rec, &inst.ic, lambda0, degeneracy_tol)?), Some(c11))
        }
        None => (None, None),
    };
    let violated = [&part_i, &part_ii].iter().any(|e| e.status == EvidenceStatus::Violated);
    let code = if violated && args.fail_on_violation { EXIT_VIOLATION } else { EXIT_OK };
    let inputs = json!({
        "weights": literals(&inst.weights),
        "init": literals(&inst.init),
        "mode": mode_name(mode),
        "horizon": horizon,
        "residual_tol": residual_tol,
        "tie_tol": tie_tol,
        "degeneracy_tol": degeneracy_tol,
        "ratio": ratio,
    });
    let mut table = Table::new();
    table
        .field("lambda0", opt_complex(dominance.lambda0))
        .field("nu", dominance.nu.map(|v| v.to_string()).unwrap_or_else(|| "-".into()))
        .field("part i", format!("{:?}", part_i.status))
        .field("part ii", format!("{:?}", part_ii.status));
    if let Some(d) = &degeneracy {
        table
            .field("denominator", sig_complex(d.denominator))
            .field("degenerate", format!("{} ({})", d.degenerate, if d.exact { "exact" } else { "float" }));
    }
    if let Some(c) = &condition_11 {
        table.field("condition 11 trend", format!("{:?}", c.trend));
    }
    for ev in [&part_i, &part_ii] {
        if let Some(note) = &ev.note {
            let label = match ev.claim {
                nfib_core::ratio::Claim::PartI => "part i note",
                nfib_core::ratio::Claim::PartII => "part ii note",
            };
            table.field(label, note);
        }
    }
    let findings = vec![Finding::from_evidence(&part_i, None), Finding::from_evidence(&part_ii, None)];
    let results = json!({
        "dominance": dominance,
        "part_i": part_i,
        "part_ii": part_ii,
        "degeneracy": degeneracy,
        "condition_11": condition_11,
    });
    Ok(Outcome { document: ReportDocument::new("audit", inputs, results, findings), table: table.finish(), code })
}

fn cmd_audit_random(args: &AuditRandomArgs, file: &FileConfig) -> Result<Outcome, Failure> {
    let (n_min, n_max) = config::parse_range("n", &args.n)?;
    if n_min < 2 {
        return Err(Failure::usage("--n must start at 2 or more"));
    }
    if args.lo > args.hi || args.max_denominator < 1 {
        return Err(Failure::usage("need lo <= hi and max-denominator >= 1"));
    }
    let kind = match args.kind {
        KindArg::Integer => EntryKind::Integer,
        KindArg::Rational => EntryKind::Rational,
        KindArg::GaussianRational => EntryKind::GaussianRational,
        KindArg::Float => EntryKind::Float,
    };
    let horizon = args.horizon.or(file.horizon).unwrap_or(60);
    if horizon < 4 * n_max as usize {
        return Err(Failure::usage(format!("horizon must be at least 4n = {}, got {horizon}", 4 * n_max)));
    }
    let src = InstanceSource {
        kind,
        lo: args.lo,
        hi: args.hi,
        max_denominator: args.max_denominator,
        n_min: n_min as usize,
        n_max: n_max as usize,
        part_i_horizon: horizon,
    };
    let (_, tie_tol) = root_tolerances(&args.roots, file)?;
    let opts = AuditOptions {
        ratio: ratio_options(&args.ratio, file)?,
        tie_tol,
        degeneracy_tol: tolerance("degeneracy tolerance", args.degeneracy_tol, file.degeneracy_tol, DEFAULT_DEGENERACY_TOL)?,
        exact_max_k: DEFAULT_EXACT_MAX_K,
        prefer_exact: true,
    };
    let seed = args.seed.or(file.seed).unwrap_or(42);
    let count = args.count.or(file.count).unwrap_or(100);
    let report = batch_audit(&src, seed, count, &opts)?;
    let mut findings = Vec::new();
    for r in &report.records {
        for ev in [&r.part_i, &r.part_ii] {
            if ev.status == EvidenceStatus::Violated {
                findings.push(Finding::from_evidence(ev, Some(r.index)));
            }
        }
    }
    let code = if !findings.is_empty() && args.fail_on_violation { EXIT_VIOLATION } else { EXIT_OK };
    let s = &report.summary;
    let mut table = Table::new();
    table.field("seed", seed).field("count", s.count).field("errors", s.errors);
    table.rows(
        &["claim", "supported", "violated", "inconclusive"],
        &[
            vec!["part i".into(), s.part_i.supported.to_string(), s.part_i.violated.to_string(), s.part_i.inconclusive.to_string()],
            vec!["part ii".into(), s.part_ii.supported.to_string(), s.part_ii.violated.to_string(), s.part_ii.inconclusive.to_string()],
        ],
    );
    let inputs = json!({ "seed": seed, "count": count, "source": src, "options": opts });
    Ok(Outcome {
        document: ReportDocument::new("audit-random", inputs, to_value(&report), findings),
        table: table.finish(),
        code,
    })
}

fn cmd_family(args: &FamilyArgs, file: &FileConfig) -> Result<Outcome, Failure> {
    let p: ExactComplex = args.p.trim().parse().map_err(|e: Error| Failure::usage(format!("--p: {e}")))?;
    let (residual_tol, tie_tol) = root_tolerances(&args.roots, file)?;
    let ratio = ratio_options(&args.ratio, file)?;
    let fam = family_table(&p, args.n_min, args.n_max, residual_tol, tie_tol, &ratio)?;
    let code = if fam.monotone_increasing && fam.gaps_shrinking && fam.all_converged { EXIT_OK } else { EXIT_UNAVAILABLE };
    let mut table = Table::new();
    table
        .field("p", p.to_string())
        .field("limit", sig(fam.limit))
        .field("monotone increasing", fam.monotone_increasing)
        .field("gaps shrinking", fam.gaps_shrinking);
    let rows: Vec<Vec<String>> = fam
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), sig(r.lambda0), r.ratio_estimate.map(sig).unwrap_or_else(|| "-".into()), sig(r.gap)])
        .collect();
    table.rows(&["n", "lambda0", "ratio", "gap"], &rows);
    let inputs = json!({
        "p": p.to_string(),
        "n_min": args.n_min,
        "n_max": args.n_max,
        "residual_tol": residual_tol,
        "tie_tol": tie_tol,
        "ratio": ratio,
    });
    Ok(Outcome { document: ReportDocument::new("family", inputs, to_value(&fam), vec![]), table: table.finish(), code })
}

fn parse_signature(text: &str) -> Result<Vec<i64>, Failure> {
    let sig: Result<Vec<i64>, _> = text.split(',').map(|s| s.trim().parse::<i64>()).collect();
    match sig {
        Ok(s) if s.len() >= 2 => Ok(s),
        _ => Err(Failure::usage(format!("--signature must be at least two comma-separated integers, got {text:?}"))),
    }
}

struct OeisSettings {
    offline: bool,
    limit: usize,
    tail_tol: f64,
    cache_dir: PathBuf,
}

fn oeis_settings(source: &OeisSourceArgs, file: &FileConfig) -> Result<OeisSettings, Failure> {
    let limit = source.limit.or(file.limit).unwrap_or(10);
    if limit < 1 {
        return Err(Failure::usage("--limit must be at least 1"));
    }
    Ok(OeisSettings {
        offline: source.offline || file.offline.unwrap_or(false),
        limit,
        tail_tol: tolerance("tail tolerance", source.tail_tol, file.tail_tol, oeis::DEFAULT_TAIL_TOL)?,
        cache_dir: config::resolve_cache_dir(source.cache_dir.clone(), file.cache_dir.clone()),
    })
}

fn cmd_oeis_verify(signature: &str, source: &OeisSourceArgs, file: &FileConfig) -> Result<Outcome, Failure> {
    let signature = parse_signature(signature)?;
    let s = oeis_settings(source, file)?;
    let client = OeisClient::live(&s.cache_dir, s.offline);
    let entries = client.search_by_signature(&signature, s.limit)?;
    let (mut records, mut filtered_out, mut insufficient) = (Vec::new(), Vec::new(), Vec::new());
    for entry in &entries {
        match oeis::verify_entry(entry, &signature, s.tail_tol) {
            Ok(r) if r.recurrence_consistent => records.push(r),
            Ok(r) => filtered_out.push(r),
            Err(OeisError::InsufficientTerms { id, have, need, .. }) => {
                insufficient.push(json!({ "id": id, "have": have, "need": need }))
            }
            Err(e) => return Err(e.into()),
        }
    }
    let agrees = records.iter().filter(|r| r.agrees).count();
    let mut table = Table::new();
    table
        .field("query", signature_query(&signature))
        .field("entries", entries.len())
        .field("consistent", records.len())
        .field("agrees", agrees);
    let rows: Vec<Vec<String>> = records
        .iter()
        .chain(&filtered_out)
        .map(|r| {
            vec![
                r.id.clone(),
                r.recurrence_consistent.to_string(),
                opt_complex(r.measured_tail_ratio),
                opt_complex(r.lambda0),
                r.agrees.to_string(),
            ]
        })
        .collect();
    table.rows(&["id", "consistent", "tail ratio", "lambda0", "agrees"], &rows);
    let inputs = json!({
        "signature": signature,
        "limit": s.limit,
        "offline": s.offline,
        "tail_tol": s.tail_tol,
    });
    let results = json!({
        "query": signature_query(&signature),
        "entries": entries.len(),
        "records": records,
        "filtered_out": filtered_out,
        "insufficient": insufficient,
        "agrees": agrees,
        "disagrees": records.len() - agrees,
    });
    Ok(Outcome { document: ReportDocument::new("oeis verify", inputs, results, vec![]), table: table.finish(), code: EXIT_OK })
}

fn cmd_oeis_batch(m: &str, lengths: &str, source: &OeisSourceArgs, file: &FileConfig) -> Result<Outcome, Failure> {
    let (m_lo, m_hi) = config::parse_range("m", m)?;
    let (l_lo, l_hi) = config::parse_range("lengths", lengths)?;
    if m_lo < 1 || l_lo < 2 {
        return Err(Failure::usage("need m >= 1 and lengths >= 2"));
    }
    let s = oeis_settings(source, file)?;
    let signatures = oeis::constant_signatures(m_lo..=m_hi, (l_lo as usize)..=(l_hi as usize));
    let client = OeisClient::live(&s.cache_dir, s.offline);
    let (items, summary) = batch_verify(&client, &signatures, s.limit, s.tail_tol);
    let code = if summary.unavailable == signatures.len() && !signatures.is_empty() { EXIT_UNAVAILABLE } else { EXIT_OK };
    let mut table = Table::new();
    table
        .field("signatures", summary.signatures)
        .field("entries", summary.entries)
        .field("agrees", summary.agrees)
        .field("disagrees", summary.disagrees)
        .field("inconsistent", summary.inconsistent)
        .field("insufficient", summary.insufficient)
        .field("unavailable", summary.unavailable)
        .field("errors", summary.errors);
    let inputs = json!({
        "m": [m_lo, m_hi],
        "lengths": [l_lo, l_hi],
        "limit": s.limit,
        "offline": s.offline,
        "tail_tol": s.tail_tol,
    });
    let results = json!({ "items": items, "summary": summary });
    Ok(Outcome { document: ReportDocument::new("oeis batch", inputs, results, vec![]), table: table.finish(), code })
}
