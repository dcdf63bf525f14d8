//! Command-line front end. Every subcommand prints one JSON document (or CSV) on stdout and
//! reports failures as `{"error": kind, "message": …}` on stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::{json, Value};

use crate::bogoliubov::{load_model, validate, BogoliubovFirstOrder, Constraint};
use crate::error::{Error, Result};
use crate::fock::{ModeSubset, StateVector};
use crate::harness::{
    check_rows, eval_named_states, fit_scaling, load_state, load_support, optimize_state, oracle_tolerance, scan_fock,
    scan_two_mode, write_csv, OptimizeOptions, ScanOptions, ScanRow, ORACLE_RELATIVE_FLOOR,
};
use crate::oracle::{GeneratorSpec, Oracle, MIXED_STEP, PURE_STEP};
use crate::perturb::transform_first_order;
use crate::qfi::{pure_report, qfi_fock_closed, qfi_two_mode_closed, reduced_report, QfiReport, DEFAULT_THETA};

/// Relative floor for the mixed-state oracle comparison, whose second differences are
/// roundoff-limited.
const MIXED_RELATIVE_FLOOR: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "bogofisher", version, about = "Quantum Fisher information of Bogoliubov transformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model document against the unitarity constraints.
    Validate { model: PathBuf },
    /// QFI of a state, optionally of its reduced state on `--keep`.
    Qfi(QfiArgs),
    /// QFI table over Fock inputs, written as CSV.
    Scan(ScanArgs),
    /// Evaluate the named two-mode probe states at one occupation.
    Named(NamedArgs),
    /// Maximize the QFI on a Fock support at fixed mean excitation number.
    Optimize(OptimizeArgs),
    /// Compare the perturbative QFI with the truncated-space oracle.
    OracleCompare(OracleArgs),
}

#[derive(Debug, Args)]
struct QfiArgs {
    model: PathBuf,
    #[arg(long)]
    state: PathBuf,
    /// Comma-separated modes to keep; the others are traced out.
    #[arg(long, value_delimiter = ',')]
    keep: Option<Vec<usize>>,
    /// Parameter value for the validity ratio.
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
}

#[derive(Debug, Args)]
struct ScanArgs {
    model: PathBuf,
    /// Occupations of `--mode`, as `a..b` (inclusive), a single value or a comma list.
    #[arg(long, default_value = "0..8")]
    n: String,
    #[arg(long, default_value_t = 0)]
    mode: usize,
    /// Second populated mode; without `--m` the scan runs along `n = m`.
    #[arg(long)]
    partner: Option<usize>,
    /// Occupations of `--partner`, same syntax as `--n`.
    #[arg(long)]
    m: Option<String>,
    #[arg(long, value_delimiter = ',')]
    keep: Option<Vec<usize>>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fit without subtracting the vacuum QFI.
    #[arg(long)]
    keep_vacuum_term: bool,
    /// Skip the oracle column.
    #[arg(long)]
    no_oracle: bool,
    /// Cutoff above the largest occupation of each probe.
    #[arg(long, default_value_t = 6)]
    headroom: u32,
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
}

#[derive(Debug, Args)]
struct NamedArgs {
    model: PathBuf,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0)]
    mode: usize,
    #[arg(long, default_value_t = 1)]
    partner: usize,
    #[arg(long, value_delimiter = ',')]
    keep: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    model: PathBuf,
    #[arg(long)]
    support: PathBuf,
    /// Target mean total excitation number.
    #[arg(long)]
    avg_n: f64,
    #[arg(long, value_delimiter = ',')]
    keep: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
}

#[derive(Debug, Args)]
struct OracleArgs {
    model: PathBuf,
    #[arg(long)]
    state: PathBuf,
    #[arg(long, value_delimiter = ',')]
    keep: Option<Vec<usize>>,
    /// Finite-difference step; defaults depend on whether a trace is taken.
    #[arg(long)]
    dtheta: Option<f64>,
    #[arg(long, default_value_t = 6)]
    headroom: u32,
}

/// Runs the command line and returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                print!("{e}");
                return 0;
            }
            report_error("usage", &e.to_string(), 1);
            return 1;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            report_error(e.kind(), &e.to_string(), code);
            code
        }
    }
}

fn report_error(kind: &str, message: &str, code: i32) {
    let doc = json!({ "error": kind, "message": message.trim_end(), "exit_code": code });
    eprintln!("{doc}");
}

fn run(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Validate { model } => cmd_validate(&model, out),
        Command::Qfi(args) => cmd_qfi(args, out),
        Command::Scan(args) => cmd_scan(args, out),
        Command::Named(args) => cmd_named(args, out),
        Command::Optimize(args) => cmd_optimize(args, out),
        Command::OracleCompare(args) => cmd_oracle(args, out),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn model(path: &Path) -> Result<BogoliubovFirstOrder> {
    load_model(&read(path)?).map_err(|e| match e {
        Error::Json(j) => Error::Schema(j.to_string()),
        other => other,
    })
}

fn emit(out: &mut dyn Write, doc: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(doc)?)?;
    Ok(())
}

fn subset(keep: &Option<Vec<usize>>, modes: usize) -> Result<Option<ModeSubset>> {
    keep.as_deref().map(|k| ModeSubset::new(k, modes)).transpose()
}

/// `a..b` and `a..=b` (both inclusive), `a`, or `a,b,c`.
pub fn parse_range(text: &str) -> Result<Vec<u32>> {
    let bad = || Error::InvalidArgument(format!("cannot parse occupation range '{text}'"));
    let num = |s: &str| s.trim().parse::<u32>().map_err(|_| bad());
    if let Some((a, b)) = text.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(num).collect()
}

fn report_json(report: &QfiReport) -> Value {
    let breakdown: serde_json::Map<String, Value> =
        report.breakdown.iter().map(|t| (t.name.to_string(), json!(t.value))).collect();
    json!({
        "qfi": report.qfi,
        "breakdown": breakdown,
        "tracing_loss": report.tracing_loss,
        "theta": report.theta,
        "validity_ratio": report.validity_ratio,
        "valid": report.valid,
    })
}

/// Closed-form breakdown when the state is one Fock vector with at most two populated modes.
fn closed_form(spec: &BogoliubovFirstOrder, state: &StateVector) -> Result<Option<QfiReport>> {
    if state.len() != 1 {
        return Ok(None);
    }
    let (occ, _) = state.terms().next().expect("one term");
    let populated: Vec<usize> = (0..occ.len()).filter(|&m| occ.get(m) > 0).collect();
    match populated.as_slice() {
        [] => qfi_fock_closed(spec, 0, 0).map(Some),
        [k] => qfi_fock_closed(spec, occ.get(*k), *k).map(Some),
        [k, kp] => qfi_two_mode_closed(spec, occ.get(*k), *k, occ.get(*kp), *kp).map(Some),
        _ => Ok(None),
    }
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<()> {
    let spec = model(path)?;
    let report = validate(&spec);
    let worst: serde_json::Map<String, Value> = Constraint::ALL
        .iter()
        .map(|&c| (c.tag().to_string(), json!(report.worst_residual(c))))
        .collect();
    emit(out, &json!({ "valid": true, "modes": spec.modes(), "vacuum_qfi": spec.vacuum_qfi(), "worst_residuals": worst }))
}

/// Loads a state, enforcing that it has no excitations outside `keep`.
fn state_for(spec: &BogoliubovFirstOrder, path: &Path, headroom: u32, keep: Option<&ModeSubset>) -> Result<StateVector> {
    let state = load_state(&read(path)?, spec.modes(), headroom)?;
    if let Some(keep) = keep {
        if !state.supported_on(keep) {
            return Err(Error::SupportOutsideKeep);
        }
    }
    Ok(state)
}

fn cmd_qfi(args: QfiArgs, out: &mut dyn Write) -> Result<()> {
    let spec = model(&args.model)?;
    let keep = subset(&args.keep, spec.modes())?;
    let state = state_for(&spec, &args.state, 2, keep.as_ref())?;
    let pair = transform_first_order(&spec, &state)?;
    let report = match &keep {
        Some(keep) => reduced_report(&pair, keep)?,
        None => pure_report(&pair),
    }
    .with_theta(args.theta);
    let mut doc = report_json(&report);
    doc["vacuum_qfi"] = json!(spec.vacuum_qfi());
    doc["overlap_penalty"] = json!(pair.overlap().norm_sqr());
    doc["keep"] = json!(keep.as_ref().map(|k| k.indices().to_vec()));
    if let Some(closed) = closed_form(&spec, &state)? {
        doc["closed_form"] = report_json(&closed.with_theta(args.theta));
    }
    emit(out, &doc)
}

fn cmd_scan(args: ScanArgs, out: &mut dyn Write) -> Result<()> {
    let spec = model(&args.model)?;
    let opts = ScanOptions {
        oracle: !args.no_oracle,
        keep: subset(&args.keep, spec.modes())?,
        headroom: args.headroom,
        theta: args.theta,
        dtheta: PURE_STEP,
    };
    let ns = parse_range(&args.n)?;
    let rows: Vec<ScanRow> = match (args.partner, &args.m) {
        (None, None) => scan_fock(&spec, args.mode, &ns, &opts)?,
        (None, Some(_)) => return Err(Error::InvalidArgument("--m needs --partner".into())),
        (Some(p), None) => {
            let points: Vec<(u32, u32)> = ns.iter().map(|&n| (n, n)).collect();
            scan_two_mode(&spec, args.mode, p, &points, &opts)?
        }
        (Some(p), Some(m)) => {
            let ms = parse_range(m)?;
            let points: Vec<(u32, u32)> = ns.iter().flat_map(|&n| ms.iter().map(move |&m| (n, m))).collect();
            scan_two_mode(&spec, args.mode, p, &points, &opts)?
        }
    };
    check_rows(&rows)?;
    let subtract_vacuum = !args.keep_vacuum_term;
    let fit = match fit_scaling(&rows, subtract_vacuum, false) {
        Ok(fit) => json!({ "exponent": fit.exponent, "prefactor": fit.prefactor, "points": fit.points }),
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    let summary = json!({ "rows": rows.len(), "subtract_vacuum": subtract_vacuum, "fit": fit });
    match &args.out {
        Some(path) => {
            write_csv(&rows, fs::File::create(path)?)?;
            info!("wrote {} rows to {}", rows.len(), path.display());
            let mut summary = summary;
            summary["out"] = json!(path.display().to_string());
            emit(out, &summary)
        }
        None => {
            write_csv(&rows, &mut *out)?;
            info!("scan summary: {summary}");
            Ok(())
        }
    }
}

fn cmd_named(args: NamedArgs, out: &mut dyn Write) -> Result<()> {
    let spec = model(&args.model)?;
    let keep = subset(&args.keep, spec.modes())?;
    let reports = eval_named_states(&spec, args.n, args.mode, args.partner, keep.as_ref())?;
    let docs: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "state": r.state.name(),
                "n": r.n,
                "qfi": r.qfi,
                "overlap_penalty": r.penalty,
                "tracing_loss": r.tracing_loss,
                "avg_n": r.avg_n,
                "cutoff": r.cutoff,
            })
        })
        .collect();
    emit(out, &Value::Array(docs))
}

fn cmd_optimize(args: OptimizeArgs, out: &mut dyn Write) -> Result<()> {
    let spec = model(&args.model)?;
    let keep = subset(&args.keep, spec.modes())?;
    let support = load_support(&read(&args.support)?)?;
    let opts = OptimizeOptions { seed: args.seed, max_iter: args.max_iter, restarts: args.restarts };
    let res = optimize_state(&spec, &support, args.avg_n, keep.as_ref(), &opts)?;
    let amplitudes: Vec<Value> = res
        .amplitudes
        .iter()
        .map(|(o, c)| json!({ "occ": o.counts(), "re": c.re, "im": c.im }))
        .collect();
    let log: Vec<Value> = res
        .log
        .iter()
        .map(|r| json!({ "restart": r.restart, "iteration": r.iteration, "objective": r.objective }))
        .collect();
    emit(
        out,
        &json!({
            "amplitudes": amplitudes,
            "qfi": res.qfi,
            "qfi_pure": res.qfi_pure,
            "tracing_loss": res.tracing_loss,
            "avg_n": res.avg_n,
            "constraint_residual": res.constraint_residual,
            "norm_residual": res.norm_residual,
            "winning_restart": res.winning_restart,
            "log": log,
        }),
    )
}

fn cmd_oracle(args: OracleArgs, out: &mut dyn Write) -> Result<()> {
    let spec = model(&args.model)?;
    let keep = subset(&args.keep, spec.modes())?;
    let state = state_for(&spec, &args.state, args.headroom, keep.as_ref())?;
    let pair = transform_first_order(&spec, &state)?;
    let gen = GeneratorSpec::from_first_order(&spec)?;
    let oracle = Oracle::new(&gen, *state.layout())?;
    let (perturbative, estimate, floor, dtheta) = match &keep {
        Some(keep) if !keep.is_all() => {
            let dtheta = args.dtheta.unwrap_or(MIXED_STEP);
            (reduced_report(&pair, keep)?.qfi, oracle.qfi_mixed(&state, keep, dtheta)?, MIXED_RELATIVE_FLOOR, dtheta)
        }
        _ => {
            let dtheta = args.dtheta.unwrap_or(PURE_STEP);
            (pure_report(&pair).qfi, oracle.qfi_pure(&state, dtheta)?, ORACLE_RELATIVE_FLOOR, dtheta)
        }
    };
    let tolerance = oracle_tolerance(perturbative, estimate.error, floor);
    let difference = (estimate.value - perturbative).abs();
    let doc = json!({
        "qfi_perturbative": perturbative,
        "qfi_oracle": estimate.value,
        "oracle_error": estimate.error,
        "difference": difference,
        "tolerance": tolerance,
        "dtheta": dtheta,
        "cutoff": state.layout().cutoff(),
        "agree": difference <= tolerance,
    });
    emit(out, &doc)?;
    if difference > tolerance {
        return Err(Error::OracleDisagreement { perturbative, oracle: estimate.value, tolerance });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_range("2..=4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_range("5").unwrap(), vec![5]);
        assert_eq!(parse_range("1,4,2").unwrap(), vec![1, 4, 2]);
        assert!(parse_range("4..1").is_err());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn help_exits_zero_and_bad_flags_exit_one() {
        assert_eq!(cli_main(["bogofisher", "--help"]), 0);
        assert_eq!(cli_main(["bogofisher", "scan"]), 1);
        assert_eq!(cli_main(["bogofisher", "frobnicate"]), 1);
    }
}
