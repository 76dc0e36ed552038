//! Command-line front end.
//!
//! Every subcommand prints one JSON document (default) or a CSV table to
//! standard output. The JSON document carries the fully resolved run
//! configuration next to the results, so any emitted run can be replayed
//! exactly; repeated runs produce byte-identical output apart from the
//! `timestamp` field. Long scans stream JSON Lines progress on standard
//! error when `--progress` is given.
//!
//! Exit codes: 0 success, 1 failed verification (or a runtime failure such
//! as I/O), 2 argument errors (with usage on standard error).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::bounds::{block_threshold, build_ledger, rational_to_f64, verify_moment_bounds};
use crate::carrydist::{blocks_count, dist_for};
use crate::charfn::{self, ct_integral, gamma_matrix};
use crate::dyadic::Dyadic;
use crate::moments::moments_upto;
use crate::oracle;
use crate::scanner::{scan_min_ct_with_progress, ScanConfig, ScanMode, ScanResult};
use crate::{Error, Result};

/// Environment variable supplying the default worker-thread count for
/// `scan` and `verify` when `--threads` is not given.
pub const THREADS_ENV: &str = "CUSICK_THREADS";

/// Maximum number of rows a single `density` invocation will print.
const MAX_DENSITY_ROWS: i64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cusick",
    version,
    about = "Exact statistics of binary addition carries: densities, moments, \
             characteristic functions, effective bounds, and exhaustive scans"
)]
struct Cli {
    /// Output format for results on standard output.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Worker threads for scanning (defaults to $CUSICK_THREADS, then to
    /// one thread per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print carry density values δ(j, t) for a range of j.
    Density {
        /// Shift t (decimal, 0x hex, or 0b binary; underscores allowed).
        t: String,
        /// Range of carries, inclusive, e.g. `-4..8` (default covers the
        /// support and two tail entries).
        #[arg(long, allow_hyphen_values = true)]
        j: Option<String>,
    },
    /// Print the carry value c_t as an exact dyadic rational.
    Ct {
        /// Shift t (decimal, 0x hex, or 0b binary; underscores allowed).
        t: String,
    },
    /// Print the factorial-normalized carry moments m_k(t) for k ≤ kmax.
    Moments {
        /// Shift t (decimal, 0x hex, or 0b binary; underscores allowed).
        t: String,
        #[arg(long, default_value_t = 8)]
        kmax: u32,
    },
    /// Re-derive one density value by exhaustive enumeration modulo 2^m
    /// (an independent, slow cross-check of the recurrence).
    Oracle {
        /// Shift t; must fit in 64 bits for the enumeration.
        t: String,
        /// Carry value j to count.
        #[arg(long, allow_hyphen_values = true)]
        j: i64,
        /// Enumeration modulus exponent (default: enough for exactness).
        #[arg(long)]
        m: Option<u32>,
    },
    /// Evaluate the carry characteristic function γ_t(θ) at one point.
    Charfn {
        /// Shift t (decimal, 0x hex, or 0b binary; underscores allowed).
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Recover c_t from the singular-integral representation and compare
    /// with the exact value.
    CtIntegral {
        /// Shift t (decimal, 0x hex, or 0b binary; underscores allowed).
        t: String,
        /// Midpoint quadrature points on the half-interval.
        #[arg(long, default_value_t = 1 << 14)]
        points: u64,
    },
    /// Print the table of certified moment-bound constants.
    Ledger {
        #[arg(long, default_value_t = 8)]
        kmax: u32,
    },
    /// Compute the effective block threshold L(ε) with a self-verifying
    /// certificate.
    Threshold {
        /// Tolerance ε as a decimal ("0.45") or a fraction ("9/20").
        #[arg(long)]
        epsilon: String,
    },
    /// Check the certified coefficient bounds against the exact generating
    /// coefficients of one shift.
    VerifyBounds {
        /// Shift t (decimal, 0x hex, or 0b binary; underscores allowed).
        t: String,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
    },
    /// Exhaustively scan 1 ≤ t < 2^bits for the minimum carry value.
    Scan {
        #[arg(long)]
        bits: u32,
        /// `exact` or `float` (float narrows candidates, then re-checks
        /// them exactly; both modes give exact results).
        #[arg(long, default_value = "exact")]
        mode: String,
        /// Float mode: fold carries below this exponent into the error
        /// radius.
        #[arg(long, allow_hyphen_values = true)]
        tail_cut: Option<i64>,
        /// Checkpoint file for interrupt/resume.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Stream JSON Lines progress on standard error.
        #[arg(long)]
        progress: bool,
    },
    /// Count shifts below 2^bits with c_t ≤ 1/2 (expected: none; exits 1
    /// otherwise).
    Verify {
        #[arg(long)]
        bits: u32,
        /// `exact` or `float`.
        #[arg(long, default_value = "float")]
        mode: String,
        /// Stream JSON Lines progress on standard error.
        #[arg(long)]
        progress: bool,
    },
    /// Print the number of blocks in the binary expansion of t.
    Blocks {
        /// Shift t (decimal, 0x hex, or 0b binary; underscores allowed).
        t: String,
    },
}

/// One fully rendered command outcome, before formatting.
struct Rendered {
    config: Value,
    result: Value,
    csv: String,
    exit: i32,
}

/// Runs the CLI against `argv` (including the program name), writing
/// results to `out` and diagnostics/progress to `err`, and returns the
/// process exit code.
pub fn run<I, T>(argv: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version arrive here as "errors" that belong on
            // stdout with a zero exit.
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };

    let format = cli.format;
    let rendered = dispatch(cli, err);
    match rendered {
        Ok(r) => {
            let ok = match format {
                OutputFormat::Json => {
                    let doc = json!({
                        "config": r.config,
                        "result": r.result,
                        "timestamp": timestamp(),
                    });
                    writeln!(out, "{doc}")
                }
                OutputFormat::Csv => {
                    writeln!(out, "# config: {}", r.config).and_then(|_| {
                        writeln!(out, "{}", r.csv.trim_end_matches('\n'))
                    })
                }
            };
            if ok.is_err() {
                return 1;
            }
            r.exit
        }
        Err(e) => {
            let code = exit_code_for(&e);
            let _ = writeln!(err, "error: {e}");
            if code == 2 {
                let _ = writeln!(err, "{}", Cli::command().render_usage());
            }
            code
        }
    }
}

/// Exit code for a failed run: 2 for anything the caller asked for
/// incorrectly, 1 for runtime failures.
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::SamplingInfeasible { .. } => 1,
        _ => 2,
    }
}

fn dispatch(cli: Cli, err: &mut (dyn Write + Send)) -> Result<Rendered> {
    let format = cli.format;
    let threads = cli.threads;
    match cli.command {
        Command::Density { t, j } => cmd_density(format, &t, j.as_deref()),
        Command::Ct { t } => cmd_ct(format, &t),
        Command::Moments { t, kmax } => cmd_moments(format, &t, kmax),
        Command::Oracle { t, j, m } => cmd_oracle(format, &t, j, m),
        Command::Charfn { t, theta } => cmd_charfn(format, &t, theta),
        Command::CtIntegral { t, points } => cmd_ct_integral(format, &t, points),
        Command::Ledger { kmax } => cmd_ledger(format, kmax),
        Command::Threshold { epsilon } => cmd_threshold(format, &epsilon),
        Command::VerifyBounds { t, kmax } => cmd_verify_bounds(format, &t, kmax),
        Command::Scan { bits, mode, tail_cut, checkpoint, progress } => cmd_scan(
            format, bits, &mode, tail_cut, checkpoint, progress, threads, err,
        ),
        Command::Verify { bits, mode, progress } => {
            cmd_verify(format, bits, &mode, progress, threads, err)
        }
        Command::Blocks { t } => cmd_blocks(format, &t),
    }
}

// ---------------------------------------------------------------------------
// Argument parsing helpers
// ---------------------------------------------------------------------------

/// Parses a shift written in decimal, hex (`0x`), or binary (`0b`), with
/// optional underscore separators.
pub fn parse_shift(s: &str) -> Result<BigUint> {
    let cleaned: String = s.trim().chars().filter(|&c| c != '_').collect();
    let bad = || Error::BadIntegerLiteral(s.to_string());
    let (digits, radix) = if let Some(hex) =
        cleaned.strip_prefix("0x").or_else(|| cleaned.strip_prefix("0X"))
    {
        (hex, 16u32)
    } else if let Some(bin) = cleaned.strip_prefix("0b").or_else(|| cleaned.strip_prefix("0B")) {
        (bin, 2)
    } else {
        (cleaned.as_str(), 10)
    };
    if digits.is_empty() {
        return Err(bad());
    }
    BigUint::parse_bytes(digits.as_bytes(), radix).ok_or_else(bad)
}

/// Parses a positive tolerance given as a fraction (`9/20`), a decimal
/// (`0.45`), or an integer (`2`).
pub fn parse_epsilon(s: &str) -> Result<BigRational> {
    let text = s.trim();
    let bad = |why: &str| Error::BadEpsilon(format!("`{s}`: {why}"));
    let parse_int = |digits: &str, why: &'static str| -> Result<BigInt> {
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad(why));
        }
        Ok(digits.parse().expect("ascii digits parse"))
    };

    let value = if let Some((num, den)) = text.split_once('/') {
        let num = parse_int(num.trim(), "numerator must be a nonnegative integer")?;
        let den = parse_int(den.trim(), "denominator must be a positive integer")?;
        if den.is_zero() {
            return Err(bad("denominator must be nonzero"));
        }
        BigRational::new(num, den)
    } else if let Some((int, frac)) = text.split_once('.') {
        let int = if int.is_empty() { BigInt::zero() } else { parse_int(int, "bad integer part")? };
        let frac_digits = parse_int(frac, "bad fractional part")?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        BigRational::new(int * &scale + frac_digits, scale)
    } else {
        BigRational::from_integer(parse_int(text, "expected a number or p/q")?)
    };

    if !value.is_positive() {
        return Err(bad("tolerance must be positive"));
    }
    Ok(value)
}

/// Parses an inclusive carry range `a..b` (or a single value `j`).
fn parse_j_range(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::InvalidArgument(format!("bad carry range `{s}` (expected `a..b`)"));
    if let Some((a, b)) = s.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a, b))
    } else {
        let j: i64 = s.trim().parse().map_err(|_| bad())?;
        Ok((j, j))
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(text) => {
            let n: usize = text.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("${THREADS_ENV}=`{text}` is not a thread count"))
            })?;
            if n == 0 {
                return Err(Error::InvalidArgument(format!(
                    "${THREADS_ENV} must be positive"
                )));
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Shifts small enough for a JSON number stay numeric; larger ones become
/// decimal strings.
fn shift_json(t: &BigUint) -> Value {
    match t.to_u64() {
        Some(small) => json!(small),
        None => json!(t.to_string()),
    }
}

fn dyadic_json(d: &Dyadic) -> (String, String) {
    (d.to_string(), d.to_decimal_exact())
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_density(format: OutputFormat, t_text: &str, j: Option<&str>) -> Result<Rendered> {
    let t = parse_shift(t_text)?;
    let dist = dist_for(&t);
    let (a, b) = match j {
        Some(range) => parse_j_range(range)?,
        None => {
            let lo = dist.j_min().min(0) - 2;
            let hi = dist.support_max().unwrap_or(0).max(0) + 1;
            (lo, hi)
        }
    };
    if b - a >= MAX_DENSITY_ROWS {
        return Err(Error::InvalidArgument(format!(
            "carry range {a}..{b} has more than {MAX_DENSITY_ROWS} rows"
        )));
    }

    let mut entries = Vec::new();
    let mut csv = String::from("j,delta,decimal\n");
    for j in a..=b {
        let (exact, decimal) = dyadic_json(&dist.delta_at(j));
        csv.push_str(&format!("{j},{exact},{decimal}\n"));
        entries.push(json!({ "j": j, "delta": exact, "decimal": decimal }));
    }

    Ok(Rendered {
        config: json!({
            "command": "density",
            "format": format.as_str(),
            "t": t.to_string(),
            "j": format!("{a}..{b}"),
        }),
        result: json!({
            "t": shift_json(&t),
            "j_min": dist.j_min(),
            "tail_coeff": dist.tail_coeff().to_string(),
            "entries": entries,
        }),
        csv,
        exit: 0,
    })
}

fn cmd_ct(format: OutputFormat, t_text: &str) -> Result<Rendered> {
    let t = parse_shift(t_text)?;
    let (exact, decimal) = dyadic_json(&dist_for(&t).c_value());
    Ok(Rendered {
        config: json!({
            "command": "ct",
            "format": format.as_str(),
            "t": t.to_string(),
        }),
        result: json!({ "t": shift_json(&t), "ct": exact, "decimal": decimal }),
        csv: format!("t,ct,decimal\n{t},{exact},{decimal}\n"),
        exit: 0,
    })
}

fn cmd_moments(format: OutputFormat, t_text: &str, kmax: u32) -> Result<Rendered> {
    let t = parse_shift(t_text)?;
    let moments = moments_upto(&t, kmax);
    let mut rows = Vec::new();
    let mut csv = String::from("k,moment,decimal\n");
    for (k, m) in moments.iter().enumerate() {
        let decimal = rational_to_f64(m);
        csv.push_str(&format!("{k},{m},{decimal}\n"));
        rows.push(json!({ "k": k, "moment": m.to_string(), "decimal": decimal }));
    }
    Ok(Rendered {
        config: json!({
            "command": "moments",
            "format": format.as_str(),
            "t": t.to_string(),
            "kmax": kmax,
        }),
        result: json!({ "t": shift_json(&t), "kmax": kmax, "moments": rows }),
        csv,
        exit: 0,
    })
}

fn cmd_oracle(format: OutputFormat, t_text: &str, j: i64, m: Option<u32>) -> Result<Rendered> {
    let t_big = parse_shift(t_text)?;
    let t = t_big.to_u64().ok_or_else(|| {
        Error::InvalidArgument("the enumeration oracle needs t to fit in 64 bits".into())
    })?;
    let m = m.unwrap_or_else(|| oracle::default_modulus(t));
    let delta = oracle::exact_delta(t, j, m)?;
    let exact = m >= 64 || t < (1u64 << m);
    let (delta_text, decimal) = dyadic_json(&delta);
    Ok(Rendered {
        config: json!({
            "command": "oracle",
            "format": format.as_str(),
            "t": t.to_string(),
            "j": j,
            "m": m,
        }),
        result: json!({
            "t": t,
            "j": j,
            "m": m,
            "delta": delta_text,
            "decimal": decimal,
            "exact": exact,
        }),
        csv: format!("t,j,m,delta,decimal,exact\n{t},{j},{m},{delta_text},{decimal},{exact}\n"),
        exit: 0,
    })
}

fn cmd_charfn(format: OutputFormat, t_text: &str, theta: f64) -> Result<Rendered> {
    let t = parse_shift(t_text)?;
    if !theta.is_finite() {
        return Err(Error::InvalidArgument("theta must be finite".into()));
    }
    let gamma = gamma_matrix(&t, theta);
    Ok(Rendered {
        config: json!({
            "command": "charfn",
            "format": format.as_str(),
            "t": t.to_string(),
            "theta": theta,
        }),
        result: json!({
            "t": shift_json(&t),
            "theta": theta,
            "re": gamma.re,
            "im": gamma.im,
            "abs": gamma.norm(),
        }),
        csv: format!(
            "t,theta,re,im,bound,pass\n{}\n",
            charfn::csv_row(&t, theta, gamma, None, None)
        ),
        exit: 0,
    })
}

fn cmd_ct_integral(format: OutputFormat, t_text: &str, points: u64) -> Result<Rendered> {
    let t = parse_shift(t_text)?;
    let report = ct_integral(&t, points)?;
    Ok(Rendered {
        config: json!({
            "command": "ct-integral",
            "format": format.as_str(),
            "t": t.to_string(),
            "points": points,
        }),
        result: json!({
            "t": shift_json(&t),
            "points": report.points,
            "value": report.value,
            "exact": report.exact,
            "abs_error": report.abs_error,
        }),
        csv: format!(
            "t,points,value,exact,abs_error\n{},{},{},{},{}\n",
            t, report.points, report.value, report.exact, report.abs_error
        ),
        exit: 0,
    })
}

fn cmd_ledger(format: OutputFormat, kmax: u32) -> Result<Rendered> {
    if kmax < 1 {
        return Err(Error::InvalidArgument("the ledger starts at k = 1".into()));
    }
    let ledger = build_ledger(kmax);
    let rows = ledger.rows_json();
    let (num, den) = ledger.bracket();

    let mut csv = String::from("k,A,B,C,D,E,d1,d2,E_prime\n");
    for row in &rows {
        let cell = |key: &str| -> String {
            row.get(key)
                .and_then(|v| v.get("approx"))
                .and_then(|v| v.as_str())
                .map(|s| s.replace(',', ";"))
                .unwrap_or_default()
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row["k"],
            cell("A"),
            cell("B"),
            cell("C"),
            cell("D"),
            cell("E"),
            cell("d1"),
            cell("d2"),
            cell("E_prime"),
        ));
    }

    Ok(Rendered {
        config: json!({
            "command": "ledger",
            "format": format.as_str(),
            "kmax": kmax,
        }),
        result: json!({
            "kmax": kmax,
            "log2_lower_bracket": format!("{num}/{den}"),
            "rows": rows,
        }),
        csv,
        exit: 0,
    })
}

fn cmd_threshold(format: OutputFormat, epsilon: &str) -> Result<Rendered> {
    let eps = parse_epsilon(epsilon)?;
    let cert = block_threshold(&eps)?;
    let ledger = build_ledger(cert.ledger_kmax.max(1));
    let verified = cert.verify(&ledger)?;

    let mut csv = String::from("witness,holds,statement\n");
    for w in &cert.witnesses {
        let statement = w.statement.replace(',', ";");
        csv.push_str(&format!("{},{},{}\n", w.name, w.holds, statement));
    }

    Ok(Rendered {
        config: json!({
            "command": "threshold",
            "format": format.as_str(),
            "epsilon": eps.to_string(),
        }),
        result: json!({
            "certificate": cert.to_json(),
            "verified": verified,
        }),
        csv,
        exit: if verified { 0 } else { 1 },
    })
}

fn cmd_verify_bounds(format: OutputFormat, t_text: &str, kmax: u32) -> Result<Rendered> {
    let t = parse_shift(t_text)?;
    let ledger = build_ledger(kmax);
    let report = verify_moment_bounds(&t, kmax, &ledger)?;

    let mut csv = String::from("label,lhs,rhs,pass\n");
    for check in &report.checks {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            check.label.replace(',', ";"),
            check.lhs,
            check.rhs,
            check.pass
        ));
    }

    let exit = if report.all_pass() { 0 } else { 1 };
    Ok(Rendered {
        config: json!({
            "command": "verify-bounds",
            "format": format.as_str(),
            "t": t.to_string(),
            "kmax": kmax,
        }),
        result: report.to_json(),
        csv,
        exit,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    format: OutputFormat,
    bits: u32,
    mode: &str,
    tail_cut: Option<i64>,
    checkpoint: Option<PathBuf>,
    progress: bool,
    threads: Option<usize>,
    err: &mut (dyn Write + Send),
) -> Result<Rendered> {
    let mode: ScanMode = mode.parse()?;
    let threads = resolve_threads(threads)?;
    let mut config = ScanConfig::new(bits, mode);
    if let Some(cut) = tail_cut {
        config.tail_cut = cut;
    }
    config.threads = threads;
    config.checkpoint = checkpoint.clone();

    let result = run_scan(&config, progress, err)?;

    let argmin_text =
        result.argmin.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";");
    let csv = format!(
        "bits,mode,minimum,minimum_decimal,argmin,violations,scanned_odd,exact_rechecks\n\
         {},{},{},{},{},{},{},{}\n",
        result.bits,
        result.mode,
        result.minimum,
        result.minimum_decimal,
        argmin_text,
        result.violations,
        result.scanned_odd,
        result.exact_rechecks
    );

    let exit = if result.violations == 0 { 0 } else { 1 };
    Ok(Rendered {
        config: json!({
            "command": "scan",
            "format": format.as_str(),
            "bits": bits,
            "mode": mode.to_string(),
            "tail_cut": config.tail_cut,
            "checkpoint": checkpoint.as_ref().map(|p| p.display().to_string()),
            "progress": progress,
            "threads": threads,
        }),
        result: result.to_json(),
        csv,
        exit,
    })
}

fn cmd_verify(
    format: OutputFormat,
    bits: u32,
    mode: &str,
    progress: bool,
    threads: Option<usize>,
    err: &mut (dyn Write + Send),
) -> Result<Rendered> {
    let mode: ScanMode = mode.parse()?;
    let threads = resolve_threads(threads)?;
    let mut config = ScanConfig::new(bits, mode);
    config.threads = threads;

    let result = run_scan(&config, progress, err)?;
    let holds = result.violations == 0;
    Ok(Rendered {
        config: json!({
            "command": "verify",
            "format": format.as_str(),
            "bits": bits,
            "mode": mode.to_string(),
            "progress": progress,
            "threads": threads,
        }),
        result: json!({
            "bits": bits,
            "mode": mode.to_string(),
            "violations": result.violations,
            "holds": holds,
        }),
        csv: format!(
            "bits,mode,violations,holds\n{bits},{mode},{},{holds}\n",
            result.violations
        ),
        exit: if holds { 0 } else { 1 },
    })
}

/// Runs a scan, optionally streaming `{"done":…,"total":…}` JSON Lines to
/// `err` as subtrees complete.
fn run_scan(
    config: &ScanConfig,
    progress: bool,
    err: &mut (dyn Write + Send),
) -> Result<ScanResult> {
    if progress {
        let sink = Mutex::new(err);
        let callback = |done: u64, total: u64| {
            let mut out = sink.lock().unwrap();
            let _ = writeln!(out, "{}", json!({ "done": done, "total": total }));
            let _ = out.flush();
        };
        scan_min_ct_with_progress(config, Some(&callback))
    } else {
        scan_min_ct_with_progress(config, None)
    }
}

fn cmd_blocks(format: OutputFormat, t_text: &str) -> Result<Rendered> {
    let t = parse_shift(t_text)?;
    let r = blocks_count(&t);
    Ok(Rendered {
        config: json!({
            "command": "blocks",
            "format": format.as_str(),
            "t": t.to_string(),
        }),
        result: json!({ "t": shift_json(&t), "r": r }),
        csv: format!("t,r\n{t},{r}\n"),
        exit: 0,
    })
}
