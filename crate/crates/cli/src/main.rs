//! `resolvent` — the command-line surface over the tensor resolvent-trace
//! library. Every invocation prints one JSON report envelope to stdout and
//! exits with a stable code:
//!
//! - `0` success (and, for `check`, "possible moment sequence")
//! - `1` computational failure (a JSON error object goes to stderr)
//! - `2` usage error (clap's diagnostics go to stderr)
//! - `3` verdict "not a moment sequence" from `check`
//!
//! Rationals appear in JSON as `"a/b"` strings so nothing is ever rounded.
//! The machine-readable output contract lives in `schemas/report.schema.json`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use chrono::{SecondsFormat, Utc};
use clap::error::ErrorKind;
use clap::{ArgGroup, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use resolvent_core::{
    build_counterexample_tensor, check_moment_sequence, counterexample_spec, enumerate_matchings,
    estimate_resolvent, f_closed_form, format_rational, is_connected, isomorphism_classes,
    kappa4_of_counterexample, matchings::build_multigraph, matrix_recovery_check,
    minimal_negative_parameter, normalized_coefficients, normalized_coefficients_f64,
    parse_sequence, parse_tensor, verify_resolvent_identity, write_tensor, Backend, Error,
    Kappa4Backend, McConfig, MomentSequence, Verdict,
};

const EXIT_NOT_A_MOMENT_SEQUENCE: u8 = 3;

/// Lane-count fallback order: `--lanes`, then this environment variable,
/// then 4.
const LANES_ENV: &str = "RESOLVENT_LANES";
const DEFAULT_LANES: usize = 4;

#[derive(Parser)]
#[command(
    name = "resolvent",
    version,
    about = "Exact resolvent-trace coefficients for real symmetric tensors",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    /// Per-class tensor-network contraction (the definition).
    Contraction,
    /// Wick-expansion Gaussian cumulants (the independent oracle).
    Wick,
}

impl From<BackendArg> for Backend {
    fn from(value: BackendArg) -> Backend {
        match value {
            BackendArg::Contraction => Backend::Contraction,
            BackendArg::Wick => Backend::Wick,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Normalized coefficients alpha_0..alpha_K of a tensor.
    Moments {
        /// Tensor file (text format: "p N" header, then index lines).
        #[arg(long)]
        tensor: PathBuf,
        /// Truncation order K (at least 1).
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = BackendArg::Contraction)]
        backend: BackendArg,
        /// Compute in floating point instead of exact rationals.
        #[arg(long, conflicts_with = "exact")]
        float: bool,
        /// Exact rational arithmetic (the default).
        #[arg(long)]
        exact: bool,
    },
    /// Hamburger feasibility check of a coefficient sequence.
    #[command(group(
        ArgGroup::new("input").required(true).args(["tensor", "sequence"])
    ))]
    Check {
        /// Tensor file; its alpha_0..alpha_K sequence is checked.
        #[arg(long, requires = "k")]
        tensor: Option<PathBuf>,
        /// Sequence file: one rational per line, alpha_0 first.
        #[arg(long)]
        sequence: Option<PathBuf>,
        /// Truncation order K (required with --tensor).
        #[arg(long, requires = "tensor")]
        k: Option<usize>,
        #[arg(long, value_enum, requires = "tensor", default_value_t = BackendArg::Contraction)]
        backend: BackendArg,
    },
    /// The explicit cubic family: certificate chain for one parameter.
    Counterexample {
        /// Family parameter n (ambient dimension is n + 1).
        #[arg(long)]
        param: u32,
        /// Also search 1..=B for the minimal parameter with a negative
        /// quartic cumulant.
        #[arg(long)]
        search_bound: Option<u32>,
    },
    /// Matching counts and glued-multigraph classes for block shape (p, k).
    Enumerate {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: usize,
        /// Restrict the class list to connected multigraphs.
        #[arg(long)]
        connected: bool,
        /// Include isomorphism classes (canonical edge lists, multiplicities).
        #[arg(long)]
        classes: bool,
    },
    /// Monte Carlo resolvent estimate at z = iy (or the derivative-identity
    /// check with --verify-identity).
    Mc {
        #[arg(long)]
        tensor: PathBuf,
        /// Imaginary part of the evaluation point z = iy (nonzero).
        #[arg(long)]
        y: f64,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Worker lanes (default: $RESOLVENT_LANES, then 4). Part of the
        /// reproducibility tuple.
        #[arg(long)]
        lanes: Option<usize>,
        /// Check R(iy) = 1/(iy) - (p/N) F'(iy) by central difference.
        #[arg(long)]
        verify_identity: bool,
    },
    /// Check that an order-2 tensor's coefficients equal Tr(X^k)/N.
    RecoverMatrix {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

/// The one object every invocation prints to stdout.
#[derive(Serialize)]
struct ReportEnvelope {
    command: String,
    /// `sha256:<hex>` over the primary input: the input file's bytes, or the
    /// canonical parameter string for file-less commands.
    input_digest: String,
    version: String,
    /// UTC, RFC 3339.
    timestamp: String,
    payload: Value,
    notes: Vec<String>,
}

struct Failure {
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure { kind: error_kind(&e), message: e.to_string() }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::IndexLength { .. } => "index-length",
        Error::IndexOutOfRange { .. } => "index-out-of-range",
        Error::NotAMatrix { .. } => "not-a-matrix",
        Error::DegreeMismatch { .. } => "degree-mismatch",
        Error::DimensionMismatch { .. } => "dimension-mismatch",
        Error::TermCapExceeded { .. } => "term-cap-exceeded",
        Error::EmptySequence => "empty-sequence",
        Error::NonPositiveLeadingMoment { .. } => "non-positive-leading-moment",
        Error::ExactValuesRequired => "exact-values-required",
        Error::RealEvaluationPoint => "real-evaluation-point",
        Error::TooFewSamples { .. } => "too-few-samples",
        Error::BranchTracking { .. } => "branch-tracking",
        Error::TensorParse { .. } => "tensor-parse",
        Error::InvalidInput(_) => "invalid-input",
    }
}

fn io_failure(path: &PathBuf, e: std::io::Error) -> Failure {
    Failure { kind: "io", message: format!("cannot read {}: {e}", path.display()) }
}

fn usage_error(message: &str) -> ! {
    // Routed through clap so usage problems uniformly exit with code 2.
    Cli::command().error(ErrorKind::InvalidValue, message).exit()
}

fn digest_bytes(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

fn read_file(path: &PathBuf) -> Result<(String, String), Failure> {
    let bytes = fs::read(path).map_err(|e| io_failure(path, e))?;
    let digest = digest_bytes(&bytes);
    let text = String::from_utf8(bytes).map_err(|_| Failure {
        kind: "io",
        message: format!("{} is not valid UTF-8", path.display()),
    })?;
    Ok((text, digest))
}

fn lane_count(flag: Option<usize>) -> usize {
    if let Some(lanes) = flag {
        if lanes == 0 {
            usage_error("--lanes must be at least 1");
        }
        return lanes;
    }
    match std::env::var(LANES_ENV) {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(lanes) if lanes >= 1 => lanes,
            _ => usage_error(&format!("{LANES_ENV}={raw:?} is not a positive integer")),
        },
        Err(_) => DEFAULT_LANES,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((envelope, exit)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&envelope)
                    .expect("report envelopes always serialize")
            );
            ExitCode::from(exit)
        }
        Err(failure) => {
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "error": { "kind": failure.kind, "message": failure.message }
                }))
                .expect("error objects always serialize")
            );
            ExitCode::from(1)
        }
    }
}

fn envelope(command: &str, digest: String, payload: Value, notes: Vec<String>) -> ReportEnvelope {
    ReportEnvelope {
        command: command.to_string(),
        input_digest: digest,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        payload,
        notes,
    }
}

fn run(command: Command) -> Result<(ReportEnvelope, u8), Failure> {
    match command {
        Command::Moments { tensor, k, backend, float, .. } => {
            if k == 0 {
                usage_error("--k must be at least 1");
            }
            let (text, digest) = read_file(&tensor)?;
            let t = parse_tensor(&text)?;
            let (seq, mode_note) = if float {
                (
                    normalized_coefficients_f64(&t, k)?,
                    "values are floating point; exact mode is the default".to_string(),
                )
            } else {
                (
                    normalized_coefficients(&t, k, backend.into())?,
                    "values are exact rationals".to_string(),
                )
            };
            let notes = vec![format!("backend: {:?}", backend).to_lowercase(), mode_note];
            Ok((envelope("moments", digest, serde_json::to_value(&seq).unwrap(), notes), 0))
        }
        Command::Check { tensor, sequence, k, backend } => {
            let (seq, digest, mut notes) = match (tensor, sequence) {
                (Some(path), None) => {
                    let k = k.expect("clap enforces --k with --tensor");
                    if k == 0 {
                        usage_error("--k must be at least 1");
                    }
                    let (text, digest) = read_file(&path)?;
                    let t = parse_tensor(&text)?;
                    let seq = normalized_coefficients(&t, k, backend.into())?;
                    (seq, digest, vec![format!("backend: {:?}", backend).to_lowercase()])
                }
                (None, Some(path)) => {
                    let (text, digest) = read_file(&path)?;
                    let values = parse_sequence(&text)?;
                    let seq = MomentSequence::from_exact(values, 0, 0, "sequence-file");
                    (seq, digest, vec!["sequence read from file; alpha_0 first".to_string()])
                }
                _ => unreachable!("clap enforces exactly one input source"),
            };
            let report = check_moment_sequence(&seq)?;
            let exit = match report.verdict {
                Verdict::MomentSequencePossible => 0,
                Verdict::NotAMomentSequence => EXIT_NOT_A_MOMENT_SEQUENCE,
            };
            notes.push(
                "the verdict certifies necessary conditions only at this truncation".to_string(),
            );
            let payload = json!({
                "sequence": serde_json::to_value(&seq).unwrap(),
                "report": serde_json::to_value(&report).unwrap(),
            });
            Ok((envelope("check", digest, payload, notes), exit))
        }
        Command::Counterexample { param, search_bound } => {
            if param == 0 {
                usage_error("--param must be at least 1");
            }
            let digest_input = match search_bound {
                Some(bound) => format!("param={param};search-bound={bound}"),
                None => format!("param={param}"),
            };
            let spec = counterexample_spec(param);
            let t = build_counterexample_tensor(param);
            let kappa4 = kappa4_of_counterexample(param, Kappa4Backend::Wick)?;
            let closed = f_closed_form(param);
            if kappa4 != closed {
                return Err(Failure {
                    kind: "internal-inconsistency",
                    message: format!(
                        "Wick kappa_4 = {} deviates from the closed form {}",
                        format_rational(&kappa4),
                        format_rational(&closed)
                    ),
                });
            }
            let seq = normalized_coefficients(&t, 4, Backend::Contraction)?;
            let report = check_moment_sequence(&seq)?;
            let minimal = search_bound.map(minimal_negative_parameter);
            let payload = json!({
                "spec": serde_json::to_value(&spec).unwrap(),
                "tensor": write_tensor(&t),
                "kappa4": format_rational(&kappa4),
                "closed_form": format_rational(&closed),
                "sequence": serde_json::to_value(&seq).unwrap(),
                "report": serde_json::to_value(&report).unwrap(),
                "minimal_negative_parameter": minimal,
            });
            let notes = vec![
                "kappa4: Wick backend, verified against the closed form".to_string(),
                "sequence: contraction backend, truncation K = 4".to_string(),
                "informational command: exit code is 0 regardless of the verdict".to_string(),
            ];
            Ok((envelope("counterexample", digest_bytes(digest_input.as_bytes()), payload, notes), 0))
        }
        Command::Enumerate { p, k, connected, classes } => {
            if p == 0 {
                usage_error("--p must be at least 1");
            }
            if p.saturating_mul(k) > 64 {
                usage_error("p * k must be at most 64");
            }
            let digest_input = format!("p={p};k={k};connected={connected};classes={classes}");
            let mut total = 0u64;
            let mut connected_count = 0u64;
            for mu in enumerate_matchings(p, k) {
                total += 1;
                if is_connected(&build_multigraph(&mu)) {
                    connected_count += 1;
                }
            }
            let mut payload = json!({
                "p": p,
                "k": k,
                "total": total,
                "connected": connected_count,
                "disconnected": total - connected_count,
            });
            if classes {
                let class_list = isomorphism_classes(p, k, connected);
                payload["classes"] = serde_json::to_value(&class_list).unwrap();
                payload["classes_connected_only"] = json!(connected);
            }
            let notes = vec![
                "total equals (pk - 1)!! for even pk and 0 for odd pk".to_string(),
                "canonical_edges lists vertex pairs after lexicographic relabeling".to_string(),
            ];
            Ok((envelope("enumerate", digest_bytes(digest_input.as_bytes()), payload, notes), 0))
        }
        Command::Mc { tensor, y, samples, seed, lanes, verify_identity } => {
            let (text, digest) = read_file(&tensor)?;
            let t = parse_tensor(&text)?;
            let lanes = lane_count(lanes);
            let cfg = McConfig { y, samples, seed, lanes };
            let mut notes = vec![
                format!("generator: ChaCha8; lane l uses seed + l; lanes = {lanes}"),
                "reproducibility tuple: (tensor, y, samples, seed, lanes)".to_string(),
            ];
            let payload = if verify_identity {
                let report = verify_resolvent_identity(&t, &cfg, None)?;
                notes.push(format!("finite-difference step h = {}", report.h));
                json!({ "identity": serde_json::to_value(&report).unwrap() })
            } else {
                let estimate = estimate_resolvent(&t, &cfg)?;
                if let Some(warning) = &estimate.warning {
                    notes.push(format!("warning: {warning}"));
                }
                json!({ "resolvent": serde_json::to_value(&estimate).unwrap() })
            };
            Ok((envelope("mc", digest, payload, notes), 0))
        }
        Command::RecoverMatrix { tensor, k } => {
            if k == 0 {
                usage_error("--k must be at least 1");
            }
            let (text, digest) = read_file(&tensor)?;
            let t = parse_tensor(&text)?;
            let report = matrix_recovery_check(&t, k)?;
            let exit = if report.passed { 0 } else { 1 };
            let notes = vec![
                "compares alpha_k from the tensorial route with Tr(X^k)/N".to_string(),
                "exact arithmetic: any discrepancy indicates an engine fault".to_string(),
            ];
            Ok((envelope("recover-matrix", digest, serde_json::to_value(&report).unwrap(), notes), exit))
        }
    }
}
