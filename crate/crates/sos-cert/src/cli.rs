//! Command-line driver. [`run`] takes the argument list and output sinks so
//! that tests can call it in-process.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};

use crate::certifier::{self, CertError, CertifyOptions, Engine, Mode};
use crate::io::{parse_certificate, parse_problem, write_certificate, ProblemFile};
use crate::quotient::{Quotient, QuotientError};
use crate::sdp::SdpError;
use crate::verify::{degree_bounds, height_bound_formula, input_height, verify_certificate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CONDITION: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

const GRAMMAR: &str = "\
POLYNOMIALS
  expr   := term (('+' | '-') term)*
  term   := unary (('*' | '/') unary)*      division only by constants
  unary  := '-' unary | '+' unary | power
  power  := atom ('^' integer)?
  atom   := number | name | '(' expr ')'
  number := digits ('.' digits)? ('/' digits)?
  e.g.   3/2*x^2*y - (x - 1)^2 + 0.25

PROBLEM FILE (one declaration per line, '#' starts a comment)
  vars: x, y            variable names, required first
  f: x + y + 3          the polynomial to certify
  g: y                  inequality g >= 0, zero or more
  h: x^2 - 1            equality h = 0, one or more
  radical: true         optional, checked against the computed radical
  graded: true          optional, checked exactly
  options:              optional; following 'key = value' lines set defaults
    mode = strict         (strict | nonneg)
    engine = sdp          (constructive | sdp)
    order = 2             monomial degree for the sdp engine
    precision_start = 16  starting binary precision
    seed = 0

CERTIFICATE FILE
  sos-cert certificate
  mode: strict | nonneg
  vars: x, y
  block 0                             free squares; block i multiplies g_i
  weight <rational> square <poly> [witness <poly>]
  cofactor <j> <poly>                 multiplies h_j, j = 1, 2, ...
  scaling nu0 <int>...                optional, checked when present
  scaling nu1 <int>
  scaling nu2 <int>

EXIT CODES
  0 success   1 input or I/O error   2 hypothesis fails (no certificate of
  this kind)   3 precision ceiling or solver failure   4 verification failed

ENVIRONMENT
  SOS_CERT_MAX_BITS   precision ceiling in bits (default 4096)";

#[derive(Parser, Debug)]
#[command(name = "sos-cert", version, about = "Exact rational SoS certificates on finite semialgebraic sets", after_long_help = GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Strict,
    Nonneg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Constructive,
    Sdp,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Compute a certificate and verify it.
    Certify {
        #[arg(long)]
        input: String,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// Monomial degree of the SDP blocks (defaults to the basis degree).
        #[arg(long)]
        order: Option<u32>,
        /// Starting binary precision of the rounding loop.
        #[arg(long)]
        precision_start: Option<u32>,
        /// Write the certificate here instead of standard output.
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a certificate exactly against a problem.
    Verify {
        #[arg(long)]
        input: String,
        #[arg(long)]
        certificate: String,
    },
    /// Degree bounds, hierarchy order and height formulas.
    Bounds {
        #[arg(long)]
        input: String,
        /// Constant `c` of the height formulas.
        #[arg(long, default_value_t = 1.0)]
        constant: f64,
    },
}

fn read(path: &str) -> Result<String, String> {
    std::fs::read_to_string(path).map(|s| s.replace("\r\n", "\n")).map_err(|e| format!("{}: {}", path, e))
}

fn load_problem(path: &str) -> Result<ProblemFile, String> {
    parse_problem(&read(path)?).map_err(|e| format!("{}: {}", path, e))
}

fn option<T: std::str::FromStr>(p: &ProblemFile, key: &str) -> Result<Option<T>, String> {
    p.option(key).map(|v| v.parse::<T>().map_err(|_| format!("option {}: cannot parse `{}`", key, v))).transpose()
}

/// Exit code for a certification failure.
pub fn exit_code(e: &CertError) -> i32 {
    if e.is_condition_failure() {
        EXIT_CONDITION
    } else if e.is_precision_failure() {
        EXIT_PRECISION
    } else {
        match e {
            CertError::Quotient(QuotientError::NoGenerators) => EXIT_INPUT,
            CertError::Sdp(SdpError::BadResult { .. }) => EXIT_INPUT,
            _ => EXIT_PRECISION,
        }
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return code;
        }
    };
    match cli.cmd {
        Cmd::Certify { input, mode, engine, order, precision_start, out: out_path, seed } => {
            let p = match load_problem(&input) {
                Ok(p) => p,
                Err(e) => {
                    let _ = writeln!(err, "error: {}", e);
                    return EXIT_INPUT;
                }
            };
            let resolved = (|| -> Result<(Mode, CertifyOptions), String> {
                let mode = match mode {
                    Some(ModeArg::Strict) => Mode::Strict,
                    Some(ModeArg::Nonneg) => Mode::Nonnegative,
                    None => match p.option("mode") {
                        None | Some("strict") => Mode::Strict,
                        Some("nonneg") => Mode::Nonnegative,
                        Some(m) => return Err(format!("option mode: unknown value `{}`", m)),
                    },
                };
                let mut opts = CertifyOptions::default();
                opts.engine = match engine {
                    Some(EngineArg::Constructive) => Engine::Constructive,
                    Some(EngineArg::Sdp) => Engine::Sdp,
                    None => match p.option("engine") {
                        None | Some("constructive") => Engine::Constructive,
                        Some("sdp") => Engine::Sdp,
                        Some(m) => return Err(format!("option engine: unknown value `{}`", m)),
                    },
                };
                opts.order = order.or(option(&p, "order")?);
                if let Some(b) = precision_start.or(option(&p, "precision_start")?) {
                    opts.start_bits = b.max(1);
                }
                opts.seed = seed.or(option(&p, "seed")?).unwrap_or(0);
                Ok((mode, opts))
            })();
            let (mode, opts) = match resolved {
                Ok(v) => v,
                Err(e) => {
                    let _ = writeln!(err, "error: {}", e);
                    return EXIT_INPUT;
                }
            };
            let cert = match certifier::certify(&p.instance, mode, &opts) {
                Ok(c) => c,
                Err(e) => {
                    let _ = writeln!(err, "error: {}", e);
                    return exit_code(&e);
                }
            };
            let text = write_certificate(&cert);
            match &out_path {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        let _ = writeln!(err, "error: {}: {}", path, e);
                        return EXIT_INPUT;
                    }
                }
                None => {
                    let _ = write!(out, "{}", text);
                }
            }
            let report = verify_certificate(&p.instance, &cert);
            let _ = writeln!(err, "{}", report);
            if report.ok() {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Cmd::Verify { input, certificate } => {
            let loaded = load_problem(&input).and_then(|p| {
                let c = parse_certificate(&read(&certificate)?).map_err(|e| format!("{}: {}", certificate, e))?;
                Ok((p, c))
            });
            let (p, c) = match loaded {
                Ok(v) => v,
                Err(e) => {
                    let _ = writeln!(err, "error: {}", e);
                    return EXIT_INPUT;
                }
            };
            if c.names != p.instance.names {
                let _ = writeln!(
                    err,
                    "error: certificate variables [{}] differ from problem variables [{}]",
                    c.names.join(", "),
                    p.instance.names.join(", ")
                );
                return EXIT_INPUT;
            }
            let report = verify_certificate(&p.instance, &c);
            let _ = writeln!(out, "{}", report);
            if report.ok() {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Cmd::Bounds { input, constant } => {
            let p = match load_problem(&input) {
                Ok(p) => p,
                Err(e) => {
                    let _ = writeln!(err, "error: {}", e);
                    return EXIT_INPUT;
                }
            };
            let inst = &p.instance;
            let q = match Quotient::new_untracked(&inst.h) {
                Ok(q) => q,
                Err(e) => {
                    let _ = writeln!(err, "error: {}", e);
                    return EXIT_CONDITION;
                }
            };
            let b = degree_bounds(inst, &q);
            let tau = input_height(inst);
            let h = height_bound_formula(inst.nvars() as u32, b.d, b.deg_b, tau, inst.f.degree(), constant);
            let _ = writeln!(out, "{}", b);
            let _ = writeln!(out, "graded={}", q.graded);
            let _ = writeln!(out, "tau={}", tau);
            let _ = writeln!(out, "{}", h);
            EXIT_OK
        }
    }
}
