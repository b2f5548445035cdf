//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use crate::arith;
use crate::certificate;
use crate::oracle::{self, OmegaForm, ScanFilter};
use crate::primality;
use crate::verifier;

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pellcert", version, about = "Check certificates that d divides the Pell unit coefficient y")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify a certificate file.
    Verify {
        path: PathBuf,
        /// Print the ladder, lift and linear-pass transcripts.
        #[arg(long)]
        trace: bool,
        /// Break the operation counts down by claim.
        #[arg(long)]
        costs: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Continued-fraction oracle for small d.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Check primality by trial division or by a primality certificate.
    Prime {
        #[arg(required_unless_present = "cert", conflicts_with = "cert")]
        n: Option<String>,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Fundamental unit of Q(sqrt d).
    Unit { d: u64 },
    /// Squarefree d in [lo, hi] with d | y.
    Scan {
        lo: u64,
        hi: u64,
        /// Only scan primes d = 3 mod 4.
        #[arg(long)]
        primes_3_mod_4: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_VERIFIED };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match cli.command {
        Command::Verify { path, trace, costs, format } => cmd_verify(&path, trace, costs, format, out, err),
        Command::Oracle { command } => match command {
            OracleCommand::Unit { d } => cmd_unit(d, out, err),
            OracleCommand::Scan { lo, hi, primes_3_mod_4, format } => {
                let filter = if primes_3_mod_4 { ScanFilter::Primes3Mod4 } else { ScanFilter::Squarefree };
                cmd_scan(lo, hi, filter, format, out, err)
            }
        },
        Command::Prime { n, cert } => match (n, cert) {
            (_, Some(path)) => cmd_prime_cert(&path, out, err),
            (Some(n), None) => cmd_prime(&n, out, err),
            (None, None) => EXIT_MALFORMED,
        },
    }
}

fn read(path: &PathBuf, err: &mut dyn Write) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(text) => Some(text),
        Err(e) => {
            let _ = writeln!(err, "cannot read {}: {e}", path.display());
            None
        }
    }
}

fn cmd_verify(
    path: &PathBuf,
    trace: bool,
    costs: bool,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let Some(text) = read(path, err) else {
        return EXIT_MALFORMED;
    };
    let cert = match certificate::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_MALFORMED;
        }
    };
    let report = verifier::verify(&cert);
    let rendered = match format {
        Format::Text => verifier::render_text(&report, trace, costs),
        Format::Structured => verifier::render_structured(&report, trace),
    };
    let _ = out.write_all(rendered.as_bytes());
    if let Some(first) = report.findings.first() {
        let _ = writeln!(err, "first failing check: {first}");
        EXIT_FAILED
    } else {
        EXIT_VERIFIED
    }
}

fn describe_unit(u: &oracle::FundamentalUnit) -> String {
    let omega = match u.omega_form {
        OmegaForm::SqrtD => format!("√{}", u.d),
        OmegaForm::HalfOnePlusSqrtD => format!("(1+√{})/2", u.d),
    };
    let sign = if u.norm_sign > 0 { "+1" } else { "-1" };
    format!(
        "ε = {} + {}·{omega}, norm {sign}, {} | y: {}",
        u.x,
        u.y,
        u.d,
        if u.d_divides_y() { "yes" } else { "no" }
    )
}

fn cmd_unit(d: u64, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match oracle::fundamental_unit(d) {
        Ok(u) => {
            let _ = writeln!(out, "{}", describe_unit(&u));
            EXIT_VERIFIED
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            EXIT_MALFORMED
        }
    }
}

fn cmd_scan(lo: u64, hi: u64, filter: ScanFilter, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let hits = match oracle::scan(lo, hi, filter) {
        Ok(h) => h,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_MALFORMED;
        }
    };
    match format {
        Format::Text => {
            for h in &hits {
                let _ = writeln!(
                    out,
                    "{} {} d mod 4 = {} y = {}",
                    h.d,
                    if h.prime { "prime" } else { "composite" },
                    h.d_mod_4,
                    h.unit.y
                );
            }
            let _ = writeln!(out, "hits: {}", hits.len());
        }
        Format::Structured => {
            let text = serde_json::to_string_pretty(&hits).expect("hits serialize");
            let _ = writeln!(out, "{text}");
        }
    }
    EXIT_VERIFIED
}

fn cmd_prime(n: &str, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let value: BigInt = match n.parse() {
        Ok(v) => v,
        Err(_) => {
            let _ = writeln!(err, "{n:?} is not an integer");
            return EXIT_MALFORMED;
        }
    };
    let td = match arith::trial_division_prime(&value) {
        Ok(td) => td,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_MALFORMED;
        }
    };
    let _ = writeln!(out, "{}: {}", td.n, if td.is_prime { "prime" } else { "composite" });
    for w in &td.witnesses {
        let _ = writeln!(out, "  {} = {}·{} + {}", td.n, w.quotient, w.divisor, w.remainder);
    }
    if td.is_prime {
        EXIT_VERIFIED
    } else {
        EXIT_FAILED
    }
}

fn cmd_prime_cert(path: &PathBuf, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(text) = read(path, err) else {
        return EXIT_MALFORMED;
    };
    let witness = match certificate::parse_pocklington(&text) {
        Ok(w) => w,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_MALFORMED;
        }
    };
    let report = primality::pocklington_verify(&witness);
    match &report.failure {
        None => {
            if let (Some(a), Some(k)) = (&report.factored_value, &report.cofactor) {
                let _ = writeln!(out, "{}: prime", report.c);
                let _ = writeln!(out, "  c - 1 = {k}·{a}, a^2 > c");
            }
            for cc in &report.coprime_checks {
                let _ = writeln!(out, "  b^((c-1)/{}) = {} mod c, coprime to c", cc.p, cc.residue);
            }
            EXIT_VERIFIED
        }
        Some(f) => {
            let _ = writeln!(out, "{}: not certified ({}: {})", report.c, f.code, f.detail);
            EXIT_FAILED
        }
    }
}
