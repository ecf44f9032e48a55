//! Batch front end: evaluates DSL programs against a chosen Artin ring and
//! prints JSON, or runs the named property suites.

use std::io::Read;
use std::process::ExitCode;

use clap::Parser;

use ffc_core::artin::ArtinSpec;
use ffc_core::dsl::Env;
use ffc_core::suites;
use ffc_core::Error;

#[derive(Parser)]
#[command(
    name = "ffc",
    about = "exact calculus of framed formal curves over truncated Artin rings"
)]
struct Cli {
    /// Coefficient ring, e.g. "m=1,N=3" or "m=2,N=4,g=2"; the FFC_RING
    /// environment variable supplies a default.
    #[arg(long)]
    ring: Option<String>,

    /// Evaluate this expression instead of reading a file or stdin.
    #[arg(short = 'e', long)]
    expr: Option<String>,

    /// Run a named property suite (artin, witt, annuli, corolla, fld, all).
    #[arg(long)]
    check: Option<String>,

    /// Seed for randomized suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Iteration count for randomized suites.
    #[arg(long, default_value_t = 100)]
    iterations: usize,

    /// Compact JSON output (the default).
    #[arg(long)]
    json: bool,

    /// Pretty-print the JSON output.
    #[arg(long, conflicts_with = "json")]
    pretty: bool,

    /// Program file (defaults to stdin).
    file: Option<String>,
}

fn parse_ring(s: &str) -> Result<ArtinSpec, String> {
    let mut m: Option<u32> = None;
    let mut n: Option<u32> = None;
    let mut g: u32 = 0;
    for part in s.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("bad ring component `{}`", part))?;
        let val: u32 = v
            .trim()
            .parse()
            .map_err(|_| format!("bad number in `{}`", part))?;
        match k.trim() {
            "m" => m = Some(val),
            "N" => n = Some(val),
            "g" => g = val,
            other => return Err(format!("unknown ring key `{}`", other)),
        }
    }
    let m = m.ok_or("ring spec needs m=<int>")?;
    let n = n.ok_or("ring spec needs N=<int>")?;
    if n == 0 {
        return Err("truncation order N must be positive".into());
    }
    Ok(ArtinSpec::with_generics(m, n, g))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ring_str = cli
        .ring
        .or_else(|| std::env::var("FFC_RING").ok())
        .unwrap_or_else(|| "m=1,N=3".into());
    let spec = match parse_ring(&ring_str) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    };

    if let Some(suite) = cli.check {
        let mut all_ok = true;
        let names: Vec<&str> = if suite == "all" {
            suites::suite_names().to_vec()
        } else {
            vec![suite.as_str()]
        };
        for name in names {
            match suites::run_suite(name, spec, cli.seed, cli.iterations) {
                Some(rep) => {
                    let status = if rep.ok() { "PASS" } else { "FAIL" };
                    println!(
                        "{} {}: {} passed, {} failed",
                        status, rep.name, rep.passed, rep.failed
                    );
                    for d in &rep.detail {
                        println!("  {}", d);
                    }
                    all_ok &= rep.ok();
                }
                None => {
                    eprintln!(
                        "error: unknown suite `{}` (available: {})",
                        name,
                        suites::suite_names().join(", ")
                    );
                    return ExitCode::from(2);
                }
            }
        }
        return if all_ok {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        };
    }

    let source = if let Some(e) = cli.expr {
        e
    } else if let Some(path) = cli.file {
        match std::fs::read_to_string(&path) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: cannot read {}: {}", path, e);
                return ExitCode::from(2);
            }
        }
    } else {
        let mut buf = String::new();
        if std::io::stdin().read_to_string(&mut buf).is_err() {
            eprintln!("error: cannot read stdin");
            return ExitCode::from(2);
        }
        buf
    };

    let env = Env::new(spec);
    match env.run(&source) {
        Ok(v) => {
            let out = if cli.pretty {
                serde_json::to_string_pretty(&v).unwrap()
            } else {
                serde_json::to_string(&v).unwrap()
            };
            println!("{}", out);
            ExitCode::SUCCESS
        }
        Err(err) => {
            let code = match &err {
                Error::Parse { .. } | Error::Type(_) => 2,
                _ => 1,
            };
            let payload = serde_json::json!({
                "error": err.to_string(),
                "code": error_code(&err),
            });
            eprintln!("{}", payload);
            ExitCode::from(code)
        }
    }
}

fn error_code(e: &Error) -> &'static str {
    match e {
        Error::SpecMismatch(_, _) => "SpecMismatch",
        Error::NotAUnit => "NotAUnit",
        Error::NotNilpotent => "NotNilpotent",
        Error::NotSubstitutable => "NotSubstitutable",
        Error::NotInvertible => "NotInvertible",
        Error::MidNotAUnit => "MidNotAUnit",
        Error::SlotOutOfRange(_) => "SlotOutOfRange",
        Error::UnstableCurve(_) => "UnstableCurve",
        Error::EdgeNotInGraph(_) => "EdgeNotInGraph",
        Error::LabelMismatch(_) => "LabelMismatch",
        Error::ColorMismatch(_) => "ColorMismatch",
        Error::Invalid(_) => "Invalid",
        Error::Parse { .. } => "Parse",
        Error::Type(_) => "Type",
    }
}
