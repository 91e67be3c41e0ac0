//! Command-line front end: `compute`, `verify`, `batch` and `kr`.
//!
//! Exit codes: 0 when everything passed, 1 when a mathematical check failed,
//! 2 for usage and configuration errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::identities::{
    kr_scan, scan_primes, CheckName, KrConfig, Mode, ParameterPolicy, PrimeRange, ScanConfig,
};
use crate::klsum::{
    batch_kloosterman, batch_kloosterman_fft, kloosterman_exact_degenerate, kloosterman_float,
    kloosterman_float_degenerate, kloosterman_r_exact,
};
use crate::modfield::PrimeModulus;
use crate::report::{
    format_sig, write_batch_csv, write_json, write_kr_csv, write_kr_human, write_scan_csv, write_scan_human,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "kloosterman",
    version,
    about = "Kloosterman sums over prime fields and verification of their identities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one sum K(p; a, b), or K_r with -r.
    Compute(ComputeArgs),
    /// Verify identities and bounds over a range of primes.
    Verify(VerifyArgs),
    /// Export K(1, t) for t = 1..p-1 as CSV.
    Batch(BatchArgs),
    /// Report max |K_r| / p^(3/4) over a range of primes.
    Kr(KrArgs),
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(short = 'p')]
    pub p: u64,
    #[arg(short = 'a', allow_negative_numbers = true)]
    pub a: i64,
    #[arg(short = 'b', allow_negative_numbers = true)]
    pub b: i64,
    /// Power of x in the first term.
    #[arg(short = 'r', default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub r: u32,
    /// Also print the canonical coefficient vector in Z[zeta_p].
    #[arg(long)]
    pub exact: bool,
    /// Accept exactly one of a, b divisible by p.
    #[arg(long)]
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckArg {
    Sq,
    Y,
    Suml,
    Moment,
    Bounds,
}

impl From<CheckArg> for CheckName {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::Sq => CheckName::SqIdentity,
            CheckArg::Y => CheckName::YDecomposition,
            CheckArg::Suml => CheckName::SumOverL,
            CheckArg::Moment => CheckName::SecondMoment,
            CheckArg::Bounds => CheckName::Bounds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    AllPairs,
    FixedA,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Which (a, b) pairs to check per prime.
    #[arg(long, value_enum, default_value = "fixed-a")]
    pub policy: PolicyArg,
    /// Pairs per prime for the sampled policy.
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    /// Seed for the sampled policy.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl PolicyArgs {
    fn policy(&self) -> ParameterPolicy {
        match self.policy {
            PolicyArg::AllPairs => ParameterPolicy::AllPairs,
            PolicyArg::FixedA => ParameterPolicy::FixedAAllB,
            PolicyArg::Sampled => ParameterPolicy::Sampled {
                k: self.samples,
                seed: self.seed,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "sq,y,suml,moment,bounds"
    )]
    pub checks: Vec<CheckArg>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Collect all failures instead of stopping at the first failing prime.
    #[arg(long)]
    pub keep_going: bool,
    /// Require the largest observed |K| / 2 sqrt(p) to reach this value.
    #[arg(long)]
    pub sentinel: Option<f64>,
    /// Include one record per check in JSON output (CSV always has them).
    #[arg(long)]
    pub records: bool,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[arg(short = 'p')]
    pub p: u64,
    /// Add the angle column arccos(K / 2 sqrt(p)).
    #[arg(long)]
    pub angles: bool,
    /// Use the length-p fast transform instead of p direct sums.
    #[arg(long)]
    pub fft: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KrArgs {
    #[arg(short = 'r', value_parser = clap::value_parser!(u32).range(1..))]
    pub r: u32,
    #[arg(long)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(Error),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Compute(args) => compute(&args, stdout),
        Command::Verify(args) => verify(&args, stdout),
        Command::Batch(args) => batch(&args, stdout),
        Command::Kr(args) => kr(&args, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Check) => EXIT_CHECK_FAILED,
        Err(Failure::Usage(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn with_output(
    path: &Option<PathBuf>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            f(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

fn format_complex(re: f64, im: f64) -> String {
    let sign = if im.is_sign_negative() && im != 0.0 {
        '-'
    } else {
        '+'
    };
    format!("{} {} {}i", format_sig(re), sign, format_sig(im.abs()))
}

fn compute(args: &ComputeArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let m = PrimeModulus::new(args.p)?;
    let (a, b) = (args.a, args.b);
    if args.r == 1 {
        let value = if args.degenerate {
            kloosterman_float_degenerate(&m, a, b)?
        } else {
            kloosterman_float(&m, a, b)?
        };
        writeln!(out, "{}", format_sig(value)).map_err(Error::from)?;
        if args.exact {
            let k = kloosterman_exact_degenerate(&m, a, b)?;
            writeln!(out, "{}", k.exact).map_err(Error::from)?;
        }
    } else {
        let k = kloosterman_r_exact(&m, args.r, a, b)?;
        writeln!(out, "{}", format_complex(k.embedding.re, k.embedding.im)).map_err(Error::from)?;
        if args.exact {
            writeln!(out, "{}", k.exact).map_err(Error::from)?;
        }
    }
    Ok(())
}

fn verify(args: &VerifyArgs, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    if args.from > args.to {
        return Err(Error::EmptyRange {
            lo: args.from,
            hi: args.to,
        }
        .into());
    }
    let fmt = args.output.format;
    let cfg = ScanConfig {
        range: PrimeRange {
            lo: args.from,
            hi: args.to,
        },
        policy: args.policy.policy(),
        checks: args.checks.iter().map(|&c| c.into()).collect(),
        mode: match args.mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        },
        keep_going: args.keep_going,
        jobs: args.output.jobs.map(|j| j as usize),
        sentinel: args.sentinel,
        collect_records: fmt == Format::Csv || (fmt == Format::Json && args.records),
    };
    let report = scan_primes(&cfg)?;
    with_output(&args.output.out, stdout, |w| match fmt {
        Format::Json => write_json(&report, w),
        Format::Csv => write_scan_csv(&report, w),
        Format::Human => write_scan_human(&report, w),
    })?;
    if report.success() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn batch(args: &BatchArgs, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    let m = PrimeModulus::new(args.p)?;
    let values = if args.fft {
        batch_kloosterman_fft(&m)
    } else {
        batch_kloosterman(&m)
    };
    with_output(&args.out, stdout, |w| {
        write_batch_csv(m.p(), &values, args.angles, w)
    })?;
    Ok(())
}

fn kr(args: &KrArgs, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    let cfg = KrConfig {
        r: args.r,
        range: PrimeRange {
            lo: args.from,
            hi: args.to,
        },
        policy: args.policy.policy(),
        jobs: args.output.jobs.map(|j| j as usize),
    };
    let report = kr_scan(&cfg)?;
    with_output(&args.output.out, stdout, |w| match args.output.format {
        Format::Json => write_json(&report, w),
        Format::Csv => write_kr_csv(&report, w),
        Format::Human => write_kr_human(&report, w),
    })?;
    if report.success() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("kloosterman").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn compute_examples() {
        assert_eq!(
            call(&["compute", "-p", "5", "-a", "1", "-b", "1"]),
            (0, "0.3819660113\n".into(), String::new())
        );
        let (code, out, _) = call(&["compute", "-p", "5", "-a", "1", "-b", "1", "--exact"]);
        assert_eq!(code, 0);
        assert_eq!(out, "0.3819660113\n[2,0,1,1,0]\n");
        let (code, _, err) = call(&["compute", "-p", "4", "-a", "1", "-b", "1"]);
        assert_eq!(code, 2);
        assert!(err.contains("4 is not an odd prime"), "{err}");
    }

    #[test]
    fn compute_degenerate_and_kr() {
        assert_eq!(call(&["compute", "-p", "7", "-a", "3", "-b", "0"]).0, 2);
        let (code, out, _) = call(&[
            "compute",
            "-p",
            "7",
            "-a",
            "3",
            "-b",
            "0",
            "--degenerate",
            "--exact",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "-1\n[-1,0,0,0,0,0,0]\n");
        let (code, out, _) = call(&["compute", "-p", "5", "-a", "1", "-b", "1", "-r", "2", "--exact"]);
        assert_eq!(code, 0);
        assert!(out.ends_with("i\n[1,1,2,0,0]\n"), "{out}");
        assert_eq!(
            call(&["compute", "-p", "5", "-a", "1", "-b", "1", "-r", "0"]).0,
            2
        );
    }

    #[test]
    fn verify_exit_codes() {
        assert_eq!(
            call(&["verify", "--from", "3", "--to", "31", "--checks", "sq", "--mode", "exact"]).0,
            0
        );
        assert_eq!(call(&["verify", "--from", "10", "--to", "9"]).0, 2);
        assert_eq!(call(&["verify", "--from", "24", "--to", "28"]).0, 2);
        // the sentinel cannot be met at p = 3, a genuine check failure
        assert_eq!(
            call(&[
                "verify",
                "--from",
                "3",
                "--to",
                "3",
                "--checks",
                "bounds",
                "--sentinel",
                "0.9"
            ])
            .0,
            1
        );
    }

    #[test]
    fn batch_examples() {
        let (code, out, _) = call(&["batch", "-p", "5"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "t,value");
        assert_eq!(lines[1], "1,0.3819660113");
        let sum: f64 = lines[1..]
            .iter()
            .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
            .sum();
        assert!((sum - 1.0).abs() < 1e-6 * 5.0);
        assert_eq!(call(&["batch", "-p", "2"]).0, 2);

        let (_, angles, _) = call(&["batch", "-p", "7", "--angles"]);
        assert!(angles.starts_with("t,value,angle\n"));
        for line in angles.lines().skip(1) {
            let theta: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
            assert!((0.0..=std::f64::consts::PI).contains(&theta));
        }
    }

    #[test]
    fn kr_exit_codes() {
        let (code, out, _) = call(&["kr", "-r", "2", "--from", "3", "--to", "50"]);
        assert_eq!(code, 0);
        assert!(out.contains("10-99"), "{out}");
        assert_eq!(call(&["kr", "-r", "0", "--from", "3", "--to", "50"]).0, 2);
    }

    #[test]
    fn malformed_invocations_exit_2() {
        let cases: &[&[&str]] = &[
            &[],
            &["frobnicate"],
            &["compute"],
            &["compute", "-p", "5", "-a", "1"],
            &["compute", "-p", "x", "-a", "1", "-b", "1"],
            &["compute", "-p", "9", "-a", "1", "-b", "1"],
            &["compute", "-p", "2", "-a", "1", "-b", "1"],
            &["compute", "-p", "5", "-a", "5", "-b", "1"],
            &["compute", "-p", "5", "-a", "0", "-b", "0", "--degenerate"],
            &["verify", "--from", "3"],
            &["verify", "--from", "3", "--to", "7", "--checks", "nope"],
            &["verify", "--from", "3", "--to", "7", "--mode", "approx"],
            &["verify", "--from", "3", "--to", "7", "--jobs", "0"],
            &["verify", "--from", "3", "--to", "7", "--format", "xml"],
            &["batch"],
            &["batch", "-p", "15"],
            &["kr", "--from", "3", "--to", "7"],
            &["kr", "-r", "-1", "--from", "3", "--to", "7"],
        ];
        for case in cases {
            let (code, _, err) = call(case);
            assert_eq!(code, 2, "{case:?}: {err}");
        }
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify"));
    }
}
