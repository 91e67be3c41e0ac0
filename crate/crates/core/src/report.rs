//! Report serialization.
//!
//! Every float leaves the crate rounded to 10 significant digits, in JSON and
//! CSV alike, so identical runs produce identical bytes. CSV output has a
//! header row and LF line endings; JSON output is one pretty-printed object
//! followed by a newline.

use std::io::Write;

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::identities::{KrReport, ScanReport};

/// Formats like C's `%.10g`: 10 significant digits, trailing zeros removed,
/// scientific notation outside [1e−4, 1e10).
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..10).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (9 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to 10 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        format_sig(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

pub(crate) fn ser_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*x))
}

pub(crate) fn ser_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round_sig(*v)),
        None => s.serialize_none(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// One row per executed check.
pub fn write_scan_csv<W: Write>(report: &ScanReport, w: W) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record([
        "p",
        "a",
        "b",
        "check",
        "exact_pass",
        "float_residual",
        "abs_value",
        "weil_ratio",
        "kloosterman_ratio",
        "corollary_ratio",
    ])?;
    for r in &report.records {
        out.write_record([
            r.p.to_string(),
            r.a.to_string(),
            r.b.to_string(),
            r.check.as_str().to_string(),
            r.exact_pass.map(|b| b.to_string()).unwrap_or_default(),
            opt(r.float_residual),
            opt(r.abs_value),
            opt(r.weil_ratio),
            opt(r.kloosterman_ratio),
            opt(r.corollary_ratio),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_scan_human<W: Write>(report: &ScanReport, mut w: W) -> Result<()> {
    let checks: Vec<&str> = report.checks.iter().map(|c| c.as_str()).collect();
    writeln!(
        w,
        "primes {}..{}  checks {}  mode {:?}",
        report.prime_range.lo,
        report.prime_range.hi,
        checks.join(","),
        report.mode
    )?;
    let t = report.totals;
    writeln!(w, "{:<19}{:>16}", "primes", t.primes)?;
    writeln!(w, "{:<19}{:>16}", "checks run", t.run)?;
    writeln!(w, "{:<19}{:>16}", "checks passed", t.passed)?;
    let worst = [
        ("weil", report.worst.weil),
        ("kloosterman", report.worst.kloosterman),
        ("corollary", report.worst.corollary),
        ("float residual", report.worst.float_residual),
    ];
    for (name, e) in worst {
        if let Some(e) = e {
            writeln!(
                w,
                "max {:<15}{:>16}  at p={} a={} b={}",
                name,
                format_sig(e.value),
                e.p,
                e.a,
                e.b
            )?;
        }
    }
    if let Some(s) = report.sentinel {
        writeln!(
            w,
            "sentinel           {} (need weil >= {})",
            if s.met { "met" } else { "NOT met" },
            format_sig(s.threshold)
        )?;
    }
    for c in &report.counterexamples {
        writeln!(
            w,
            "FAIL {} p={} a={} b={}: {}",
            c.check.as_str(),
            c.p,
            c.a,
            c.b,
            c.detail
        )?;
    }
    writeln!(w, "{}", if report.success() { "OK" } else { "FAILED" })?;
    Ok(())
}

pub fn write_kr_csv<W: Write>(report: &KrReport, w: W) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["p", "pairs", "a", "b", "max_abs", "max_ratio", "envelope"])?;
    for row in &report.per_prime {
        out.write_record([
            row.p.to_string(),
            row.pairs.to_string(),
            row.a.to_string(),
            row.b.to_string(),
            format_sig(row.max_abs),
            format_sig(row.max_ratio),
            opt(row.envelope),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Max |K_r|/p^{3/4} grouped by decimal order of magnitude of p.
pub fn write_kr_human<W: Write>(report: &KrReport, mut w: W) -> Result<()> {
    writeln!(
        w,
        "K_r scan  r={}  primes {}..{}",
        report.r, report.prime_range.lo, report.prime_range.hi
    )?;
    writeln!(
        w,
        "{:<14}{:>8}{:>16}{:>10}{:>8}{:>16}",
        "p range", "primes", "max ratio", "at p", "b", "envelope"
    )?;
    let mut rows = report.per_prime.iter().peekable();
    while let Some(first) = rows.peek() {
        let band = decade(first.p);
        let mut count = 0;
        let mut best = *first;
        while let Some(row) = rows.next_if(|r| decade(r.p) == band) {
            count += 1;
            if row.max_ratio > best.max_ratio {
                best = row;
            }
        }
        let lo = 10u64.pow(band);
        writeln!(
            w,
            "{:<14}{:>8}{:>16}{:>10}{:>8}{:>16}",
            format!("{}-{}", lo, lo * 10 - 1),
            count,
            format_sig(best.max_ratio),
            best.p,
            best.b,
            opt(best.envelope)
        )?;
    }
    if let Some(e) = report.worst {
        writeln!(
            w,
            "overall max ratio {} at p={} a={} b={}",
            format_sig(e.value),
            e.p,
            e.a,
            e.b
        )?;
    }
    for c in &report.counterexamples {
        writeln!(w, "FAIL p={} a={} b={}: {}", c.p, c.a, c.b, c.detail)?;
    }
    Ok(())
}

fn decade(p: u32) -> u32 {
    p.ilog10()
}

/// `t,value[,angle]` for K(1, t), t = 1..p−1, where angle = arccos(K / 2√p).
pub fn write_batch_csv<W: Write>(p: u32, values: &[f64], angles: bool, w: W) -> Result<()> {
    let mut out = csv_writer(w);
    if angles {
        out.write_record(["t", "value", "angle"])?;
    } else {
        out.write_record(["t", "value"])?;
    }
    let scale = 2.0 * (p as f64).sqrt();
    for (i, &v) in values.iter().enumerate() {
        let t = (i + 1).to_string();
        if angles {
            out.write_record([t, format_sig(v), format_sig(kloosterman_angle(v, scale))])?;
        } else {
            out.write_record([t, format_sig(v)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// θ ∈ [0, π] with K = 2√p·cos θ; `scale` is 2√p.
pub fn kloosterman_angle(value: f64, scale: f64) -> f64 {
    (value / scale).clamp(-1.0, 1.0).acos()
}
