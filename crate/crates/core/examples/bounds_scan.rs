//! Scan a prime range for the magnitude bounds and print the JSON report.
//!
//! cargo run --release --example bounds_scan -- 997

use kloosterman::identities::DEFAULT_SENTINEL;
use kloosterman::report::write_json;
use kloosterman::{scan_primes, CheckName, Mode, ScanConfig};

fn main() -> kloosterman::Result<()> {
    let hi = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("upper prime bound"))
        .unwrap_or(499);
    let cfg = ScanConfig {
        checks: vec![CheckName::Bounds],
        mode: Mode::Float,
        keep_going: true,
        sentinel: Some(DEFAULT_SENTINEL),
        ..ScanConfig::new(3, hi)
    };
    let report = scan_primes(&cfg)?;
    write_json(&report, std::io::stdout().lock())?;
    if let Some(w) = report.worst.weil {
        eprintln!("largest |K|/2√p = {:.6} at p={} b={}", w.value, w.p, w.b);
    }
    Ok(())
}
