//! Run an exact scan on a small range and write it as JSON, CSV and a table.

use std::fs::File;

use kloosterman::report::{write_json, write_scan_csv, write_scan_human};
use kloosterman::{scan_primes, Mode, ParameterPolicy, ScanConfig};

fn main() -> kloosterman::Result<()> {
    let cfg = ScanConfig {
        policy: ParameterPolicy::Sampled { k: 8, seed: 42 },
        mode: Mode::Exact,
        collect_records: true,
        jobs: Some(4),
        ..ScanConfig::new(3, 41)
    };
    let report = scan_primes(&cfg)?;

    let dir = std::env::temp_dir();
    let json = dir.join("kloosterman_scan.json");
    let csv = dir.join("kloosterman_scan.csv");
    write_json(&report, File::create(&json)?)?;
    write_scan_csv(&report, File::create(&csv)?)?;
    write_scan_human(&report, std::io::stdout().lock())?;
    println!("wrote {} and {}", json.display(), csv.display());
    Ok(())
}
