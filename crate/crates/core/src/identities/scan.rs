//! Prime-range scan drivers.
//!
//! Primes are scanned in parallel and, within each prime, parameter pairs as
//! well. Every per-pair result depends only on (p, a, b), and partial results
//! are merged in prime order, so reports do not depend on the thread count.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BoundReport, CheckName, IdentityReport, Mode, Verifier};
use crate::error::{Error, Result};
use crate::klsum::kloosterman_r_exact;
use crate::modfield::{odd_primes, PrimeModulus};
use crate::report::{ser_f64, ser_opt_f64};

/// Which (a, b) pairs to check for each prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterPolicy {
    /// Every (a, b) in (1..p)².
    AllPairs,
    /// a = 1 and every b in 1..p; K(a, b) = K(1, ab) makes this exhaustive
    /// up to relabelling.
    FixedAAllB,
    /// `k` pseudorandom pairs per prime, drawn from a generator seeded by
    /// `seed` and p.
    Sampled { k: usize, seed: u64 },
    /// An explicit list; pairs with a or b divisible by p are skipped.
    Pairs(Vec<(u32, u32)>),
}

impl ParameterPolicy {
    pub fn pairs(&self, p: u32) -> Vec<(u32, u32)> {
        match self {
            ParameterPolicy::AllPairs => (1..p).flat_map(|a| (1..p).map(move |b| (a, b))).collect(),
            ParameterPolicy::FixedAAllB => (1..p).map(|b| (1, b)).collect(),
            ParameterPolicy::Sampled { k, seed } => {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(seed ^ (p as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                (0..*k)
                    .map(|_| (rng.random_range(1..p), rng.random_range(1..p)))
                    .collect()
            }
            ParameterPolicy::Pairs(list) => list
                .iter()
                .map(|&(a, b)| (a % p, b % p))
                .filter(|&(a, b)| a != 0 && b != 0)
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeRange {
    pub lo: u64,
    pub hi: u64,
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub range: PrimeRange,
    pub policy: ParameterPolicy,
    pub checks: Vec<CheckName>,
    pub mode: Mode,
    /// Collect every failure instead of stopping at the first failing prime.
    pub keep_going: bool,
    /// Worker threads; `None` uses the host's available parallelism.
    pub jobs: Option<usize>,
    /// Lower bound required of the largest observed weil ratio when bounds
    /// are checked. Guards against a broken |K| that is uniformly tiny.
    pub sentinel: Option<f64>,
    /// Keep one record per executed check in the report.
    pub collect_records: bool,
}

impl ScanConfig {
    pub fn new(lo: u64, hi: u64) -> Self {
        Self {
            range: PrimeRange { lo, hi },
            policy: ParameterPolicy::FixedAAllB,
            checks: CheckName::ALL.to_vec(),
            mode: Mode::Exact,
            keep_going: false,
            jobs: None,
            sentinel: None,
            collect_records: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub primes: usize,
    pub run: usize,
    pub passed: usize,
}

/// A maximum together with the parameters where it occurred.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Extremum {
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    pub p: u32,
    pub a: u32,
    pub b: u32,
}

impl Extremum {
    /// Larger value wins; ties go to the smaller (p, a, b).
    fn merge(slot: &mut Option<Extremum>, cand: Option<Extremum>) {
        let Some(cand) = cand else { return };
        match slot {
            Some(cur)
                if cur.value > cand.value
                    || (cur.value == cand.value && (cur.p, cur.a, cur.b) <= (cand.p, cand.a, cand.b)) => {}
            _ => *slot = Some(cand),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct WorstRatios {
    pub weil: Option<Extremum>,
    pub kloosterman: Option<Extremum>,
    pub corollary: Option<Extremum>,
    pub float_residual: Option<Extremum>,
}

impl WorstRatios {
    fn absorb(&mut self, other: WorstRatios) {
        Extremum::merge(&mut self.weil, other.weil);
        Extremum::merge(&mut self.kloosterman, other.kloosterman);
        Extremum::merge(&mut self.corollary, other.corollary);
        Extremum::merge(&mut self.float_residual, other.float_residual);
    }

    fn bound(&mut self, r: &BoundReport) {
        let at = |value| {
            Some(Extremum {
                value,
                p: r.p,
                a: r.a,
                b: r.b,
            })
        };
        Extremum::merge(&mut self.weil, at(r.weil_ratio));
        Extremum::merge(&mut self.kloosterman, at(r.kloosterman_ratio));
        Extremum::merge(&mut self.corollary, at(r.corollary_ratio));
    }

    fn residual(&mut self, r: &IdentityReport) {
        Extremum::merge(
            &mut self.float_residual,
            Some(Extremum {
                value: r.float_residual,
                p: r.p,
                a: r.a,
                b: r.b,
            }),
        );
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub p: u32,
    pub a: u32,
    pub b: u32,
    pub check: CheckName,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sentinel {
    #[serde(serialize_with = "ser_f64")]
    pub threshold: f64,
    #[serde(serialize_with = "ser_opt_f64")]
    pub observed: Option<f64>,
    pub met: bool,
}

/// One executed check, flattened for tabular export.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub p: u32,
    pub a: u32,
    pub b: u32,
    pub check: CheckName,
    pub exact_pass: Option<bool>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub float_residual: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub abs_value: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub weil_ratio: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub kloosterman_ratio: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub corollary_ratio: Option<f64>,
}

impl From<&IdentityReport> for CheckRecord {
    fn from(r: &IdentityReport) -> Self {
        Self {
            p: r.p,
            a: r.a,
            b: r.b,
            check: r.check,
            exact_pass: r.exact_pass,
            float_residual: Some(r.float_residual),
            abs_value: None,
            weil_ratio: None,
            kloosterman_ratio: None,
            corollary_ratio: None,
        }
    }
}

impl From<&BoundReport> for CheckRecord {
    fn from(r: &BoundReport) -> Self {
        Self {
            p: r.p,
            a: r.a,
            b: r.b,
            check: CheckName::Bounds,
            exact_pass: None,
            float_residual: None,
            abs_value: Some(r.abs_value),
            weil_ratio: Some(r.weil_ratio),
            kloosterman_ratio: Some(r.kloosterman_ratio),
            corollary_ratio: Some(r.corollary_ratio),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub prime_range: PrimeRange,
    pub parameter_policy: ParameterPolicy,
    pub mode: Mode,
    pub checks: Vec<CheckName>,
    pub totals: Totals,
    pub worst: WorstRatios,
    pub sentinel: Option<Sentinel>,
    pub counterexamples: Vec<Counterexample>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<CheckRecord>,
}

impl ScanReport {
    /// No counterexamples, and the sentinel (if configured) was met.
    pub fn success(&self) -> bool {
        self.counterexamples.is_empty() && self.sentinel.is_none_or(|s| s.met)
    }
}

#[derive(Default)]
struct Partial {
    totals: Totals,
    worst: WorstRatios,
    counterexamples: Vec<Counterexample>,
    records: Vec<CheckRecord>,
}

impl Partial {
    fn absorb(&mut self, other: Partial) {
        self.totals.primes += other.totals.primes;
        self.totals.run += other.totals.run;
        self.totals.passed += other.totals.passed;
        self.worst.absorb(other.worst);
        self.counterexamples.extend(other.counterexamples);
        self.records.extend(other.records);
    }

    fn fail(&mut self, p: u32, a: u32, b: u32, check: CheckName, detail: String) {
        self.counterexamples.push(Counterexample {
            p,
            a,
            b,
            check,
            detail,
        });
    }
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

fn primes_in(range: PrimeRange) -> Result<Vec<u32>> {
    let primes = odd_primes(range.lo, range.hi);
    if primes.is_empty() {
        return Err(Error::EmptyRange {
            lo: range.lo,
            hi: range.hi,
        });
    }
    primes
        .into_iter()
        .map(|p| PrimeModulus::without_table(p).map(|m| m.p()))
        .collect()
}

fn run_pair(v: &Verifier, a: u32, b: u32, cfg: &ScanConfig, checks: &[CheckName]) -> Partial {
    let p = v.modulus().p();
    let mut out = Partial::default();
    for &check in checks {
        out.totals.run += 1;
        if check == CheckName::Bounds {
            match v.bounds(a as i64, b as i64) {
                Ok(r) => {
                    out.totals.passed += 1;
                    out.worst.bound(&r);
                    if cfg.collect_records {
                        out.records.push((&r).into());
                    }
                }
                Err(Error::Counterexample(r)) => {
                    out.worst.bound(&r);
                    if cfg.collect_records {
                        out.records.push((&*r).into());
                    }
                    let detail = Error::Counterexample(r).to_string();
                    out.fail(p, a, b, check, detail);
                }
                Err(e) => out.fail(p, a, b, check, e.to_string()),
            }
            continue;
        }
        match v.identity(check, a as i64, b as i64, cfg.mode) {
            Ok(r) => {
                out.worst.residual(&r);
                if cfg.collect_records {
                    out.records.push((&r).into());
                }
                if r.passed() {
                    out.totals.passed += 1;
                } else {
                    let detail = match r.exact_pass {
                        Some(false) => "nonzero exact residual".to_string(),
                        _ => format!(
                            "float residual {:e} exceeds tolerance {:e}",
                            r.float_residual,
                            r.tolerance()
                        ),
                    };
                    out.fail(p, a, b, check, detail);
                }
            }
            Err(e) => out.fail(p, a, b, check, e.to_string()),
        }
    }
    out
}

fn scan_prime(p: u32, cfg: &ScanConfig, checks: &[CheckName]) -> Result<Partial> {
    let m = PrimeModulus::new(p as u64)?;
    let v = Verifier::new(&m);
    let pairs = cfg.policy.pairs(p);
    let outcomes: Vec<Partial> = pairs
        .par_iter()
        .map(|&(a, b)| run_pair(&v, a, b, cfg, checks))
        .collect();
    let mut part = Partial {
        totals: Totals {
            primes: 1,
            ..Totals::default()
        },
        ..Partial::default()
    };
    for o in outcomes {
        part.absorb(o);
    }
    if !cfg.keep_going {
        part.counterexamples.truncate(1);
    }
    Ok(part)
}

/// Runs `cfg.checks` over every odd prime in the configured range.
pub fn scan_primes(cfg: &ScanConfig) -> Result<ScanReport> {
    if cfg.range.lo > cfg.range.hi {
        return Err(Error::EmptyRange {
            lo: cfg.range.lo,
            hi: cfg.range.hi,
        });
    }
    let primes = primes_in(cfg.range)?;
    let mut checks = cfg.checks.clone();
    checks.sort();
    checks.dedup();

    // smallest prime with a failure so far; larger primes are skipped
    let first_failure = AtomicU64::new(u64::MAX);
    let partials = in_pool(cfg.jobs, || {
        primes
            .par_iter()
            .map(|&p| {
                if !cfg.keep_going && p as u64 > first_failure.load(Ordering::Relaxed) {
                    return Ok(None);
                }
                let part = scan_prime(p, cfg, &checks)?;
                if !part.counterexamples.is_empty() {
                    first_failure.fetch_min(p as u64, Ordering::Relaxed);
                }
                Ok(Some(part))
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut total = Partial::default();
    for part in partials.into_iter().map_while(|p| p) {
        let failed = !part.counterexamples.is_empty();
        total.absorb(part);
        if failed && !cfg.keep_going {
            break;
        }
    }

    let sentinel = match cfg.sentinel {
        Some(threshold) if checks.contains(&CheckName::Bounds) => {
            let observed = total.worst.weil.map(|w| w.value);
            Some(Sentinel {
                threshold,
                observed,
                met: observed.is_some_and(|w| w >= threshold),
            })
        }
        _ => None,
    };

    Ok(ScanReport {
        prime_range: cfg.range,
        parameter_policy: cfg.policy.clone(),
        mode: cfg.mode,
        checks,
        totals: total.totals,
        worst: total.worst,
        sentinel,
        counterexamples: total.counterexamples,
        records: total.records,
    })
}

#[derive(Clone, Debug)]
pub struct KrConfig {
    pub r: u32,
    pub range: PrimeRange,
    pub policy: ParameterPolicy,
    pub jobs: Option<usize>,
}

impl KrConfig {
    pub fn new(r: u32, lo: u64, hi: u64) -> Self {
        Self {
            r,
            range: PrimeRange { lo, hi },
            policy: ParameterPolicy::FixedAAllB,
            jobs: None,
        }
    }
}

/// Largest |K_r| observed for one prime.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KrPrimeRow {
    pub p: u32,
    pub pairs: usize,
    pub a: u32,
    pub b: u32,
    #[serde(serialize_with = "ser_f64")]
    pub max_abs: f64,
    /// max |K_r| / p^{3/4}
    #[serde(serialize_with = "ser_f64")]
    pub max_ratio: f64,
    /// 2·p^{−1/4}, the ceiling the r = 1 ratio inherits from |K| ≤ 2√p.
    #[serde(serialize_with = "ser_opt_f64")]
    pub envelope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KrReport {
    pub r: u32,
    pub prime_range: PrimeRange,
    pub parameter_policy: ParameterPolicy,
    pub totals: Totals,
    /// Largest |K_r| / p^{3/4} over the whole scan.
    pub worst: Option<Extremum>,
    pub per_prime: Vec<KrPrimeRow>,
    /// Violations of the trivial bound |K_r| ≤ p − 1.
    pub counterexamples: Vec<Counterexample>,
}

impl KrReport {
    pub fn success(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Reports max |K_r| / p^{3/4} per prime. There is no pass/fail threshold on
/// the ratio; only the trivial bound |K_r| ≤ p − 1 is enforced.
pub fn kr_scan(cfg: &KrConfig) -> Result<KrReport> {
    if cfg.r == 0 {
        return Err(Error::ZeroExponent);
    }
    if cfg.range.lo > cfg.range.hi {
        return Err(Error::EmptyRange {
            lo: cfg.range.lo,
            hi: cfg.range.hi,
        });
    }
    let primes = primes_in(cfg.range)?;
    let rows = in_pool(cfg.jobs, || {
        primes
            .par_iter()
            .map(|&p| kr_prime(cfg, p))
            .collect::<Result<Vec<_>>>()
    })??;

    let mut totals = Totals::default();
    let mut worst = None;
    let mut per_prime = Vec::new();
    let mut counterexamples = Vec::new();
    for (row, run, failures) in rows {
        totals.primes += 1;
        totals.run += run;
        totals.passed += run - failures.len();
        counterexamples.extend(failures);
        if let Some(row) = row {
            Extremum::merge(
                &mut worst,
                Some(Extremum {
                    value: row.max_ratio,
                    p: row.p,
                    a: row.a,
                    b: row.b,
                }),
            );
            per_prime.push(row);
        }
    }
    Ok(KrReport {
        r: cfg.r,
        prime_range: cfg.range,
        parameter_policy: cfg.policy.clone(),
        totals,
        worst,
        per_prime,
        counterexamples,
    })
}

fn kr_prime(cfg: &KrConfig, p: u32) -> Result<(Option<KrPrimeRow>, usize, Vec<Counterexample>)> {
    let m = PrimeModulus::new(p as u64)?;
    let pairs = cfg.policy.pairs(p);
    let values = pairs
        .par_iter()
        .map(|&(a, b)| kloosterman_r_exact(&m, cfg.r, a as i64, b as i64).map(|k| (a, b, k.abs())))
        .collect::<Result<Vec<_>>>()?;

    let pf = p as f64;
    let trivial = (pf - 1.0) + 1e-9 * pf;
    let mut failures = Vec::new();
    let mut best: Option<(u32, u32, f64)> = None;
    for &(a, b, abs) in &values {
        if abs > trivial {
            failures.push(Counterexample {
                p,
                a,
                b,
                check: CheckName::Bounds,
                detail: format!("|K_{}| = {abs} exceeds the trivial bound p - 1", cfg.r),
            });
        }
        if best.is_none_or(|(_, _, m)| abs > m) {
            best = Some((a, b, abs));
        }
    }
    let row = best.map(|(a, b, max_abs)| KrPrimeRow {
        p,
        pairs: values.len(),
        a,
        b,
        max_abs,
        max_ratio: max_abs / pf.powf(0.75),
        envelope: (cfg.r == 1).then(|| 2.0 * pf.powf(-0.25)),
    });
    Ok((row, values.len(), failures))
}
