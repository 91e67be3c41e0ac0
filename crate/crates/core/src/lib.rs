//! Kloosterman sums K(p; a, b) = Σ_{x=1}^{p−1} e_p(ax + b·x̄) over prime
//! fields, computed both exactly in the cyclotomic integers ℤ[ζ_p] and in
//! double precision, together with machinery that checks their classical
//! identities and bounds.
//!
//! The modules build on each other:
//!
//! - [`modfield`]: residues mod an odd prime, inverses, Legendre symbols.
//! - [`cyclotomic`]: exact ring arithmetic in ℤ[ζ_p].
//! - [`klsum`]: the sums themselves, K_r, batch evaluation and λ_l counts.
//! - [`identities`]: exact/float verification of
//!   K(a,b)² = p + Σ_{l=1}^{p} ((l²−4l)/p)·K(a,lb) and the steps behind it,
//!   the magnitude bounds, and parallel prime-range scans.
//! - [`report`]: reproducible JSON/CSV/table output.
//! - [`cli`]: the `kloosterman` command line.
//!
//! ```
//! use kloosterman::{kloosterman_exact, verify_identity_sq, Mode, PrimeModulus};
//!
//! let m = PrimeModulus::new(5)?;
//! let k = kloosterman_exact(&m, 1, 1)?;
//! assert_eq!(k.exact.coeffs(), &[2, 0, 1, 1, 0]);
//! assert!((k.approx() - 0.381966011250105).abs() < 1e-12);
//!
//! let report = verify_identity_sq(&m, 1, 1, Mode::Exact)?;
//! assert_eq!(report.exact_pass, Some(true));
//! # Ok::<(), kloosterman::Error>(())
//! ```

pub mod cli;
pub mod cyclotomic;
mod error;
pub mod identities;
pub mod klsum;
pub mod modfield;
pub mod report;

pub use cyclotomic::{CyclotomicInt, UnitRoots};
pub use error::{Error, Result};
pub use identities::{
    check_bounds, kr_scan, scan_primes, verify_identity_sq, verify_second_moment, verify_sum_over_l,
    verify_y_decomposition, BoundReport, CheckName, IdentityReport, KrConfig, KrReport, Mode,
    ParameterPolicy, ScanConfig, ScanReport, Verifier,
};
pub use klsum::{
    batch_kloosterman, batch_kloosterman_fft, kloosterman_exact, kloosterman_exact_degenerate,
    kloosterman_float, kloosterman_float_degenerate, kloosterman_r_exact, lambda_brute, lambda_formula,
    KloostermanValue, LambdaTable, SumEvaluator,
};
pub use modfield::PrimeModulus;
