//! Verification of the Kloosterman-sum identities and bounds.
//!
//! Every identity check runs twice: exactly in ℤ[ζ_p], where a pass means a
//! zero residual, and in floating point, where the residual is compared with
//! `FLOAT_TOLERANCE_PER_P · p`. Bound checks are float-only.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CyclotomicInt;
use crate::error::{Error, Result};
use crate::klsum::{
    kloosterman_exact, kloosterman_exact_degenerate, lambda_brute, KloostermanValue, LambdaTable,
    SumEvaluator,
};
use crate::modfield::PrimeModulus;
use crate::report::ser_f64;

mod scan;

pub use scan::{
    kr_scan, scan_primes, CheckRecord, Counterexample, Extremum, KrConfig, KrPrimeRow, KrReport,
    ParameterPolicy, PrimeRange, ScanConfig, ScanReport, Sentinel, Totals, WorstRatios,
};

/// Float residuals must stay below this multiple of p.
pub const FLOAT_TOLERANCE_PER_P: f64 = 1e-6;

/// Relative slack allowed on each magnitude bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// Default floor for the largest observed |K| / 2√p in a bounds scan.
pub const DEFAULT_SENTINEL: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    /// K(a,b)² = p + Σ_{l=1}^{p} ((l²−4l)/p)·K(a,lb)
    SqIdentity,
    /// K(a,b)² = p − 1 + Y(a,b), with Y in three equivalent forms
    YDecomposition,
    /// Σ_{l=1}^{p−1} K(a,lb) = 1
    SumOverL,
    /// Σ_{l=1}^{p} K(a,lb)² = p(p−1)
    SecondMoment,
    /// |K| against 2√p, 3^{1/4}p^{3/4} and √(p + p^{3/2})
    Bounds,
}

impl CheckName {
    pub const ALL: [CheckName; 5] = [
        CheckName::SqIdentity,
        CheckName::YDecomposition,
        CheckName::SumOverL,
        CheckName::SecondMoment,
        CheckName::Bounds,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::SqIdentity => "sq_identity",
            CheckName::YDecomposition => "y_decomposition",
            CheckName::SumOverL => "sum_over_l",
            CheckName::SecondMoment => "second_moment",
            CheckName::Bounds => "bounds",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub p: u32,
    pub a: u32,
    pub b: u32,
    pub check: CheckName,
    /// `None` for float-only runs.
    pub exact_pass: Option<bool>,
    #[serde(serialize_with = "ser_f64")]
    pub float_residual: f64,
    /// Wall time; excluded from serialized reports so they stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl IdentityReport {
    pub fn tolerance(&self) -> f64 {
        FLOAT_TOLERANCE_PER_P * self.p as f64
    }

    pub fn passed(&self) -> bool {
        self.exact_pass.unwrap_or(true) && self.float_residual < self.tolerance()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub p: u32,
    pub a: u32,
    pub b: u32,
    #[serde(serialize_with = "ser_f64")]
    pub abs_value: f64,
    /// |K| / 2√p
    #[serde(serialize_with = "ser_f64")]
    pub weil_ratio: f64,
    /// |K| / (3^{1/4} p^{3/4})
    #[serde(serialize_with = "ser_f64")]
    pub kloosterman_ratio: f64,
    /// |K| / √(p + p^{3/2})
    #[serde(serialize_with = "ser_f64")]
    pub corollary_ratio: f64,
}

impl BoundReport {
    fn new(p: u32, a: u32, b: u32, value: f64) -> Self {
        let pf = p as f64;
        let abs_value = value.abs();
        Self {
            p,
            a,
            b,
            abs_value,
            weil_ratio: abs_value / (2.0 * pf.sqrt()),
            kloosterman_ratio: abs_value / (3f64.powf(0.25) * pf.powf(0.75)),
            corollary_ratio: abs_value / (pf + pf.powf(1.5)).sqrt(),
        }
    }

    pub fn within_bounds(&self) -> bool {
        let limit = 1.0 + BOUND_SLACK;
        self.weil_ratio <= limit && self.kloosterman_ratio <= limit && self.corollary_ratio <= limit
    }
}

/// Per-modulus verification context: shares the cosine table and the λ table
/// across every (a, b) checked for one prime.
pub struct Verifier {
    modulus: PrimeModulus,
    eval: SumEvaluator,
    lambda: LambdaTable,
}

impl Verifier {
    pub fn new(modulus: &PrimeModulus) -> Self {
        Self {
            eval: SumEvaluator::new(modulus),
            lambda: lambda_brute(modulus),
            modulus: modulus.clone(),
        }
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.modulus
    }

    fn params(&self, a: i64, b: i64) -> Result<(u32, u32)> {
        let m = &self.modulus;
        let (ra, rb) = (m.reduce(a), m.reduce(b));
        if ra == 0 || rb == 0 {
            return Err(Error::HypothesisViolated { p: m.p(), a, b });
        }
        Ok((ra, rb))
    }

    fn p_i64(&self) -> i64 {
        self.modulus.p() as i64
    }

    /// K(a, l·b) with l·b reduced mod p; l = p gives the degenerate −1.
    fn k_exact(&self, a: u32, l: u32, b: u32) -> Result<KloostermanValue> {
        kloosterman_exact_degenerate(
            &self.modulus,
            a as i64,
            self.modulus.mul(l % self.modulus.p(), b) as i64,
        )
    }

    fn k_float(&self, a: u32, l: u32, b: u32) -> f64 {
        self.eval
            .eval_reduced(a, self.modulus.mul(l % self.modulus.p(), b))
    }

    fn legendre_disc(&self, l: u32) -> i8 {
        let l = l as i64;
        self.modulus.legendre(l * l - 4 * l)
    }

    fn report(
        &self,
        a: u32,
        b: u32,
        check: CheckName,
        exact: Option<bool>,
        residual: f64,
        start: Instant,
    ) -> IdentityReport {
        IdentityReport {
            p: self.modulus.p(),
            a,
            b,
            check,
            exact_pass: exact,
            float_residual: residual,
            elapsed: start.elapsed(),
        }
    }

    pub fn identity_sq(&self, a: i64, b: i64, mode: Mode) -> Result<IdentityReport> {
        let start = Instant::now();
        let (a, b) = self.params(a, b)?;
        let p = self.modulus.p();

        let exact = match mode {
            Mode::Float => None,
            Mode::Exact => {
                let lhs = kloosterman_exact(&self.modulus, a as i64, b as i64)?
                    .exact
                    .square()?;
                let mut rhs = CyclotomicInt::from_int(self.p_i64(), &self.modulus);
                // l = p is evaluated too; its Legendre factor is 0
                for l in 1..=p {
                    let term = self.k_exact(a, l, b)?.exact.scale(self.legendre_disc(l) as i64)?;
                    rhs = rhs.add(&term)?;
                }
                Some(lhs.sub(&rhs)?.is_zero())
            }
        };

        let k = self.eval.eval_reduced(a, b);
        let rhs: f64 = p as f64
            + (1..=p)
                .map(|l| self.legendre_disc(l) as f64 * self.k_float(a, l, b))
                .sum::<f64>();
        Ok(self.report(a, b, CheckName::SqIdentity, exact, (k * k - rhs).abs(), start))
    }

    pub fn y_decomposition(&self, a: i64, b: i64, mode: Mode) -> Result<IdentityReport> {
        let start = Instant::now();
        let (a, b) = self.params(a, b)?;

        let exact = match mode {
            Mode::Float => None,
            Mode::Exact => {
                let k_sq = kloosterman_exact(&self.modulus, a as i64, b as i64)?
                    .exact
                    .square()?;
                let y = self.y_double_sum(a, b)?;
                let residual = k_sq
                    .sub(&CyclotomicInt::from_int(self.p_i64() - 1, &self.modulus))?
                    .sub(&y)?;
                Some(residual.is_zero() && y == self.y_over_z(a, b)? && y == self.y_from_lambda(a, b)?)
            }
        };

        let k = self.eval.eval_reduced(a, b);
        let y: f64 = self
            .lambda
            .iter()
            .map(|(l, count)| count as f64 * self.k_float(a, l, b))
            .sum();
        let residual = (k * k - (self.p_i64() - 1) as f64 - y).abs();
        Ok(self.report(a, b, CheckName::YDecomposition, exact, residual, start))
    }

    /// Y(a,b) = Σ_{h=1}^{p−1} e_p(ah) Σ_{1≤y≤p−1, p∤y+h} e_p(b((y+h)⁻¹ − y⁻¹)),
    /// evaluated term by term.
    pub fn y_double_sum(&self, a: u32, b: u32) -> Result<CyclotomicInt> {
        let m = &self.modulus;
        let p = m.p();
        let mut counts = vec![0i64; p as usize];
        for h in 1..p {
            let ah = m.mul(a, h);
            for y in 1..p {
                let yh = m.add(y, h);
                if yh == 0 {
                    continue;
                }
                let diff = m.sub(m.inverse_unchecked(yh), m.inverse_unchecked(y));
                counts[m.add(ah, m.mul(b, diff)) as usize] += 1;
            }
        }
        CyclotomicInt::from_coeffs(m, counts)
    }

    /// Y(a,b) = Σ_{z=1}^{p−2} K(a, b((z+1)⁻¹ − z⁻¹)).
    pub fn y_over_z(&self, a: u32, b: u32) -> Result<CyclotomicInt> {
        let m = &self.modulus;
        let mut acc = CyclotomicInt::zero(m);
        for z in 1..m.p() - 1 {
            let l = m.sub(m.inverse_unchecked(z + 1), m.inverse_unchecked(z));
            acc = acc.add(&self.k_exact(a, l, b)?.exact)?;
        }
        Ok(acc)
    }

    /// Y(a,b) = Σ_{l=1}^{p−1} λ_l·K(a, lb).
    pub fn y_from_lambda(&self, a: u32, b: u32) -> Result<CyclotomicInt> {
        let mut acc = CyclotomicInt::zero(&self.modulus);
        for (l, count) in self.lambda.iter() {
            acc = acc.add(&self.k_exact(a, l, b)?.exact.scale(count as i64)?)?;
        }
        Ok(acc)
    }

    pub fn sum_over_l(&self, a: i64, b: i64, mode: Mode) -> Result<IdentityReport> {
        let start = Instant::now();
        let (a, b) = self.params(a, b)?;
        let p = self.modulus.p();

        let exact = match mode {
            Mode::Float => None,
            Mode::Exact => {
                let mut acc = CyclotomicInt::from_int(-1, &self.modulus);
                for l in 1..p {
                    acc = acc.add(&self.k_exact(a, l, b)?.exact)?;
                }
                Some(acc.is_zero())
            }
        };

        let sum: f64 = (1..p).map(|l| self.k_float(a, l, b)).sum();
        Ok(self.report(a, b, CheckName::SumOverL, exact, (sum - 1.0).abs(), start))
    }

    pub fn second_moment(&self, a: i64, b: i64, mode: Mode) -> Result<IdentityReport> {
        let start = Instant::now();
        let (a, b) = self.params(a, b)?;
        let p = self.modulus.p();
        let target = self.p_i64() * (self.p_i64() - 1);

        let exact = match mode {
            Mode::Float => None,
            Mode::Exact => {
                // l = p contributes K(a, 0)² = 1
                let mut acc = CyclotomicInt::from_int(-target, &self.modulus);
                for l in 1..=p {
                    acc = acc.add(&self.k_exact(a, l, b)?.exact.square()?)?;
                }
                Some(acc.is_zero())
            }
        };

        let sum: f64 = (1..=p)
            .map(|l| {
                let k = self.k_float(a, l, b);
                k * k
            })
            .sum();
        Ok(self.report(
            a,
            b,
            CheckName::SecondMoment,
            exact,
            (sum - target as f64).abs(),
            start,
        ))
    }

    pub fn bounds(&self, a: i64, b: i64) -> Result<BoundReport> {
        let (a, b) = self.params(a, b)?;
        let report = BoundReport::new(self.modulus.p(), a, b, self.eval.eval_reduced(a, b));
        if !report.within_bounds() {
            return Err(Error::Counterexample(Box::new(report)));
        }
        Ok(report)
    }

    /// Runs one identity check; `Bounds` is not an identity and is rejected.
    pub fn identity(&self, check: CheckName, a: i64, b: i64, mode: Mode) -> Result<IdentityReport> {
        match check {
            CheckName::SqIdentity => self.identity_sq(a, b, mode),
            CheckName::YDecomposition => self.y_decomposition(a, b, mode),
            CheckName::SumOverL => self.sum_over_l(a, b, mode),
            CheckName::SecondMoment => self.second_moment(a, b, mode),
            CheckName::Bounds => unreachable!("bounds is not an identity check"),
        }
    }
}

pub fn verify_identity_sq(m: &PrimeModulus, a: i64, b: i64, mode: Mode) -> Result<IdentityReport> {
    Verifier::new(m).identity_sq(a, b, mode)
}

pub fn verify_y_decomposition(m: &PrimeModulus, a: i64, b: i64) -> Result<IdentityReport> {
    Verifier::new(m).y_decomposition(a, b, Mode::Exact)
}

pub fn verify_sum_over_l(m: &PrimeModulus, a: i64, b: i64) -> Result<IdentityReport> {
    Verifier::new(m).sum_over_l(a, b, Mode::Exact)
}

pub fn verify_second_moment(m: &PrimeModulus, a: i64, b: i64) -> Result<IdentityReport> {
    Verifier::new(m).second_moment(a, b, Mode::Exact)
}

pub fn check_bounds(m: &PrimeModulus, a: i64, b: i64) -> Result<BoundReport> {
    Verifier::new(m).bounds(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modfield::odd_primes;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn sq_identity_examples() {
        assert_eq!(
            verify_identity_sq(&m(5), 1, 1, Mode::Exact).unwrap().exact_pass,
            Some(true)
        );
        assert_eq!(
            verify_identity_sq(&m(7), 2, 3, Mode::Exact).unwrap().exact_pass,
            Some(true)
        );

        // p = 3: (l² − 4l) is −3 ≡ 0 at l = 1, −4 ≡ 2 at l = 2, and −3 ≡ 0 at l = 3,
        // so RHS = 3 + (2/3)·K(1,2) = 3 − 2 = 1 = K(1,1)².
        let m3 = m(3);
        let squares: Vec<i64> = (1..3).map(|x| x * x % 3).collect();
        assert!(!squares.contains(&2));
        assert_eq!(m3.legendre(-3), 0);
        assert_eq!(m3.legendre(-4), -1);
        let r = verify_identity_sq(&m3, 1, 1, Mode::Float).unwrap();
        assert_eq!(r.exact_pass, None);
        assert!(r.float_residual < 1e-6 * 3.0);
        assert!(r.passed());
    }

    #[test]
    fn y_decomposition_examples() {
        assert_eq!(
            verify_y_decomposition(&m(5), 1, 1).unwrap().exact_pass,
            Some(true)
        );
        assert_eq!(
            verify_y_decomposition(&m(3), 1, 2).unwrap().exact_pass,
            Some(true)
        );
    }

    #[test]
    fn y_representations_agree() {
        for p in odd_primes(3, 101) {
            let v = Verifier::new(&m(p));
            for b in 1..p as u32 {
                let y = v.y_double_sum(1, b).unwrap();
                assert_eq!(y, v.y_from_lambda(1, b).unwrap(), "p={p} b={b}");
                assert_eq!(y, v.y_over_z(1, b).unwrap(), "p={p} b={b}");
            }
        }
    }

    #[test]
    fn sum_over_l_examples() {
        assert_eq!(verify_sum_over_l(&m(5), 1, 1).unwrap().exact_pass, Some(true));
        assert_eq!(verify_sum_over_l(&m(3), 2, 2).unwrap().exact_pass, Some(true));
    }

    #[test]
    fn sum_over_l_float_for_small_primes() {
        for p in odd_primes(3, 499) {
            let r = Verifier::new(&m(p)).sum_over_l(1, 1, Mode::Float).unwrap();
            assert!(r.float_residual < 1e-6 * p as f64, "p={p}");
        }
    }

    #[test]
    fn second_moment_examples() {
        assert_eq!(verify_second_moment(&m(5), 1, 1).unwrap().exact_pass, Some(true));
        assert_eq!(verify_second_moment(&m(7), 3, 5).unwrap().exact_pass, Some(true));

        // K(3;1,1) = −1, K(3;1,2) = 2, K(3;1,0) = −1
        let m3 = m(3);
        let ks: Vec<i64> = [1, 2, 0]
            .iter()
            .map(|&b| kloosterman_exact_degenerate(&m3, 1, b).unwrap().exact.coeffs()[0])
            .collect();
        assert_eq!(ks, vec![-1, 2, -1]);
        assert_eq!(ks.iter().map(|k| k * k).sum::<i64>(), 6);
        assert_eq!(verify_second_moment(&m3, 1, 1).unwrap().exact_pass, Some(true));
    }

    #[test]
    fn bounds_examples() {
        let r = check_bounds(&m(5), 1, 1).unwrap();
        assert!((r.abs_value - 0.381_966_011_250_105).abs() < 1e-12);
        assert!((r.weil_ratio - 0.381_966_011_250_105 / (2.0 * 5f64.sqrt())).abs() < 1e-12);
        assert!((r.weil_ratio - 0.0854).abs() < 1e-4);

        let r3 = check_bounds(&m(3), 1, 2).unwrap();
        assert!((r3.abs_value - 2.0).abs() < 1e-12);
        assert!((r3.weil_ratio - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bound_violation_is_a_counterexample() {
        let bad = BoundReport::new(5, 1, 1, 100.0);
        assert!(!bad.within_bounds());
        // at p = 5 the weil bound 2√5 is still looser than 3^{1/4}·5^{3/4}
        let at_weil = BoundReport::new(5, 1, 1, -2.0 * 5f64.sqrt());
        assert!((at_weil.weil_ratio - 1.0).abs() < 1e-15);
        assert!(at_weil.kloosterman_ratio > 1.0);
        assert!(!at_weil.within_bounds());
        assert!(BoundReport::new(5, 1, 1, -1.0).within_bounds());
    }

    #[test]
    fn hypotheses_violated() {
        let m7 = m(7);
        for (a, b) in [(0, 1), (1, 0), (7, 14)] {
            assert!(matches!(
                verify_identity_sq(&m7, a, b, Mode::Exact),
                Err(Error::HypothesisViolated { .. })
            ));
            assert!(matches!(
                verify_y_decomposition(&m7, a, b),
                Err(Error::HypothesisViolated { .. })
            ));
            assert!(matches!(
                verify_sum_over_l(&m7, a, b),
                Err(Error::HypothesisViolated { .. })
            ));
            assert!(matches!(
                verify_second_moment(&m7, a, b),
                Err(Error::HypothesisViolated { .. })
            ));
            assert!(matches!(
                check_bounds(&m7, a, b),
                Err(Error::HypothesisViolated { .. })
            ));
        }
    }

    #[test]
    fn exact_pass_implies_float_agreement() {
        for p in odd_primes(3, 31) {
            let v = Verifier::new(&m(p));
            for b in 1..p as i64 {
                for check in &CheckName::ALL[..4] {
                    let r = v.identity(*check, 1, b, Mode::Exact).unwrap();
                    assert_eq!(r.exact_pass, Some(true), "{check:?} p={p} b={b}");
                    assert!(r.float_residual < r.tolerance());
                }
            }
        }
    }

    #[test]
    fn general_a_values() {
        for p in [5u64, 7, 11, 13] {
            let v = Verifier::new(&m(p));
            for a in 1..p as i64 {
                for b in 1..p as i64 {
                    for check in &CheckName::ALL[..4] {
                        assert!(v.identity(*check, a, b, Mode::Exact).unwrap().passed());
                    }
                }
            }
        }
    }
}
