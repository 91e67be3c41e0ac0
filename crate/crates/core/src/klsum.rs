//! Kloosterman sums K(p; a, b) = Σ_{x=1}^{p−1} e_p(ax + b·x̄), their
//! generalization K_r with x^r in place of x, and the solution counts λ_l.
//!
//! Exact values are exponent histograms canonicalized in ℤ[ζ_p]; float values
//! accumulate cosines directly.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::cyclotomic::{unit_root, CyclotomicInt, UnitRoots};
use crate::error::{Error, Result};
use crate::modfield::PrimeModulus;

/// A Kloosterman-type sum in both exact and numerical form.
#[derive(Clone, Debug)]
pub struct KloostermanValue {
    pub p: u32,
    /// Power applied to x in the first term; 1 for the classical sum.
    pub r: u32,
    pub a: u32,
    pub b: u32,
    pub exact: CyclotomicInt,
    /// Complex embedding of `exact`.
    pub embedding: Complex64,
}

impl KloostermanValue {
    /// Real part of the embedding. For r = 1 this is the whole value.
    pub fn approx(&self) -> f64 {
        self.embedding.re
    }

    pub fn abs(&self) -> f64 {
        self.embedding.norm()
    }
}

/// Reduced parameters, rejecting the cases the caller did not opt into.
fn reduce_params(m: &PrimeModulus, a: i64, b: i64, allow_degenerate: bool) -> Result<(u32, u32)> {
    let (ra, rb) = (m.reduce(a), m.reduce(b));
    match (ra == 0, rb == 0) {
        (true, true) if allow_degenerate => Err(Error::BothZero(m.p())),
        (false, false) => Ok((ra, rb)),
        _ if allow_degenerate => Ok((ra, rb)),
        _ => Err(Error::HypothesisViolated { p: m.p(), a, b }),
    }
}

#[inline]
fn exponent(m: &PrimeModulus, a: u32, b: u32, x: u32) -> u32 {
    let p = m.p() as u64;
    ((a as u64 * x as u64 + b as u64 * m.inverse_unchecked(x) as u64) % p) as u32
}

/// Counts of each exponent (a·x + b·x̄) mod p over x = 1..p−1, before any
/// canonical reduction. The entries always sum to p − 1.
pub fn exponent_histogram(m: &PrimeModulus, a: u32, b: u32) -> Vec<i64> {
    let mut counts = vec![0i64; m.p() as usize];
    for x in 1..m.p() {
        counts[exponent(m, a, b, x) as usize] += 1;
    }
    counts
}

fn from_histogram(m: &PrimeModulus, r: u32, a: u32, b: u32, counts: Vec<i64>) -> KloostermanValue {
    let exact = CyclotomicInt::canonical(m.p(), counts).expect("histogram counts are at most p");
    KloostermanValue {
        p: m.p(),
        r,
        a,
        b,
        embedding: exact.to_complex(),
        exact,
    }
}

/// K(p; a, b) exactly, for p ∤ ab.
pub fn kloosterman_exact(m: &PrimeModulus, a: i64, b: i64) -> Result<KloostermanValue> {
    let (a, b) = reduce_params(m, a, b, false)?;
    Ok(from_histogram(m, 1, a, b, exponent_histogram(m, a, b)))
}

/// K(p; a, b) exactly, additionally admitting exactly one of a, b ≡ 0, where
/// the sum collapses to Σ_x e_p(cx) = −1.
pub fn kloosterman_exact_degenerate(m: &PrimeModulus, a: i64, b: i64) -> Result<KloostermanValue> {
    let (a, b) = reduce_params(m, a, b, true)?;
    Ok(from_histogram(m, 1, a, b, exponent_histogram(m, a, b)))
}

/// K_r(p; a, b) = Σ_{x=1}^{p−1} e_p(a·x^r + b·x̄) exactly.
///
/// For r ≥ 2 the value need not be real.
pub fn kloosterman_r_exact(m: &PrimeModulus, r: u32, a: i64, b: i64) -> Result<KloostermanValue> {
    if r == 0 {
        return Err(Error::ZeroExponent);
    }
    let (a, b) = reduce_params(m, a, b, false)?;
    let p = m.p() as u64;
    let mut counts = vec![0i64; p as usize];
    for x in 1..m.p() {
        let xr = m.pow(x, r as u64) as u64;
        let e = (a as u64 * xr + b as u64 * m.inverse_unchecked(x) as u64) % p;
        counts[e as usize] += 1;
    }
    Ok(from_histogram(m, r, a, b, counts))
}

/// K(p; a, b) in double precision, for p ∤ ab.
///
/// The terms for x and p − x have opposite exponents, so the sum is twice the
/// cosine sum over x = 1..(p−1)/2.
pub fn kloosterman_float(m: &PrimeModulus, a: i64, b: i64) -> Result<f64> {
    let (a, b) = reduce_params(m, a, b, false)?;
    Ok(paired_cos_sum(m, a, b, |e| unit_root(e, m.p()).0))
}

/// Float evaluation also admitting exactly one zero parameter.
pub fn kloosterman_float_degenerate(m: &PrimeModulus, a: i64, b: i64) -> Result<f64> {
    let (a, b) = reduce_params(m, a, b, true)?;
    Ok(paired_cos_sum(m, a, b, |e| unit_root(e, m.p()).0))
}

#[inline]
fn paired_cos_sum(m: &PrimeModulus, a: u32, b: u32, cos: impl Fn(u32) -> f64) -> f64 {
    let half = (m.p() - 1) / 2;
    let mut acc = 0.0;
    for x in 1..=half {
        acc += cos(exponent(m, a, b, x));
    }
    2.0 * acc
}

/// Repeated float evaluation for one modulus with a shared cosine table.
///
/// Produces bit-identical results to [`kloosterman_float`].
#[derive(Clone, Debug)]
pub struct SumEvaluator {
    modulus: PrimeModulus,
    roots: UnitRoots,
}

impl SumEvaluator {
    pub fn new(modulus: &PrimeModulus) -> Self {
        Self {
            roots: UnitRoots::new(modulus.p()),
            modulus: modulus.clone(),
        }
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.modulus
    }

    pub fn roots(&self) -> &UnitRoots {
        &self.roots
    }

    pub fn eval(&self, a: i64, b: i64) -> Result<f64> {
        let (a, b) = reduce_params(&self.modulus, a, b, false)?;
        Ok(self.eval_reduced(a, b))
    }

    pub fn eval_degenerate(&self, a: i64, b: i64) -> Result<f64> {
        let (a, b) = reduce_params(&self.modulus, a, b, true)?;
        Ok(self.eval_reduced(a, b))
    }

    /// Caller guarantees residues in 0..p, not both zero.
    #[inline]
    pub(crate) fn eval_reduced(&self, a: u32, b: u32) -> f64 {
        let cos = self.roots.cos_table();
        paired_cos_sum(&self.modulus, a, b, |e| cos[e as usize])
    }
}

/// K(1, t) for t = 1..p−1 (entry t − 1), by one O(p) sum per entry.
///
/// K(a, b) for any p ∤ ab is the entry at t = ab mod p.
pub fn batch_kloosterman(m: &PrimeModulus) -> Vec<f64> {
    let eval = SumEvaluator::new(m);
    (1..m.p()).map(|t| eval.eval_reduced(1, t)).collect()
}

/// [`batch_kloosterman`] via one length-p transform: K(1, t) is the
/// transform at frequency t of y ↦ e_p(ȳ) (zero at y = 0).
pub fn batch_kloosterman_fft(m: &PrimeModulus) -> Vec<f64> {
    let p = m.p() as usize;
    let roots = UnitRoots::new(m.p());
    let mut buf: Vec<rustfft::num_complex::Complex<f64>> = (0..p)
        .map(|y| {
            if y == 0 {
                rustfft::num_complex::Complex::new(0.0, 0.0)
            } else {
                let k = m.inverse_unchecked(y as u32);
                rustfft::num_complex::Complex::new(roots.cos(k), roots.sin(k))
            }
        })
        .collect();
    // the unnormalized inverse transform carries the e^{+2πi ty/p} kernel
    FftPlanner::new().plan_fft_inverse(p).process(&mut buf);
    buf[1..].iter().map(|c| c.re).collect()
}

/// λ_l for l = 1..p−1: how many z in 1..p−2 satisfy (z+1)⁻¹ − z⁻¹ ≡ l.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaTable {
    p: u32,
    counts: Vec<u32>,
}

impl LambdaTable {
    pub fn p(&self) -> u32 {
        self.p
    }

    /// λ_l; `l` must lie in 1..p.
    pub fn get(&self, l: u32) -> u32 {
        assert!(l >= 1 && l < self.p, "l = {l} outside 1..{}", self.p);
        self.counts[l as usize]
    }

    /// (l, λ_l) for l = 1..p−1.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (1..self.p).map(|l| (l, self.counts[l as usize]))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }
}

/// λ_l by enumerating z = 1..p−2.
pub fn lambda_brute(m: &PrimeModulus) -> LambdaTable {
    let p = m.p();
    let mut counts = vec![0u32; p as usize];
    for z in 1..p - 1 {
        let l = m.sub(m.inverse_unchecked(z + 1), m.inverse_unchecked(z));
        counts[l as usize] += 1;
    }
    debug_assert_eq!(counts[0], 0);
    LambdaTable { p, counts }
}

/// λ_l = 1 + ((l² − 4l)/p).
pub fn lambda_formula(m: &PrimeModulus, l: u32) -> u32 {
    let l = l as i64;
    (1 + m.legendre(l * l - 4 * l)) as u32
}
