//! Exact arithmetic in ℤ[ζ_p].
//!
//! Elements are length-p integer vectors over the basis 1, ζ, …, ζ^{p−1},
//! i.e. elements of ℤ[x]/(x^p − 1), taken modulo the single extra relation
//! 1 + ζ + … + ζ^{p−1} = 0. In ℤ[x]/(x^p − 1) the all-ones vector generates
//! exactly its own integer multiples, so subtracting `c[p−1]` from every
//! coefficient yields a unique representative with `c[p−1] = 0`. Equality of
//! canonical vectors is therefore equality in ℤ[ζ_p].
//!
//! Multiplication is cyclic convolution followed by that reduction.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::modfield::PrimeModulus;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    p: u32,
    coeffs: Vec<i64>,
}

impl CyclotomicInt {
    /// The rational integer `n` embedded as `n·1`.
    pub fn from_int(n: i64, m: &PrimeModulus) -> Self {
        let mut coeffs = vec![0; m.p() as usize];
        coeffs[0] = n;
        Self { p: m.p(), coeffs }
    }

    pub fn zero(m: &PrimeModulus) -> Self {
        Self::from_int(0, m)
    }

    pub fn one(m: &PrimeModulus) -> Self {
        Self::from_int(1, m)
    }

    /// ζ^k in canonical form; `k` is read modulo p.
    pub fn basis(k: u64, m: &PrimeModulus) -> Self {
        let p = m.p() as usize;
        let k = (k % p as u64) as usize;
        let mut coeffs = vec![0; p];
        if k == p - 1 {
            coeffs[..p - 1].fill(-1);
        } else {
            coeffs[k] = 1;
        }
        Self { p: m.p(), coeffs }
    }

    /// Builds an element from any length-p representative and canonicalizes it.
    pub fn from_coeffs(m: &PrimeModulus, coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() != m.p() as usize {
            return Err(Error::LengthMismatch {
                expected: m.p() as usize,
                got: coeffs.len(),
            });
        }
        Self::canonical(m.p(), coeffs)
    }

    pub(crate) fn canonical(p: u32, mut coeffs: Vec<i64>) -> Result<Self> {
        let last = coeffs[p as usize - 1];
        if last != 0 {
            for c in &mut coeffs {
                *c = c.checked_sub(last).ok_or(Error::Overflow(p))?;
            }
        }
        Ok(Self { p, coeffs })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Canonical coefficients; the last entry is always zero.
    #[inline]
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch {
                left: self.p,
                right: other.p,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i64, i64) -> Option<i64>) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&x, &y)| f(x, y).ok_or(Error::Overflow(self.p)))
            .collect::<Result<Vec<_>>>()?;
        // both inputs have a zero last coefficient, so the result does too
        Ok(Self { p: self.p, coeffs })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, i64::checked_add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, i64::checked_sub)
    }

    pub fn scale(&self, n: i64) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| c.checked_mul(n).ok_or(Error::Overflow(self.p)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { p: self.p, coeffs })
    }

    /// Schoolbook cyclic convolution, O(p²), with overflow detection.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let p = self.p as usize;
        let y = &other.coeffs;
        let mut acc = vec![0i64; p];
        let mut overflow = false;
        for (i, &xi) in self.coeffs.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            // exponents i + j wrap at p: acc[i..] takes y[..p−i], acc[..i] takes y[p−i..]
            let (wrapped, direct) = acc.split_at_mut(i);
            overflow |= mul_add_into(direct, xi, &y[..p - i]);
            overflow |= mul_add_into(wrapped, xi, &y[p - i..]);
        }
        if overflow {
            return Err(Error::Overflow(self.p));
        }
        Self::canonical(self.p, acc)
    }

    pub fn square(&self) -> Result<Self> {
        self.mul(self)
    }

    /// Complex conjugation, ζ^k ↦ ζ^{−k}.
    pub fn conjugate(&self) -> Self {
        let p = self.p as usize;
        let mut coeffs = vec![0; p];
        coeffs[0] = self.coeffs[0];
        for k in 1..p {
            coeffs[p - k] = self.coeffs[k];
        }
        // the input's zero at p−1 moved to index 1; renormalize
        Self::canonical(self.p, coeffs).expect("coefficient overflow during conjugation")
    }

    /// Whether the element is fixed by conjugation, i.e. real under every embedding.
    pub fn is_real(&self) -> bool {
        *self == self.conjugate()
    }

    /// Numerical value under ζ ↦ e^{2πi/p}.
    pub fn to_complex(&self) -> Complex64 {
        UnitRoots::new(self.p).embed(self)
    }

    /// Sum of absolute coefficient values; bounds |to_complex()|.
    pub fn l1_norm(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("integer vectors always serialize")
    }
}

impl fmt::Display for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclotomicInt(p={}, {})", self.p, self)
    }
}

impl Serialize for CyclotomicInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

/// `acc[j] += scalar * ys[j]`, returning whether any step overflowed.
#[inline]
fn mul_add_into(acc: &mut [i64], scalar: i64, ys: &[i64]) -> bool {
    let mut overflow = false;
    for (a, &y) in acc.iter_mut().zip(ys) {
        let (prod, o1) = scalar.overflowing_mul(y);
        let (sum, o2) = a.overflowing_add(prod);
        *a = sum;
        overflow |= o1 | o2;
    }
    overflow
}

/// Table of cos(2πk/p), sin(2πk/p) for k in 0..p.
///
/// Entries for k and p − k are computed from the same angle, so the table is
/// exactly conjugate-symmetric.
#[derive(Clone, Debug)]
pub struct UnitRoots {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl UnitRoots {
    pub fn new(p: u32) -> Self {
        let (cos, sin) = (0..p).map(|k| unit_root(k, p)).unzip();
        Self { cos, sin }
    }

    #[inline]
    pub fn cos(&self, k: u32) -> f64 {
        self.cos[k as usize]
    }

    #[inline]
    pub fn sin(&self, k: u32) -> f64 {
        self.sin[k as usize]
    }

    pub fn cos_table(&self) -> &[f64] {
        &self.cos
    }

    pub fn embed(&self, x: &CyclotomicInt) -> Complex64 {
        assert_eq!(
            x.p as usize,
            self.cos.len(),
            "unit-root table for a different modulus"
        );
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, &c) in x.coeffs.iter().enumerate() {
            if c != 0 {
                re += c as f64 * self.cos[k];
                im += c as f64 * self.sin[k];
            }
        }
        Complex64::new(re, im)
    }
}

/// (cos, sin) of 2πk/p, folding k > p/2 onto p − k.
pub fn unit_root(k: u32, p: u32) -> (f64, f64) {
    let k = k % p;
    let (j, sign) = if 2 * k as u64 > p as u64 {
        (p - k, -1.0)
    } else {
        (k, 1.0)
    };
    let theta = TAU * j as f64 / p as f64;
    (theta.cos(), sign * theta.sin())
}
