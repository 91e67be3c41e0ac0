//! Arithmetic in ℤ/pℤ for odd primes p.
//!
//! Residues are `u32` and products are formed in `u64`, which is why the
//! modulus is capped at 2^31 − 1.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest accepted modulus.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

/// A validated odd prime together with its table of inverses.
///
/// Cloning is cheap: the inverse table is shared.
#[derive(Clone)]
pub struct PrimeModulus {
    p: u32,
    inv: Option<Arc<[u32]>>,
}

impl PrimeModulus {
    /// Validates `n` and builds the inverse table in O(n).
    pub fn new(n: u64) -> Result<Self> {
        let p = validate(n)?;
        Ok(Self {
            p,
            inv: Some(inverse_table(p).into()),
        })
    }

    /// Validates `n` without building the inverse table; inverses then fall
    /// back to the extended Euclidean algorithm.
    pub fn without_table(n: u64) -> Result<Self> {
        Ok(Self {
            p: validate(n)?,
            inv: None,
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// The inverse table, indexed by residue; entry 0 is unused and holds 0.
    pub fn inverse_table(&self) -> Option<&[u32]> {
        self.inv.as_deref()
    }

    /// Reduces an arbitrary integer into `0..p`.
    #[inline]
    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        ((x as u64 + y as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, x: u32, y: u32) -> u32 {
        ((x as u64 + self.p as u64 - y as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        ((x as u64 * y as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse of `x` modulo p. `x` is reduced first.
    pub fn inverse(&self, x: u32) -> Result<u32> {
        let x = x % self.p;
        if x == 0 {
            return Err(Error::ZeroInverse(self.p));
        }
        Ok(match &self.inv {
            Some(table) => table[x as usize],
            None => ext_euclid_inverse(x, self.p),
        })
    }

    /// Inverse lookup for a residue already known to lie in `1..p`.
    #[inline]
    pub(crate) fn inverse_unchecked(&self, x: u32) -> u32 {
        debug_assert!(x != 0 && x < self.p);
        match &self.inv {
            Some(table) => table[x as usize],
            None => ext_euclid_inverse(x, self.p),
        }
    }

    /// `base^exp mod p` by square-and-multiply.
    pub fn pow(&self, base: u32, exp: u64) -> u32 {
        pow_mod(base as u64 % self.p as u64, exp, self.p as u64) as u32
    }

    /// Legendre symbol (a/p) via Euler's criterion.
    pub fn legendre(&self, a: i64) -> i8 {
        let a = self.reduce(a);
        if a == 0 {
            return 0;
        }
        match self.pow(a, (self.p as u64 - 1) / 2) {
            1 => 1,
            r => {
                debug_assert_eq!(r, self.p - 1);
                -1
            }
        }
    }
}

impl PartialEq for PrimeModulus {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for PrimeModulus {}

impl std::fmt::Debug for PrimeModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeModulus")
            .field("p", &self.p)
            .field("has_table", &self.inv.is_some())
            .finish()
    }
}

fn validate(n: u64) -> Result<u32> {
    if n == 2 {
        return Err(Error::UnsupportedTwo);
    }
    if n > MAX_MODULUS {
        return Err(Error::ModulusTooLarge(n));
    }
    if n < 3 || n.is_multiple_of(2) || !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    Ok(n as u32)
}

/// inv[i] = −⌊p/i⌋ · inv[p mod i], the standard linear-time recurrence.
fn inverse_table(p: u32) -> Vec<u32> {
    let p64 = p as u64;
    let mut inv = vec![0u32; p as usize];
    inv[1] = 1;
    for i in 2..p as u64 {
        let q = p64 / i;
        let r = (p64 % i) as usize;
        inv[i as usize] = ((p64 - q) * inv[r] as u64 % p64) as u32;
    }
    inv
}

fn ext_euclid_inverse(x: u32, p: u32) -> u32 {
    let (mut old_r, mut r) = (x as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(p as i64) as u32
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin below 2^32 (witnesses {2, 3, 5, 7, 11} are exact
/// below 2 152 302 898 747); trial division above.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    if n > u32::MAX as u64 {
        // products below would overflow u64; never reached for valid moduli
        return (13..)
            .step_by(2)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d));
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Odd primes in `[lo, hi]`, ascending.
pub fn odd_primes(lo: u64, hi: u64) -> Vec<u64> {
    let lo = lo.max(3);
    if lo > hi {
        return Vec::new();
    }
    let start = lo | 1;
    (start..=hi).step_by(2).filter(|&n| is_prime(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn squares(p: u32) -> Vec<bool> {
        let mut sq = vec![false; p as usize];
        for x in 1..p as u64 {
            sq[(x * x % p as u64) as usize] = true;
        }
        sq
    }

    #[test]
    fn modulus_5_inverse_table() {
        let m = PrimeModulus::new(5).unwrap();
        let table = m.inverse_table().unwrap();
        assert_eq!(&table[1..], &[1, 3, 2, 4]);
        for x in 1..5u32 {
            assert_eq!(x * table[x as usize] % 5, 1);
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(matches!(PrimeModulus::new(4), Err(Error::NotPrime(4))));
        assert!(matches!(PrimeModulus::new(2), Err(Error::UnsupportedTwo)));
        assert!(matches!(PrimeModulus::new(0), Err(Error::NotPrime(0))));
        assert!(matches!(PrimeModulus::new(1), Err(Error::NotPrime(1))));
        assert!(matches!(PrimeModulus::new(9), Err(Error::NotPrime(9))));
        assert!(matches!(
            PrimeModulus::new(1 << 31),
            Err(Error::ModulusTooLarge(_))
        ));
        assert!(PrimeModulus::without_table(MAX_MODULUS).is_ok());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(PrimeModulus::new(5).unwrap().inverse(2).unwrap(), 3);
        let m7 = PrimeModulus::new(7).unwrap();
        assert_eq!(m7.inverse(1).unwrap(), 1);
        let brute = (1..7u32).find(|y| 3 * y % 7 == 1).unwrap();
        assert_eq!(m7.inverse(3).unwrap(), brute);
        assert_eq!(brute, 5);
        assert!(matches!(m7.inverse(0), Err(Error::ZeroInverse(7))));
        assert!(matches!(m7.inverse(14), Err(Error::ZeroInverse(7))));
    }

    #[test]
    fn table_free_inverse_matches_table() {
        for p in odd_primes(3, 400) {
            let with = PrimeModulus::new(p).unwrap();
            let without = PrimeModulus::without_table(p).unwrap();
            for x in 1..p as u32 {
                assert_eq!(with.inverse(x).unwrap(), without.inverse(x).unwrap());
            }
        }
        let big = PrimeModulus::without_table(MAX_MODULUS).unwrap();
        let x = 123_456_789;
        assert_eq!(big.mul(x, big.inverse(x).unwrap()), 1);
    }

    #[test]
    fn pow_examples() {
        let m7 = PrimeModulus::new(7).unwrap();
        let m5 = PrimeModulus::new(5).unwrap();
        assert_eq!(m7.pow(2, 0), 1);
        assert_eq!(m5.pow(3, 3), 2);
        assert_eq!(m5.pow(2, 2), 4);
        assert!(!squares(5)[2]);
    }

    #[test]
    fn legendre_examples() {
        let m7 = PrimeModulus::new(7).unwrap();
        let m5 = PrimeModulus::new(5).unwrap();
        assert_eq!(m7.legendre(1), 1);
        assert_eq!(m7.legendre(0), 0);
        assert_eq!(m7.legendre(-7), 0);
        assert_eq!(m5.legendre(2), -1);
        assert_eq!(m5.legendre(-1), 1);
    }

    #[test]
    fn legendre_matches_enumeration() {
        for p in odd_primes(3, 101) {
            let m = PrimeModulus::new(p).unwrap();
            let sq = squares(p as u32);
            let (mut plus, mut minus) = (0, 0);
            for a in 0..p as i64 {
                let expected = if a == 0 {
                    0
                } else if sq[a as usize] {
                    1
                } else {
                    -1
                };
                assert_eq!(m.legendre(a), expected, "p={p} a={a}");
                match expected {
                    1 => plus += 1,
                    -1 => minus += 1,
                    _ => {}
                }
            }
            assert_eq!(plus, (p - 1) / 2);
            assert_eq!(minus, (p - 1) / 2);
        }
    }

    #[test]
    fn legendre_is_multiplicative() {
        for p in odd_primes(3, 101) {
            let m = PrimeModulus::new(p).unwrap();
            for a in 1..p as i64 {
                for b in 1..p as i64 {
                    assert_eq!(m.legendre(a * b), m.legendre(a) * m.legendre(b));
                }
            }
        }
    }

    #[test]
    fn inverse_is_involution() {
        for p in odd_primes(3, 101) {
            let m = PrimeModulus::new(p).unwrap();
            for x in 1..p as u32 {
                assert_eq!(m.inverse(m.inverse(x).unwrap()).unwrap(), x);
            }
        }
    }

    #[test]
    fn primality_against_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..20_000u64 {
            assert_eq!(is_prime(n), trial(n), "n={n}");
        }
        // strong pseudoprimes to several small bases
        for n in [2_047u64, 1_373_653, 25_326_001, 3_215_031_751] {
            assert_eq!(is_prime(n), trial(n), "n={n}");
        }
    }

    #[test]
    fn odd_primes_range() {
        assert_eq!(odd_primes(0, 20), vec![3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(odd_primes(3, 3), vec![3]);
        assert!(odd_primes(10, 9).is_empty());
        assert!(odd_primes(24, 28).is_empty());
    }

    proptest! {
        #[test]
        fn euler_criterion_on_large_primes(a in any::<i64>()) {
            let m = PrimeModulus::without_table(MAX_MODULUS).unwrap();
            let r = m.reduce(a);
            prop_assume!(r != 0);
            // 4 is a square, so scaling by it never changes the symbol
            prop_assert_eq!(m.legendre(4 * r as i64), m.legendre(a));
            prop_assert_eq!(m.legendre(m.mul(r, r) as i64), 1);
        }
    }
}
