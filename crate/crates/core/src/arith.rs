//! Word-sized modular arithmetic and the prime field `F_p`.
//!
//! All moduli handled here are below `2^63`, so products are formed in `u128`
//! and reduced once. Arbitrary-precision `p`-adic integers live in
//! [`crate::padic`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Deterministic primality test by trial division; inputs here are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes in `lo..=hi`, by a plain sieve.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let n = hi as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        if i as u64 >= lo {
            out.push(i as u64);
        }
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` (any modulus), if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn reduce_i64(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

/// Exponent of `p` in `n` (for `n > 0`).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Common divisors of `a` and `b`.
pub fn gcd_divisors(a: u64, b: u64) -> Vec<u64> {
    divisors(gcd(a, b))
}

/// `sum_{0 < t | n} t^e` modulo `m`.
pub fn sigma_mod(n: u64, e: u64, m: u64) -> u64 {
    divisors(n)
        .into_iter()
        .fold(0, |acc, t| add_mod(acc, pow_mod(t, e, m), m))
}

/// A prime `p >= 5`, the standing hypothesis for every computation here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if !(5..(1 << 31)).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An element of the residue field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpElem {
    residue: u64,
    p: u64,
}

impl FpElem {
    pub fn new(value: i64, p: Prime) -> Self {
        FpElem {
            residue: reduce_i64(value, p.get()),
            p: p.get(),
        }
    }

    pub fn from_residue(residue: u64, p: Prime) -> Self {
        FpElem {
            residue: residue % p.get(),
            p: p.get(),
        }
    }

    #[inline]
    pub fn residue(self) -> u64 {
        self.residue
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.residue == 0
    }

    pub fn pow(self, e: u64) -> Self {
        FpElem {
            residue: pow_mod(self.residue, e, self.p),
            p: self.p,
        }
    }

    pub fn inv(self) -> Option<Self> {
        inv_mod(self.residue, self.p).map(|r| FpElem {
            residue: r,
            p: self.p,
        })
    }
}

impl Add for FpElem {
    type Output = FpElem;
    fn add(self, rhs: FpElem) -> FpElem {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FpElem {
            residue: add_mod(self.residue, rhs.residue, self.p),
            p: self.p,
        }
    }
}

impl Sub for FpElem {
    type Output = FpElem;
    fn sub(self, rhs: FpElem) -> FpElem {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FpElem {
            residue: sub_mod(self.residue, rhs.residue, self.p),
            p: self.p,
        }
    }
}

impl Mul for FpElem {
    type Output = FpElem;
    fn mul(self, rhs: FpElem) -> FpElem {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FpElem {
            residue: mul_mod(self.residue, rhs.residue, self.p),
            p: self.p,
        }
    }
}

impl Neg for FpElem {
    type Output = FpElem;
    fn neg(self) -> FpElem {
        FpElem {
            residue: sub_mod(0, self.residue, self.p),
            p: self.p,
        }
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.residue, self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes_rejected() {
        assert_eq!(Prime::new(2), Err(Error::InvalidPrime(2)));
        assert_eq!(Prime::new(3), Err(Error::InvalidPrime(3)));
        assert_eq!(Prime::new(9), Err(Error::InvalidPrime(9)));
        assert!(Prime::new(5).is_ok());
    }

    #[test]
    fn sieve_counts() {
        assert_eq!(primes_in_range(5, 4001).len(), 549);
        assert_eq!(primes_in_range(2, 100).len(), 25);
        assert!(primes_in_range(10, 5).is_empty());
    }

    #[test]
    fn inverse_composite_modulus() {
        assert_eq!(inv_mod(2, 25), Some(13));
        assert_eq!(inv_mod(5, 25), None);
        assert_eq!(inv_mod(0, 7), None);
    }

    #[test]
    fn field_ops() {
        let p = Prime::new(7).unwrap();
        let a = FpElem::new(-1, p);
        assert_eq!(a.residue(), 6);
        assert_eq!((a * a).residue(), 1);
        assert_eq!(FpElem::new(3, p).inv().unwrap().residue(), 5);
        assert!(FpElem::new(14, p).inv().is_none());
        assert_eq!((-FpElem::new(2, p) + FpElem::new(2, p)).residue(), 0);
    }

    #[test]
    fn divisor_sums() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(sigma_mod(2, 3, 1_000_000), 9);
        assert_eq!(sigma_mod(6, 1, 1000), 12);
    }
}
