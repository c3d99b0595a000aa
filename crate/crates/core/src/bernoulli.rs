//! Bernoulli numbers: exact rationals and residues modulo `p`.
//!
//! Convention `B_1 = -1/2`. The exact table is grown on demand behind a
//! lock and shared between threads; residues modulo `p` are produced by the
//! recurrence `sum_{j<=m} C(m+1, j) B_j = 0` carried out in `F_p`, which is
//! legitimate for indices `m <= p - 3`.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{inv_mod, mul_mod, reduce_i64, FpElem, Prime};
use crate::{Error, Result};

fn table() -> &'static RwLock<Vec<BigRational>> {
    static TABLE: OnceLock<RwLock<Vec<BigRational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![BigRational::one()]))
}

/// Exact `B_k` as a reduced fraction.
pub fn bernoulli_rational(k: usize) -> BigRational {
    {
        let t = table().read().unwrap();
        if k < t.len() {
            return t[k].clone();
        }
    }
    let mut t = table().write().unwrap();
    while t.len() <= k {
        let m = t.len();
        if m > 1 && m % 2 == 1 {
            t.push(BigRational::zero());
            continue;
        }
        // B_m = -1/(m+1) sum_{j<m} C(m+1, j) B_j
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, b) in t.iter().enumerate() {
            if !b.is_zero() {
                acc += b * BigRational::from_integer(binom.clone());
            }
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        t.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    t[k].clone()
}

/// Binomial coefficient as a big integer.
pub fn binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// The Bernoulli polynomial `B_k(x)` at a rational point.
pub fn bernoulli_polynomial(k: usize, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut xp = BigRational::one();
    // sum_j C(k, j) B_j x^{k-j}, accumulated from j = k downwards
    for j in (0..=k).rev() {
        let b = bernoulli_rational(j);
        if !b.is_zero() {
            acc += b * BigRational::from_integer(binomial_big(k as u64, j as u64)) * &xp;
        }
        xp *= x;
    }
    acc
}

/// Reduce a rational modulo `m`, failing when the denominator is not a unit.
pub fn rational_mod(r: &BigRational, m: u64, what: &str) -> Result<u64> {
    let mb = BigInt::from(m);
    let num = r.numer().mod_floor(&mb).to_u64().unwrap();
    let den = r.denom().mod_floor(&mb).to_u64().unwrap();
    let inv = inv_mod(den, m).ok_or_else(|| Error::NonInvertible {
        what: what.to_string(),
        modulus: m,
    })?;
    Ok(mul_mod(num, inv, m))
}

/// Exponent of `p` in a nonzero rational (negative for denominators).
pub fn rational_valuation(r: &BigRational, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |mut n: BigInt| {
        n = n.abs();
        let mut v = 0i64;
        while (&n % &pb).is_zero() {
            n /= &pb;
            v += 1;
        }
        v
    };
    Some(count(r.numer().clone()) - count(r.denom().clone()))
}

/// `B_0, ..., B_{upto}` modulo `p`, with `upto <= p - 3`.
///
/// Works with `b_j = B_j / j!`, for which the recurrence reads
/// `b_m = -sum_{j<m} b_j / (m+1-j)!`. Odd entries past `b_1` vanish and are
/// skipped. Terms are below `p^2 < 2^62 / p`, so a row is summed without
/// intermediate reduction whenever `p < 2^20`.
pub fn bernoulli_table_mod(p: Prime, upto: usize) -> Result<Vec<u64>> {
    let pv = p.get();
    if upto as u64 + 3 > pv {
        return Err(Error::OutOfRange {
            k: upto as i64,
            lo: 0,
            hi: pv as i64 - 3,
        });
    }
    let n = upto + 2;
    let mut fact = vec![1u64; n + 1];
    for i in 1..=n {
        fact[i] = mul_mod(fact[i - 1], i as u64, pv);
    }
    let mut inv_fact = vec![1u64; n + 1];
    inv_fact[n] = inv_mod(fact[n], pv).expect("n < p");
    for i in (1..=n).rev() {
        inv_fact[i - 1] = mul_mod(inv_fact[i], i as u64, pv);
    }
    let lazy = pv < (1 << 20);
    let mut b = vec![0u64; upto + 1];
    b[0] = 1;
    if upto >= 1 {
        b[1] = reduce_i64(-(inv_mod(2, pv).unwrap() as i64), pv);
    }
    for m in (2..=upto).step_by(2) {
        // j = 0, 1 and even j in 2..m
        let mut acc: u64 = mul_mod(b[0], inv_fact[m + 1], pv) + mul_mod(b[1], inv_fact[m], pv);
        let mut j = 2;
        while j < m {
            let term = b[j] * inv_fact[m + 1 - j];
            if lazy {
                acc += term;
            } else {
                acc = (acc + term % pv) % pv;
            }
            j += 2;
        }
        b[m] = (pv - acc % pv) % pv;
    }
    Ok(b.iter()
        .enumerate()
        .map(|(m, &bm)| mul_mod(bm, fact[m], pv))
        .collect())
}

/// `B_k mod p` for `0 <= k <= p - 3`.
pub fn bernoulli_mod(p: Prime, k: usize) -> Result<FpElem> {
    let t = bernoulli_table_mod(p, k)?;
    Ok(FpElem::from_residue(t[k], p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exact_small_values() {
        assert_eq!(bernoulli_rational(0), rat(1, 1));
        assert_eq!(bernoulli_rational(1), rat(-1, 2));
        assert_eq!(bernoulli_rational(2), rat(1, 6));
        assert_eq!(bernoulli_rational(4), rat(-1, 30));
        assert_eq!(bernoulli_rational(12), rat(-691, 2730));
        assert_eq!(bernoulli_rational(13), rat(0, 1));
    }

    #[test]
    fn b2_mod_5() {
        let p = Prime::new(5).unwrap();
        assert_eq!(bernoulli_mod(p, 2).unwrap().residue(), 1);
        assert_eq!(bernoulli_mod(p, 0).unwrap().residue(), 1);
        assert!(bernoulli_mod(p, 3).is_err());
    }

    #[test]
    fn b32_vanishes_mod_37() {
        let p = Prime::new(37).unwrap();
        assert!(bernoulli_mod(p, 32).unwrap().is_zero());
        let exact = rational_mod(&bernoulli_rational(32), 37, "B_32").unwrap();
        assert_eq!(exact, 0);
    }

    #[test]
    fn bernoulli_polynomial_at_zero_and_one() {
        for k in 2..10 {
            assert_eq!(bernoulli_polynomial(k, &rat(0, 1)), bernoulli_rational(k));
            assert_eq!(bernoulli_polynomial(k, &rat(1, 1)), bernoulli_rational(k));
        }
        // B_2(x) = x^2 - x + 1/6
        assert_eq!(bernoulli_polynomial(2, &rat(1, 2)), rat(-1, 12));
    }

    #[test]
    fn non_invertible_denominators_are_typed() {
        let r = rational_mod(&bernoulli_rational(4), 5, "B_4");
        assert!(matches!(r, Err(Error::NonInvertible { .. })));
        assert_eq!(rational_valuation(&bernoulli_rational(4), 5), Some(-1));
    }
}
