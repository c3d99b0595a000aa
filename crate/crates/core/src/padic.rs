//! Truncated `p`-adic integers, the Teichmüller character, the `p`-adic
//! logarithm, and truncated elements of the Iwasawa algebra `Z_p[[T]]`.
//!
//! A [`PadicInt`] is a residue modulo `p^M` together with its precision `M`.
//! Binary operations return the minimum of the operand precisions. Functions
//! that divide by multiples of `p` take a target precision, inflate their
//! working precision internally, and return [`Error::PrecisionUnderflow`]
//! when the inputs do not carry enough digits.
//!
//! The topological generator of `1 + pZ_p` is fixed to `γ = 1 + p`; the
//! exponents `s(t)` returned by [`s_exponent`] are relative to that choice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::Prime;
use crate::{Error, Result};

fn p_pow(p: Prime, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p.get()), e as usize)
}

/// An element of `Z_p / p^M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicInt {
    value: BigInt,
    p: Prime,
    precision: u32,
}

impl PadicInt {
    pub fn new(value: impl Into<BigInt>, p: Prime, precision: u32) -> Self {
        let m = p_pow(p, precision);
        PadicInt {
            value: value.into().mod_floor(&m),
            p,
            precision,
        }
    }

    pub fn zero(p: Prime, precision: u32) -> Self {
        PadicInt::new(0, p, precision)
    }

    pub fn one(p: Prime, precision: u32) -> Self {
        PadicInt::new(1, p, precision)
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> BigInt {
        p_pow(self.p, self.precision)
    }

    /// Residue modulo `p`.
    pub fn residue(&self) -> u64 {
        (&self.value % self.p.get()).to_u64().unwrap()
    }

    /// The value as a `u64`, when it fits.
    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// `p`-adic valuation, capped at the precision for zero.
    pub fn valuation(&self) -> u32 {
        if self.value.is_zero() {
            return self.precision;
        }
        let p = BigInt::from(self.p.get());
        let mut v = self.value.clone();
        let mut k = 0;
        while (&v % &p).is_zero() {
            v /= &p;
            k += 1;
        }
        k
    }

    /// Reduce to a lower precision. Asking for more digits than are known
    /// is an underflow.
    pub fn reduce(&self, precision: u32) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::PrecisionUnderflow {
                requested: precision,
                available: self.precision,
            });
        }
        Ok(PadicInt::new(self.value.clone(), self.p, precision))
    }

    fn check_same_prime(&self, other: &PadicInt) {
        assert_eq!(self.p, other.p, "p-adic integers for different primes");
    }

    pub fn add(&self, other: &PadicInt) -> PadicInt {
        self.check_same_prime(other);
        PadicInt::new(
            &self.value + &other.value,
            self.p,
            self.precision.min(other.precision),
        )
    }

    pub fn sub(&self, other: &PadicInt) -> PadicInt {
        self.check_same_prime(other);
        PadicInt::new(
            &self.value - &other.value,
            self.p,
            self.precision.min(other.precision),
        )
    }

    pub fn mul(&self, other: &PadicInt) -> PadicInt {
        self.check_same_prime(other);
        PadicInt::new(
            &self.value * &other.value,
            self.p,
            self.precision.min(other.precision),
        )
    }

    pub fn neg(&self) -> PadicInt {
        PadicInt::new(-&self.value, self.p, self.precision)
    }

    pub fn pow(&self, e: u64) -> PadicInt {
        PadicInt {
            value: self.value.modpow(&BigInt::from(e), &self.modulus()),
            p: self.p,
            precision: self.precision,
        }
    }

    /// Inverse of a unit.
    pub fn inverse(&self) -> Result<PadicInt> {
        if self.residue() == 0 {
            return Err(Error::NotAUnit {
                value: self.value.to_string(),
                p: self.p.get(),
            });
        }
        let m = self.modulus();
        let g = self.value.extended_gcd(&m);
        Ok(PadicInt::new(g.x, self.p, self.precision))
    }

    /// Exact division by `p^v`, losing `v` digits. The value must be
    /// divisible by `p^v`.
    pub fn div_p_power(&self, v: u32) -> Result<PadicInt> {
        if v > self.precision {
            return Err(Error::PrecisionUnderflow {
                requested: v,
                available: self.precision,
            });
        }
        let d = p_pow(self.p, v);
        let (q, r) = self.value.div_rem(&d);
        if !r.is_zero() {
            return Err(Error::NotAUnit {
                value: self.value.to_string(),
                p: self.p.get(),
            });
        }
        Ok(PadicInt::new(q, self.p, self.precision - v))
    }
}

/// `ω(t) mod p^M`: the unique `(p-1)`-th root of unity congruent to `t`.
pub fn teichmuller(t: i64, p: Prime, precision: u32) -> Result<PadicInt> {
    if t.rem_euclid(p.get() as i64) == 0 {
        return Err(Error::NotAUnit {
            value: t.to_string(),
            p: p.get(),
        });
    }
    let mut x = PadicInt::new(t, p, precision);
    // x -> x^p gains one correct digit per step.
    for _ in 1..precision.max(1) {
        x = x.pow(p.get());
    }
    Ok(x)
}

/// Number of series terms `n` with `n - floor(log_p n) < precision`; beyond
/// them every term `y^n / n` with `p | y` vanishes modulo `p^precision`.
fn log_series_length(p: u64, precision: u32) -> u64 {
    // n - floor(log_p n) is non-decreasing in n
    let mut n = 1u64;
    while (n as i64 - floor_log(n, p) as i64) < precision as i64 {
        n += 1;
    }
    n - 1
}

fn floor_log(n: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut pw = p;
    while pw <= n {
        k += 1;
        pw = pw.saturating_mul(p);
    }
    k
}

/// `log_p(x) mod p^M` for `x ≡ 1 (mod p)`, by the series
/// `sum (-1)^{n+1} (x-1)^n / n`.
///
/// Division by the indices `n` costs up to `floor(log_p n_max)` digits; the
/// working precision is raised by that amount so the result is correct to
/// `M` digits. `x` itself must carry at least `M` digits.
pub fn plog(x: &PadicInt, precision: u32) -> Result<PadicInt> {
    let p = x.prime();
    if x.residue() != 1 {
        return Err(Error::WrongResidue {
            expected: 1,
            p: p.get(),
        });
    }
    if precision > x.precision() {
        return Err(Error::PrecisionUnderflow {
            requested: precision,
            available: x.precision(),
        });
    }
    if precision == 0 {
        return Ok(PadicInt::zero(p, 0));
    }
    let n_max = log_series_length(p.get(), precision);
    let loss = floor_log(n_max, p.get());
    let work = precision + loss;
    let modulus = p_pow(p, work);
    let y = (x.value() - BigInt::one()).mod_floor(&modulus);
    let target = p_pow(p, precision);
    let mut acc = BigInt::zero();
    let mut y_pow = BigInt::one();
    for n in 1..=n_max {
        y_pow = (&y_pow * &y).mod_floor(&modulus);
        let v = crate::arith::valuation(n, p.get());
        let unit = n / num_traits::pow(p.get(), v as usize);
        let d = p_pow(p, v);
        debug_assert!((&y_pow % &d).is_zero());
        let term = &y_pow / &d;
        let unit_inv = BigInt::from(unit).extended_gcd(&target).x;
        let term = (term * unit_inv).mod_floor(&target);
        if n % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(PadicInt::new(acc, p, precision))
}

/// The fixed topological generator `γ = 1 + p` of `1 + pZ_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaGenerator {
    pub gamma: PadicInt,
}

impl GammaGenerator {
    pub fn new(p: Prime, precision: u32) -> Self {
        GammaGenerator {
            gamma: PadicInt::new(1 + p.get(), p, precision),
        }
    }

    /// The specialization point `γ^d - 1`, always divisible by `p`.
    pub fn specialization_point(&self, d: u64) -> PadicInt {
        let p = self.gamma.prime();
        self.gamma
            .pow(d)
            .sub(&PadicInt::one(p, self.gamma.precision()))
    }
}

/// `s` with `x = γ^s` for a principal unit `x`, modulo `p^M`.
///
/// `log_p γ` has valuation exactly one, so both logarithms are taken with one
/// extra digit and the quotient is formed after removing a factor `p`.
pub fn principal_unit_exponent(x: &PadicInt, precision: u32) -> Result<PadicInt> {
    let p = x.prime();
    let lx = plog(x, precision + 1)?;
    let gamma = GammaGenerator::new(p, precision + 1);
    let lg = plog(&gamma.gamma, precision + 1)?;
    let num = lx.div_p_power(1)?;
    let den = lg.div_p_power(1)?;
    Ok(num.mul(&den.inverse()?))
}

/// `s(t)` defined by `t·ω(t)^{-1} = γ^{s(t)}`, modulo `p^M`.
pub fn s_exponent(t: i64, p: Prime, precision: u32) -> Result<PadicInt> {
    let w = precision + 1;
    let omega = teichmuller(t, p, w)?;
    let unit = PadicInt::new(t, p, w).mul(&omega.inverse()?);
    principal_unit_exponent(&unit, precision)
}

/// Binomial coefficient `C(s, j)` for `s ∈ Z_p`, correct modulo `p^M`
/// provided `s` carries `M + v_p(j!)` digits.
pub fn binomial(s: &PadicInt, j: u64, precision: u32) -> Result<PadicInt> {
    let p = s.prime();
    let loss = factorial_valuation(j, p.get());
    if precision + loss > s.precision() {
        return Err(Error::PrecisionUnderflow {
            requested: precision,
            available: s.precision().saturating_sub(loss),
        });
    }
    // C(x, j) is integer valued, so evaluating at an integer representative
    // and dividing exactly by j! is legitimate.
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j {
        num *= s.value() - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    debug_assert!((&num % &den).is_zero());
    Ok(PadicInt::new(num / den, p, precision))
}

/// `v_p(j!)` by Legendre's formula.
pub fn factorial_valuation(j: u64, p: u64) -> u32 {
    let mut v = 0;
    let mut q = j / p;
    while q > 0 {
        v += q as u32;
        q /= p;
    }
    v
}

/// An element of `Z_p[[T]]` modulo `(p^M, T^D)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaPoly {
    coeffs: Vec<PadicInt>,
    p: Prime,
    precision: u32,
}

impl LambdaPoly {
    pub fn zero(p: Prime, trunc: usize, precision: u32) -> Self {
        LambdaPoly {
            coeffs: vec![PadicInt::zero(p, precision); trunc],
            p,
            precision,
        }
    }

    pub fn constant(c: &PadicInt, trunc: usize) -> Self {
        let mut f = LambdaPoly::zero(c.prime(), trunc, c.precision());
        if trunc > 0 {
            f.coeffs[0] = c.clone();
        }
        f
    }

    /// The polynomial `T`.
    pub fn variable(p: Prime, trunc: usize, precision: u32) -> Self {
        let mut f = LambdaPoly::zero(p, trunc, precision);
        if trunc > 1 {
            f.coeffs[1] = PadicInt::one(p, precision);
        }
        f
    }

    pub fn from_coeffs(coeffs: Vec<PadicInt>, p: Prime, precision: u32) -> Self {
        let coeffs = coeffs
            .into_iter()
            .map(|c| PadicInt::new(c.value().clone(), p, precision.min(c.precision())))
            .collect();
        LambdaPoly {
            coeffs,
            p,
            precision,
        }
    }

    pub fn coeffs(&self) -> &[PadicInt] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [PadicInt] {
        &mut self.coeffs
    }

    pub fn trunc_degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn add(&self, other: &LambdaPoly) -> LambdaPoly {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        LambdaPoly {
            coeffs,
            p: self.p,
            precision: self.precision.min(other.precision),
        }
    }

    pub fn scale(&self, c: &PadicInt) -> LambdaPoly {
        LambdaPoly {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
            p: self.p,
            precision: self.precision.min(c.precision()),
        }
    }

    /// Horner evaluation at `x ≡ 0 (mod p)`. The discarded tail has
    /// valuation at least `D`, so the value is exact to `min(M, D)` digits.
    pub fn eval(&self, x: &PadicInt) -> Result<PadicInt> {
        if x.residue() != 0 {
            return Err(Error::WrongResidue {
                expected: 0,
                p: self.p.get(),
            });
        }
        let digits = self
            .precision
            .min(self.coeffs.len() as u32)
            .min(x.precision());
        let mut acc = PadicInt::zero(self.p, self.precision.min(x.precision()));
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc.reduce(digits.min(acc.precision()))
    }
}

/// `A_t(T) = t (1+T)^{s(t)}` truncated modulo `(p^M, T^D)`.
///
/// The exponent is computed with `v_p((D-1)!)` extra digits so that every
/// binomial coefficient is correct modulo `p^M`.
pub fn a_t_poly(t: i64, p: Prime, trunc: usize, precision: u32) -> Result<LambdaPoly> {
    let loss = factorial_valuation(trunc.saturating_sub(1) as u64, p.get());
    let s = s_exponent(t, p, precision + loss)?;
    let t_val = PadicInt::new(t, p, precision);
    let mut coeffs = Vec::with_capacity(trunc);
    for j in 0..trunc {
        coeffs.push(binomial(&s, j as u64, precision)?.mul(&t_val));
    }
    Ok(LambdaPoly {
        coeffs,
        p,
        precision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn teichmuller_of_two_mod_25() {
        let w = teichmuller(2, p(5), 2).unwrap();
        assert_eq!(w.to_u64(), Some(7));
        assert_eq!(w.pow(4).to_u64(), Some(1));
    }

    #[test]
    fn teichmuller_trivial_cases() {
        for m in 1..5 {
            assert_eq!(teichmuller(1, p(7), m).unwrap().to_u64(), Some(1));
        }
        assert_eq!(teichmuller(12, p(7), 1).unwrap().to_u64(), Some(5));
        assert!(teichmuller(14, p(7), 3).is_err());
    }

    #[test]
    fn log_of_six_mod_25() {
        let x = PadicInt::new(6, p(5), 2);
        assert_eq!(plog(&x, 2).unwrap().to_u64(), Some(5));
        assert!(plog(&PadicInt::one(p(5), 4), 4).unwrap().is_zero());
        assert!(plog(&PadicInt::new(2, p(5), 3), 3).is_err());
        assert!(matches!(
            plog(&x, 3),
            Err(Error::PrecisionUnderflow { .. })
        ));
    }

    #[test]
    fn log_is_a_homomorphism_on_gamma() {
        let g = GammaGenerator::new(p(7), 6).gamma;
        let l1 = plog(&g, 6).unwrap();
        let l2 = plog(&g.pow(2), 6).unwrap();
        assert_eq!(l2, l1.add(&l1));
    }

    #[test]
    fn s_exponent_special_values() {
        assert!(s_exponent(1, p(7), 4).unwrap().is_zero());
        // t = 1 + p has ω(t) = 1.
        assert_eq!(s_exponent(8, p(7), 4).unwrap().to_u64(), Some(1));
    }

    #[test]
    fn s_exponent_discrete_log_oracle() {
        // brute-force discrete log of 2·ω(2)^{-1} in (1 + 7Z)/7^3
        let prime = p(7);
        let m = 343u64;
        let w = teichmuller(2, prime, 3).unwrap();
        let target = PadicInt::new(2, prime, 3).mul(&w.inverse().unwrap());
        let target = target.to_u64().unwrap();
        let mut g = 1u64;
        let mut found = None;
        for v in 0..49u64 {
            if g == target {
                found = Some(v);
                break;
            }
            g = g * 8 % m;
        }
        let v = found.expect("2·ω(2)^-1 is a principal unit");
        let s = s_exponent(2, prime, 2).unwrap();
        assert_eq!(s.to_u64(), Some(v));
    }

    #[test]
    fn binomial_needs_extra_digits() {
        let s = PadicInt::new(3, p(5), 2);
        // v_5(5!) = 1, so two digits of s leave one digit of C(s, 5)
        assert!(binomial(&s, 5, 2).is_err());
        assert!(binomial(&s, 5, 1).unwrap().is_zero());
        assert_eq!(binomial(&s, 2, 2).unwrap().to_u64(), Some(3));
    }

    #[test]
    fn a_t_poly_constant_term_and_trivial_t() {
        let f = a_t_poly(1, p(5), 4, 3).unwrap();
        assert_eq!(f.coeffs()[0].to_u64(), Some(1));
        assert!(f.coeffs()[1..].iter().all(PadicInt::is_zero));
        let g = a_t_poly(3, p(5), 4, 3).unwrap();
        assert_eq!(g.coeffs()[0].to_u64(), Some(3));
    }

    #[test]
    fn eval_requires_topologically_nilpotent_point() {
        let f = LambdaPoly::variable(p(5), 3, 2);
        assert!(f.eval(&PadicInt::new(1, p(5), 2)).is_err());
        let x = GammaGenerator::new(p(5), 2).specialization_point(3);
        assert_eq!(f.eval(&x).unwrap(), x);
        let one = LambdaPoly::constant(&PadicInt::one(p(5), 2), 3);
        assert_eq!(one.eval(&x).unwrap().to_u64(), Some(1));
    }
}
