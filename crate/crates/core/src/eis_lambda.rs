//! The Λ-adic Eisenstein series `E(ω^d, 1)` at level one, truncated, and its
//! specializations at `T = γ^s - 1`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, Prime};
use crate::bernoulli::{bernoulli_polynomial, rational_mod};
use crate::forms::{p_deprived_constant, p_deprived_tail};
use crate::padic::{a_t_poly, teichmuller, GammaGenerator, LambdaPoly, PadicInt};
use crate::qseries::Modulus;
use crate::{Error, Result};

fn check_character(p: Prime, d: u64) -> Result<()> {
    if d % 2 == 1 || d + 3 > p.get() {
        return Err(Error::OutOfRange {
            k: d as i64,
            lo: 0,
            hi: p.get() as i64 - 3,
        });
    }
    Ok(())
}

/// `sum_{t | n, p ∤ t} ω^d(t) A_t(T)` modulo `(p^M, T^D)`.
pub fn lambda_eis_coeff(p: Prime, d: u64, n: u64, trunc: usize, digits: u32) -> Result<LambdaPoly> {
    check_character(p, d)?;
    let mut cache = HashMap::new();
    coeff_with_cache(p, d, n, trunc, digits, &mut cache)
}

fn coeff_with_cache(
    p: Prime,
    d: u64,
    n: u64,
    trunc: usize,
    digits: u32,
    cache: &mut HashMap<u64, LambdaPoly>,
) -> Result<LambdaPoly> {
    if n == 0 {
        return Err(Error::ZeroInput("coefficient index"));
    }
    let mut acc = LambdaPoly::zero(p, trunc, digits);
    for t in divisors(n) {
        if t % p.get() == 0 {
            continue;
        }
        let term = match cache.get(&t) {
            Some(c) => c.clone(),
            None => {
                let omega = teichmuller(t as i64, p, digits)?.pow(d);
                let c = a_t_poly(t as i64, p, trunc, digits)?.scale(&omega);
                cache.insert(t, c.clone());
                c
            }
        };
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Coefficients `n = 1, ..., D_q - 1` of `E(ω^d, 1)`. The constant term is
/// not stored; specializations compare it through Bernoulli numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaEisenstein {
    pub p: Prime,
    pub d: u64,
    pub trunc: usize,
    pub digits: u32,
    coeffs: Vec<LambdaPoly>,
}

impl LambdaEisenstein {
    pub fn new(p: Prime, d: u64, q_precision: usize, trunc: usize, digits: u32) -> Result<Self> {
        check_character(p, d)?;
        let mut cache = HashMap::new();
        let coeffs = (1..q_precision as u64)
            .map(|n| coeff_with_cache(p, d, n, trunc, digits, &mut cache))
            .collect::<Result<Vec<_>>>()?;
        Ok(LambdaEisenstein {
            p,
            d,
            trunc,
            digits,
            coeffs,
        })
    }

    pub fn q_precision(&self) -> usize {
        self.coeffs.len() + 1
    }

    /// Coefficient of `q^n`, `n >= 1`.
    pub fn coeff(&self, n: usize) -> &LambdaPoly {
        &self.coeffs[n - 1]
    }

    /// Test double: adds 1 to the constant coefficient of `q^n`.
    pub fn perturb(&mut self, n: usize) {
        let c = &mut self.coeffs[n - 1].coeffs_mut()[0];
        *c = c.add(&PadicInt::one(self.p, c.precision()));
    }

    /// Digits to which a specialization is exact.
    pub fn exact_digits(&self) -> u32 {
        self.digits.min(self.trunc as u32)
    }

    /// Values at `T = γ^s - 1` of the stored coefficients.
    pub fn specialize(&self, s: u64) -> Result<Vec<u64>> {
        if s % (self.p.get() - 1) != self.d % (self.p.get() - 1) {
            return Err(Error::OutOfRange {
                k: s as i64,
                lo: self.d as i64,
                hi: self.d as i64,
            });
        }
        let x = GammaGenerator::new(self.p, self.digits).specialization_point(s);
        self.coeffs
            .iter()
            .map(|c| {
                let v = c.eval(&x)?;
                Ok(v.to_u64().expect("reduced value fits"))
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<Vec<String>> = self
            .coeffs
            .iter()
            .map(|c| c.coeffs().iter().map(|x| x.value().to_string()).collect())
            .collect();
        serde_json::json!({
            "p": self.p.get(),
            "d": self.d,
            "trunc": self.trunc,
            "digits": self.digits,
            "coefficients": coeffs,
        })
    }
}

/// `B_{k, χ_0}` for the trivial character modulo `p`, from the Bernoulli
/// polynomial sum `p^{k-1} sum_{0<a<p} B_k(a/p)`.
pub fn imprimitive_bernoulli(k: u64, p: Prime) -> BigRational {
    let pb = BigInt::from(p.get());
    let mut acc = BigRational::zero();
    for a in 1..p.get() {
        let x = BigRational::new(BigInt::from(a), pb.clone());
        acc += bernoulli_polynomial(k as usize, &x);
    }
    acc * BigRational::from_integer(pb.pow(k as u32 - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantStatus {
    /// Equal as rationals and modulo `p^M`.
    Matched,
    /// Equal as rationals; not `p`-integral (the pole at `d = p - 3`).
    PoleExcluded,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecializationReport {
    pub p: u64,
    pub d: u64,
    pub weight: u64,
    pub q_precision: usize,
    pub trunc: usize,
    pub digits: u32,
    pub digits_compared: u32,
    /// Indices `n >= 1` whose coefficients disagree.
    pub mismatches: Vec<u64>,
    pub constant_term: String,
    pub constant_status: ConstantStatus,
}

impl SpecializationReport {
    pub fn all_match(&self) -> bool {
        self.mismatches.is_empty() && self.constant_status != ConstantStatus::Mismatch
    }
}

/// Compares the specialization at `T = γ^d - 1` with the p-deprived series
/// of weight `d + 2`, coefficientwise modulo `p^{min(M, D)}`, and the
/// constant term against `-B_{k,χ_0}/(2k)`.
pub fn compare_specialization(e: &LambdaEisenstein) -> Result<SpecializationReport> {
    let p = e.p;
    let k = e.d + 2;
    let digits = e.exact_digits();
    let modulus = Modulus::new(p, digits)?;
    let values = e.specialize(e.d)?;
    let target = p_deprived_tail(k, e.q_precision(), modulus)?;
    let mismatches = values
        .iter()
        .enumerate()
        .filter(|(i, &v)| v % modulus.value() != target.coeff(i + 1))
        .map(|(i, _)| i as u64 + 1)
        .collect();

    let interpolated = -imprimitive_bernoulli(k, p) / BigRational::from_integer(BigInt::from(2 * k));
    let expected = p_deprived_constant(k, p);
    let constant_status = if interpolated != expected {
        ConstantStatus::Mismatch
    } else {
        match (
            rational_mod(&interpolated, modulus.value(), "constant"),
            rational_mod(&expected, modulus.value(), "constant"),
        ) {
            (Ok(a), Ok(b)) if a == b => ConstantStatus::Matched,
            (Err(_), Err(_)) => ConstantStatus::PoleExcluded,
            _ => ConstantStatus::Mismatch,
        }
    };
    Ok(SpecializationReport {
        p: p.get(),
        d: e.d,
        weight: k,
        q_precision: e.q_precision(),
        trunc: e.trunc,
        digits: e.digits,
        digits_compared: digits,
        mismatches,
        constant_term: expected.to_string(),
        constant_status,
    })
}

/// Builds `E(ω^d, 1)` and runs [`compare_specialization`].
pub fn specialize_and_compare(
    p: Prime,
    d: u64,
    q_precision: usize,
    trunc: usize,
    digits: u32,
) -> Result<SpecializationReport> {
    compare_specialization(&LambdaEisenstein::new(p, d, q_precision, trunc, digits)?)
}
