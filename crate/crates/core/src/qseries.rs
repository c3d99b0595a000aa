//! Truncated q-expansions over `Z/p^M`.

use serde::{Deserialize, Serialize};

use crate::arith::{add_mod, mul_mod, pow_mod, sub_mod, Prime};
use crate::{Error, Result};

/// The coefficient ring `Z/p^M`, with `p^M < 2^62`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modulus {
    p: Prime,
    digits: u32,
    m: u64,
}

impl Modulus {
    pub fn new(p: Prime, digits: u32) -> Result<Self> {
        if digits == 0 {
            return Err(Error::PrecisionUnderflow {
                requested: 0,
                available: 0,
            });
        }
        let mut m: u64 = 1;
        for _ in 0..digits {
            m = m
                .checked_mul(p.get())
                .filter(|&v| v < (1 << 62))
                .ok_or(Error::PrecisionUnderflow {
                    requested: digits,
                    available: 62 / (64 - p.get().leading_zeros()),
                })?;
        }
        Ok(Modulus { p, digits, m })
    }

    /// The residue field `F_p`.
    pub fn field(p: Prime) -> Self {
        Modulus {
            p,
            digits: 1,
            m: p.get(),
        }
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// `p^M` itself.
    #[inline]
    pub fn value(&self) -> u64 {
        self.m
    }

    pub fn is_field(&self) -> bool {
        self.digits == 1
    }
}

/// `a(0), ..., a(D-1)` of a q-series, with a graded weight tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QSeries {
    coeffs: Vec<u64>,
    weight: u64,
    modulus: Modulus,
}

impl QSeries {
    pub fn zero(modulus: Modulus, weight: u64, precision: usize) -> Self {
        QSeries {
            coeffs: vec![0; precision],
            weight,
            modulus,
        }
    }

    /// The constant `c` at the given weight tag.
    pub fn constant(modulus: Modulus, weight: u64, precision: usize, c: u64) -> Self {
        let mut s = QSeries::zero(modulus, weight, precision);
        if precision > 0 {
            s.coeffs[0] = c % modulus.value();
        }
        s
    }

    pub fn from_coeffs(modulus: Modulus, weight: u64, coeffs: Vec<u64>) -> Self {
        let m = modulus.value();
        QSeries {
            coeffs: coeffs.into_iter().map(|c| c % m).collect(),
            weight,
            modulus,
        }
    }

    pub fn from_fn(modulus: Modulus, weight: u64, precision: usize, f: impl Fn(usize) -> u64) -> Self {
        let m = modulus.value();
        QSeries {
            coeffs: (0..precision).map(|n| f(n) % m).collect(),
            weight,
            modulus,
        }
    }

    #[inline]
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn weight(&self) -> u64 {
        self.weight
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// `a(n)`; panics past the precision.
    #[inline]
    pub fn coeff(&self, n: usize) -> u64 {
        self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn with_weight(mut self, weight: u64) -> Self {
        self.weight = weight;
        self
    }

    pub fn truncate(&self, precision: usize) -> QSeries {
        let n = precision.min(self.precision());
        QSeries {
            coeffs: self.coeffs[..n].to_vec(),
            ..*self
        }
    }

    /// Reduce to a coarser modulus `p^N`, `N <= M`.
    pub fn reduce(&self, target: Modulus) -> Result<QSeries> {
        if target.prime() != self.modulus.prime() || target.digits() > self.modulus.digits() {
            return Err(Error::ModulusMismatch(self.modulus.value(), target.value()));
        }
        Ok(QSeries::from_coeffs(target, self.weight, self.coeffs.clone()))
    }

    fn check(&self, other: &QSeries) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus.value(), other.modulus.value()));
        }
        Ok(())
    }

    pub fn add(&self, other: &QSeries) -> Result<QSeries> {
        self.check(other)?;
        let m = self.modulus.value();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| add_mod(a, b, m))
            .collect();
        Ok(QSeries { coeffs, ..*self })
    }

    pub fn sub(&self, other: &QSeries) -> Result<QSeries> {
        self.check(other)?;
        let m = self.modulus.value();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| sub_mod(a, b, m))
            .collect();
        Ok(QSeries { coeffs, ..*self })
    }

    pub fn scale(&self, c: u64) -> QSeries {
        let m = self.modulus.value();
        let c = c % m;
        QSeries {
            coeffs: self.coeffs.iter().map(|&a| mul_mod(a, c, m)).collect(),
            ..*self
        }
    }

    /// Truncated product; weights add, precision is the smaller one.
    pub fn mul(&self, other: &QSeries) -> Result<QSeries> {
        self.check(other)?;
        let m = self.modulus.value();
        let n = self.precision().min(other.precision());
        let (a, b) = (&self.coeffs[..n], &other.coeffs[..n]);
        let mut out = vec![0u64; n];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc: u128 = 0;
            if m < (1 << 32) {
                // products fit in 64 bits; the u128 sum cannot overflow
                for i in 0..=k {
                    acc += (a[i] * b[k - i]) as u128;
                }
            } else {
                for i in 0..=k {
                    acc = (acc + a[i] as u128 * b[k - i] as u128) % m as u128;
                }
            }
            *slot = (acc % m as u128) as u64;
        }
        Ok(QSeries {
            coeffs: out,
            weight: self.weight + other.weight,
            modulus: self.modulus,
        })
    }

    pub fn pow(&self, e: u32) -> Result<QSeries> {
        let mut acc = QSeries::constant(self.modulus, 0, self.precision(), 1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Coefficientwise `n^j a(n)`, weight tag left to the caller.
    pub fn scale_by_index_power(&self, j: u64) -> QSeries {
        let m = self.modulus.value();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, &a)| {
                if j == 0 {
                    a
                } else {
                    mul_mod(a, pow_mod(n as u64, j, m), m)
                }
            })
            .collect();
        QSeries { coeffs, ..*self }
    }

    /// Agreement on the common prefix.
    pub fn agrees_with(&self, other: &QSeries, upto: usize) -> bool {
        upto <= self.precision()
            && upto <= other.precision()
            && self.coeffs[..upto] == other.coeffs[..upto]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Modulus {
        Modulus::field(Prime::new(5).unwrap())
    }

    #[test]
    fn modulus_bounds() {
        let p = Prime::new(37).unwrap();
        assert_eq!(Modulus::new(p, 3).unwrap().value(), 50653);
        assert!(Modulus::new(p, 0).is_err());
        assert!(Modulus::new(p, 20).is_err());
    }

    #[test]
    fn geometric_series_product() {
        // (1 - q) * (1 + q + q^2 + ...) = 1
        let m = f5();
        let a = QSeries::from_coeffs(m, 0, vec![1, 4, 0, 0, 0, 0]);
        let b = QSeries::from_fn(m, 0, 6, |_| 1);
        let c = a.mul(&b).unwrap();
        assert_eq!(c.coeffs(), &[1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn mixed_moduli_rejected() {
        let a = QSeries::zero(f5(), 4, 3);
        let b = QSeries::zero(Modulus::field(Prime::new(7).unwrap()), 4, 3);
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn reduction_to_field() {
        let p = Prime::new(5).unwrap();
        let m = Modulus::new(p, 2).unwrap();
        let s = QSeries::from_coeffs(m, 4, vec![24, 7, 5]);
        assert_eq!(s.reduce(f5()).unwrap().coeffs(), &[4, 2, 0]);
        assert!(QSeries::zero(f5(), 0, 1).reduce(m).is_err());
    }

    #[test]
    fn power_matches_repeated_product() {
        let m = f5();
        let a = QSeries::from_coeffs(m, 4, vec![1, 2, 3, 4, 0, 1]);
        let cube = a.mul(&a).unwrap().mul(&a).unwrap();
        assert_eq!(a.pow(3).unwrap().coeffs(), cube.coeffs());
        assert_eq!(a.pow(3).unwrap().weight(), 12);
    }
}
