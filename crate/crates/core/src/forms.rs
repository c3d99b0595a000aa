//! Level-one modular forms as q-expansions: Eisenstein series, `Δ`, and the
//! echelon (Victor Miller) basis of `M_k`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{add_mod, mul_mod, pow_mod, sub_mod, Prime};
use crate::bernoulli::{bernoulli_rational, rational_mod};
use crate::qseries::{Modulus, QSeries};
use crate::{Error, Result};

/// Coefficient bound past which level-one forms of weight `k` are determined.
pub fn sturm(k: u64) -> usize {
    (k / 12) as usize + 1
}

/// `dim M_k` at level one, for even `k >= 0`.
pub fn dimension(k: u64) -> usize {
    if k % 2 == 1 {
        return 0;
    }
    let base = (k / 12) as usize;
    if k % 12 == 2 {
        base
    } else {
        base + 1
    }
}

fn check_even_weight(k: u64, min: u64) -> Result<()> {
    if k % 2 == 1 {
        return Err(Error::InvalidWeight {
            k: k as i64,
            reason: "odd weight",
        });
    }
    if k < min {
        return Err(Error::InvalidWeight {
            k: k as i64,
            reason: "weight too small",
        });
    }
    Ok(())
}

/// `t^e` summed over divisors `t` of each `n < precision`, optionally
/// skipping multiples of `skip`.
fn divisor_power_sums(e: u64, precision: usize, m: u64, skip: Option<u64>) -> Vec<u64> {
    let mut out = vec![0u64; precision];
    for t in 1..precision {
        if skip.is_some_and(|s| (t as u64).is_multiple_of(s)) {
            continue;
        }
        let w = pow_mod(t as u64, e, m);
        let mut n = t;
        while n < precision {
            out[n] = add_mod(out[n], w, m);
            n += t;
        }
    }
    out
}

fn half_zeta_constant(k: u64) -> BigRational {
    // -B_k / (2k)
    -bernoulli_rational(k as usize) / BigRational::from_integer(BigInt::from(2 * k))
}

/// `E_k` with constant term `-B_k/(2k)` and `a(n) = sigma_{k-1}(n)`.
pub fn eisenstein_q(k: u64, precision: usize, modulus: Modulus) -> Result<QSeries> {
    check_even_weight(k, 4)?;
    let m = modulus.value();
    let c0 = rational_mod(&half_zeta_constant(k), m, "constant term -B_k/(2k)")?;
    let mut coeffs = divisor_power_sums(k - 1, precision, m, None);
    if precision > 0 {
        coeffs[0] = c0;
    }
    Ok(QSeries::from_coeffs(modulus, k, coeffs))
}

/// `E_k` rescaled to constant term 1: `1 - (2k/B_k) sum sigma_{k-1}(n) q^n`.
///
/// Needs `B_k` to be a unit in the coefficient ring after clearing the
/// denominator; in particular it exists for `(p-1) | k`, where it is
/// congruent to 1.
pub fn unit_eisenstein_q(k: u64, precision: usize, modulus: Modulus) -> Result<QSeries> {
    check_even_weight(k, 4)?;
    let m = modulus.value();
    let factor = -BigRational::from_integer(BigInt::from(2 * k)) / bernoulli_rational(k as usize);
    let c = rational_mod(&factor, m, "normalizing factor -2k/B_k")?;
    let mut coeffs: Vec<u64> = divisor_power_sums(k - 1, precision, m, None)
        .into_iter()
        .map(|s| mul_mod(s, c, m))
        .collect();
    if precision > 0 {
        coeffs[0] = 1 % m;
    }
    Ok(QSeries::from_coeffs(modulus, k, coeffs))
}

/// Exact constant term `-(1 - p^{k-1}) B_k / (2k)` of the p-deprived series.
pub fn p_deprived_constant(k: u64, p: Prime) -> BigRational {
    let euler = BigRational::one() - BigRational::from_integer(BigInt::from(p.get()).pow(k as u32 - 1));
    euler * half_zeta_constant(k)
}

/// Eisenstein series with the Euler factor at `p` removed:
/// `a(n) = sum_{t | n, p ∤ t} t^{k-1}`.
pub fn p_deprived_eisenstein_q(k: u64, precision: usize, modulus: Modulus) -> Result<QSeries> {
    let c0 = rational_mod(
        &p_deprived_constant(k, modulus.prime()),
        modulus.value(),
        "p-deprived constant term",
    )?;
    let mut coeffs = p_deprived_tail(k, precision, modulus)?.coeffs().to_vec();
    if precision > 0 {
        coeffs[0] = c0;
    }
    Ok(QSeries::from_coeffs(modulus, k, coeffs))
}

/// The positive-index part of [`p_deprived_eisenstein_q`], constant term 0.
/// Defined even when the constant term is not `p`-integral.
pub fn p_deprived_tail(k: u64, precision: usize, modulus: Modulus) -> Result<QSeries> {
    check_even_weight(k, 2)?;
    let coeffs = divisor_power_sums(k - 1, precision, modulus.value(), Some(modulus.prime().get()));
    Ok(QSeries::from_coeffs(modulus, k, coeffs))
}

/// `Δ = q prod (1 - q^n)^24`, via the pentagonal number expansion.
pub fn delta_q(precision: usize, modulus: Modulus) -> QSeries {
    let m = modulus.value();
    let mut euler = vec![0u64; precision];
    // prod (1 - q^n) = sum_j (-1)^j q^{j(3j-1)/2}, j over all integers
    let mut j: i64 = 0;
    loop {
        let mut any = false;
        for jj in [j, -j - 1] {
            let idx = (jj * (3 * jj - 1) / 2) as usize;
            if idx < precision {
                any = true;
                let sign_neg = jj.rem_euclid(2) == 1;
                euler[idx] = if sign_neg {
                    sub_mod(euler[idx], 1 % m, m)
                } else {
                    add_mod(euler[idx], 1, m)
                };
            }
        }
        if !any {
            break;
        }
        j += 1;
    }
    let e = QSeries::from_coeffs(modulus, 0, euler);
    let e24 = e.pow(24).expect("same modulus");
    let coeffs = (0..precision).map(|n| if n == 0 { 0 } else { e24.coeff(n - 1) }).collect();
    QSeries::from_coeffs(modulus, 12, coeffs)
}

/// Soundness bookkeeping for a finite coefficient comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPlan {
    pub task: String,
    pub weights: Vec<u64>,
    pub comparison_weight: u64,
    pub bound: usize,
}

impl PrecisionPlan {
    /// Compare forms of weight `w` in the graded ring: `floor(w/12) + 1`
    /// coefficients suffice.
    pub fn for_weight(task: &str, weights: &[u64], w: u64) -> Self {
        PrecisionPlan {
            task: task.to_string(),
            weights: weights.to_vec(),
            comparison_weight: w,
            bound: sturm(w),
        }
    }

    /// Raise the bound to a requested precision; never lowers it.
    pub fn with_override(mut self, precision: Option<usize>) -> Self {
        if let Some(d) = precision {
            self.bound = self.bound.max(d);
        }
        self
    }
}

/// An echelon basis of `M_k(Z/p^M)` or of its cuspidal part, truncated at a
/// fixed precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSpace {
    k: u64,
    precision: usize,
    modulus: Modulus,
    cuspidal: bool,
    rows: Vec<QSeries>,
    pivots: Vec<usize>,
}

/// Rows of the Miller basis: `a_i(g_j) = delta_ij` for `i < dim`.
pub fn miller_basis(k: u64, precision: usize, modulus: Modulus) -> Result<FormSpace> {
    check_even_weight(k, 0)?;
    let dim = dimension(k);
    if precision < sturm(k) {
        return Err(Error::InsufficientPrecision {
            needed: sturm(k),
            have: precision,
        });
    }
    let m = modulus.value();
    let e4 = QSeries::from_coeffs(modulus, 4, {
        let mut c: Vec<u64> = divisor_power_sums(3, precision, m, None)
            .into_iter()
            .map(|s| mul_mod(s, 240, m))
            .collect();
        c[0] = 1 % m;
        c
    });
    let e6 = QSeries::from_coeffs(modulus, 6, {
        let mut c: Vec<u64> = divisor_power_sums(5, precision, m, None)
            .into_iter()
            .map(|s| sub_mod(0, mul_mod(s, 504, m), m))
            .collect();
        c[0] = 1 % m;
        c
    });
    let delta = delta_q(precision, modulus);

    let shape = |j: u64| {
        let rest = k - 12 * j;
        let b = if rest.is_multiple_of(4) { 0 } else { 1 };
        ((rest - 6 * b) / 4, b)
    };
    let mut rows = vec![QSeries::zero(modulus, k, precision); dim];
    if dim > 0 {
        // E4-exponents drop by 3 per step in j, so build them from the top
        let (a_min, _) = shape(dim as u64 - 1);
        let e4_cubed = e4.pow(3)?;
        let mut e4_pow = e4.pow(a_min as u32)?;
        let mut delta_pows = vec![QSeries::constant(modulus, 0, precision, 1)];
        for _ in 1..dim {
            let next = delta_pows.last().unwrap().mul(&delta)?;
            delta_pows.push(next);
        }
        for j in (0..dim).rev() {
            let (_, b) = shape(j as u64);
            let mut g = delta_pows[j].mul(&e4_pow)?;
            if b == 1 {
                g = g.mul(&e6)?;
            }
            rows[j] = g.with_weight(k);
            if j > 0 {
                e4_pow = e4_pow.mul(&e4_cubed)?;
            }
        }
    }
    // back-substitute so that a_i(g_j) = delta_ij
    for j in (0..dim).rev() {
        for i in j + 1..dim {
            let c = rows[j].coeff(i);
            if c != 0 {
                let sub = rows[i].scale(c);
                rows[j] = rows[j].sub(&sub)?;
            }
        }
    }
    Ok(FormSpace {
        k,
        precision,
        modulus,
        cuspidal: false,
        pivots: (0..dim).collect(),
        rows,
    })
}

impl FormSpace {
    pub fn weight(&self) -> u64 {
        self.k
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn prime(&self) -> Prime {
        self.modulus.prime()
    }

    pub fn is_cuspidal(&self) -> bool {
        self.cuspidal
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[QSeries] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// The cusp forms: basis rows with pivot at least 1.
    pub fn cuspidal(&self) -> FormSpace {
        let keep: Vec<usize> = (0..self.dim()).filter(|&i| self.pivots[i] >= 1).collect();
        FormSpace {
            cuspidal: true,
            rows: keep.iter().map(|&i| self.rows[i].clone()).collect(),
            pivots: keep.iter().map(|&i| self.pivots[i]).collect(),
            ..self.clone()
        }
    }

    /// Same rows with fewer coefficients.
    pub fn truncate(&self, precision: usize) -> Result<FormSpace> {
        if precision < sturm(self.k) {
            return Err(Error::InsufficientPrecision {
                needed: sturm(self.k),
                have: precision,
            });
        }
        Ok(FormSpace {
            precision: precision.min(self.precision),
            rows: self.rows.iter().map(|r| r.truncate(precision)).collect(),
            ..self.clone()
        })
    }

    /// Reduce the coefficient ring to `p^N`.
    pub fn reduce(&self, target: Modulus) -> Result<FormSpace> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.reduce(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(FormSpace {
            modulus: target,
            rows,
            ..self.clone()
        })
    }

    /// `sum_i c_i g_i`.
    pub fn combination(&self, coords: &[u64]) -> QSeries {
        assert_eq!(coords.len(), self.dim());
        let mut acc = QSeries::zero(self.modulus, self.k, self.precision);
        for (c, r) in coords.iter().zip(&self.rows) {
            if *c != 0 {
                acc = acc.add(&r.scale(*c)).expect("same modulus");
            }
        }
        acc
    }

    /// Coordinates of `f` in this basis, checked on every coefficient both
    /// series share. Fails when fewer than `needed` coefficients are
    /// available on either side.
    pub fn coordinates_checked(&self, f: &QSeries, needed: usize) -> Result<Option<Vec<u64>>> {
        if f.modulus() != self.modulus {
            return Err(Error::ModulusMismatch(f.modulus().value(), self.modulus.value()));
        }
        let have = f.precision().min(self.precision);
        if have < needed {
            return Err(Error::InsufficientPrecision { needed, have });
        }
        let m = self.modulus.value();
        let coords: Vec<u64> = self.pivots.iter().map(|&c| f.coeff(c)).collect();
        for n in 0..have {
            let mut v = 0;
            for (c, r) in coords.iter().zip(&self.rows) {
                v = add_mod(v, mul_mod(*c, r.coeff(n), m), m);
            }
            if v != f.coeff(n) {
                return Ok(None);
            }
        }
        Ok(Some(coords))
    }

    /// Membership at the Sturm bound of this space's weight.
    pub fn membership(&self, f: &QSeries) -> Result<Option<Vec<u64>>> {
        self.coordinates_checked(f, sturm(self.k))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.prime().get(),
            "digits": self.modulus.digits(),
            "k": self.k,
            "cuspidal": self.cuspidal,
            "precision": self.precision,
            "dim": self.dim(),
            "rows": self.rows.iter().map(|r| r.coeffs().to_vec()).collect::<Vec<_>>(),
        })
    }
}

type CacheKey = (u64, u32, u64, usize);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<FormSpace>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<FormSpace>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Memoized [`miller_basis`].
pub fn form_space(k: u64, precision: usize, modulus: Modulus) -> Result<Arc<FormSpace>> {
    let key = (modulus.prime().get(), modulus.digits(), k, precision);
    if let Some(s) = cache().read().unwrap().get(&key) {
        return Ok(Arc::clone(s));
    }
    let space = Arc::new(miller_basis(k, precision, modulus)?);
    let mut w = cache().write().unwrap();
    Ok(Arc::clone(w.entry(key).or_insert(space)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64) -> Modulus {
        Modulus::field(Prime::new(p).unwrap())
    }

    #[test]
    fn sturm_values() {
        assert_eq!(sturm(12), 2);
        assert_eq!(sturm(0), 1);
        assert_eq!(sturm(158), 14);
    }

    #[test]
    fn dimensions() {
        assert_eq!(dimension(2), 0);
        assert_eq!(dimension(4), 1);
        assert_eq!(dimension(12), 2);
        assert_eq!(dimension(14), 1);
        assert_eq!(dimension(32), 3);
    }

    #[test]
    fn e4_coefficients() {
        let m = Modulus::new(Prime::new(7).unwrap(), 3).unwrap();
        let e = eisenstein_q(4, 4, m).unwrap();
        let inv240 = crate::arith::inv_mod(240, 343).unwrap();
        assert_eq!(e.coeffs(), &[inv240, 1, 9, 28]);
    }

    #[test]
    fn eisenstein_constant_needs_unit_denominator() {
        let r = eisenstein_q(4, 3, field(5));
        assert!(matches!(r, Err(Error::NonInvertible { .. })));
        assert!(eisenstein_q(3, 3, field(5)).is_err());
    }

    #[test]
    fn unit_eisenstein_p_minus_one_is_one() {
        for p in [5u64, 7, 11, 13] {
            let e = unit_eisenstein_q(p - 1, 40, field(p)).unwrap();
            assert_eq!(e.coeff(0), 1);
            assert!(e.coeffs()[1..].iter().all(|&c| c == 0), "p = {p}");
        }
    }

    #[test]
    fn p_deprived_coefficients() {
        let e = p_deprived_eisenstein_q(4, 11, field(7)).unwrap();
        assert_eq!(e.coeff(1), 1);
        let m = Modulus::new(Prime::new(5).unwrap(), 3).unwrap();
        assert!(p_deprived_eisenstein_q(4, 11, m).is_err());
        let e = p_deprived_tail(4, 11, m).unwrap();
        assert_eq!(e.coeff(5), 1);
        assert_eq!(e.coeff(10), 9);
    }

    #[test]
    fn delta_first_coefficients() {
        let m = Modulus::new(Prime::new(1_000_003).unwrap(), 1).unwrap();
        let d = delta_q(6, m);
        let tau = [0i64, 1, -24, 252, -1472, 4830];
        for (n, t) in tau.iter().enumerate() {
            assert_eq!(d.coeff(n), crate::arith::reduce_i64(*t, m.value()));
        }
    }

    #[test]
    fn miller_basis_weight_12() {
        let m = field(37);
        let s = miller_basis(12, 10, m).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.pivots(), &[0, 1]);
        assert_eq!(s.rows()[1], delta_q(10, m));
        assert_eq!(s.cuspidal().dim(), 1);
    }

    #[test]
    fn miller_basis_weight_4_is_normalized_e4() {
        let m = field(37);
        let s = miller_basis(4, 5, m).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.rows()[0].coeff(1), 240 % 37);
        let e = eisenstein_q(4, 5, m).unwrap();
        let coords = s.membership(&e).unwrap().unwrap();
        assert_eq!(coords, vec![e.coeff(0)]);
    }

    #[test]
    fn membership_edge_cases() {
        let m = field(37);
        let s = miller_basis(24, 12, m).unwrap();
        assert_eq!(s.membership(&s.rows()[1]).unwrap().unwrap(), vec![0, 1, 0]);
        let z = QSeries::zero(m, 24, 12);
        assert_eq!(s.membership(&z).unwrap().unwrap(), vec![0, 0, 0]);
        let short = QSeries::zero(m, 24, 2);
        assert!(matches!(
            s.membership(&short),
            Err(Error::InsufficientPrecision { .. })
        ));
        let mut bad = s.rows()[0].coeffs().to_vec();
        bad[11] = (bad[11] + 1) % 37;
        assert_eq!(s.membership(&QSeries::from_coeffs(m, 24, bad)).unwrap(), None);
    }

    #[test]
    fn low_weights() {
        let m = field(11);
        assert_eq!(miller_basis(0, 3, m).unwrap().dim(), 1);
        assert_eq!(miller_basis(2, 3, m).unwrap().dim(), 0);
        assert!(miller_basis(12, 1, m).is_err());
    }

    #[test]
    fn cache_returns_shared_space() {
        let m = field(13);
        let a = form_space(16, 20, m).unwrap();
        let b = form_space(16, 20, m).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
