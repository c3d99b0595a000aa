//! Hecke operators on level-one q-expansions and the matrix algebras they
//! generate: duality pairing, ordinary projector, Eisenstein localization.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{add_mod, gcd_divisors, mul_mod, pow_mod, sigma_mod, Prime};
use crate::forms::{form_space, sturm, FormSpace};
use crate::linalg::{algebra_closure, generalized_eigenspace, matrix_coordinates, stable_idempotent, MatFp, Subspace};
use crate::qseries::{Modulus, QSeries};
use crate::{Error, Result};

/// `f | T(n)` on coefficients, at the weight tag of `f`:
/// `a(m; f|T(n)) = sum_{d | (m, n)} d^{w-1} a(mn/d^2; f)`.
///
/// Returns `floor((D-1)/n) + 1` coefficients.
pub fn hecke_coeff_action(f: &QSeries, n: u64) -> Result<QSeries> {
    if n == 0 {
        return Err(Error::ZeroInput("Hecke index"));
    }
    if f.precision() == 0 {
        return Err(Error::InsufficientPrecision { needed: 1, have: 0 });
    }
    let target = (f.precision() - 1) / n as usize + 1;
    hecke_apply(f, n, target)
}

/// `f | T(n)` to a requested number of coefficients.
pub fn hecke_apply(f: &QSeries, n: u64, target: usize) -> Result<QSeries> {
    if n == 0 {
        return Err(Error::ZeroInput("Hecke index"));
    }
    let needed = if target == 0 { 0 } else { (target - 1) * n as usize + 1 };
    if needed > f.precision() {
        return Err(Error::InsufficientPrecision {
            needed,
            have: f.precision(),
        });
    }
    let modulus = f.modulus();
    let m = modulus.value();
    let w = f.weight();
    let mut out = vec![0u64; target];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mm = idx as u64;
        if mm == 0 {
            // a(0; f|T(n)) = sigma_{w-1}(n) a(0; f)
            *slot = mul_mod(sigma_mod(n, w.saturating_sub(1), m), f.coeff(0), m);
            continue;
        }
        let mut acc = 0;
        for d in gcd_divisors(mm, n) {
            let c = f.coeff((mm * n / (d * d)) as usize);
            if c != 0 {
                acc = add_mod(acc, mul_mod(pow_mod(d, w.saturating_sub(1), m), c, m), m);
            }
        }
        *slot = acc;
    }
    Ok(QSeries::from_coeffs(modulus, w, out))
}

/// The matrix of `T(n)` on a form space, acting on coordinate columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeOp {
    pub n: u64,
    pub k: u64,
    pub p: u64,
    pub matrix: MatFp,
}

/// Matrix of `T(n)` in the basis of `space`, which must carry at least
/// `n * sturm(k)` coefficients.
pub fn hecke_matrix(space: &FormSpace, n: u64) -> Result<HeckeOp> {
    let modulus = space.modulus();
    if !modulus.is_field() {
        return Err(Error::ModulusMismatch(modulus.value(), modulus.prime().get()));
    }
    let k = space.weight();
    let needed = n as usize * sturm(k);
    if space.precision() < needed {
        return Err(Error::InsufficientPrecision {
            needed,
            have: space.precision(),
        });
    }
    let p = modulus.prime().get();
    let mut cols = Vec::with_capacity(space.dim());
    for g in space.rows() {
        let image = hecke_coeff_action(g, n)?;
        let coords = space.coordinates_checked(&image, sturm(k))?.ok_or_else(|| {
            Error::NotMember(format!("T({n}) maps a basis form of weight {k} outside the space"))
        })?;
        cols.push(coords);
    }
    Ok(HeckeOp {
        n,
        k,
        p,
        matrix: MatFp::from_columns(p, space.dim(), &cols),
    })
}

/// Default generator bound for the Hecke algebra at weight `k`.
pub fn generator_bound(k: u64) -> usize {
    sturm(k)
}

/// The eigenvalue system `n -> sigma_{k-1}(n) mod p` of `E_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisensteinSystem {
    pub k: u64,
    pub p: Prime,
}

impl EisensteinSystem {
    pub fn new(k: u64, p: Prime) -> Self {
        EisensteinSystem { k, p }
    }

    pub fn eigenvalue(&self, n: u64) -> u64 {
        sigma_mod(n, self.k.saturating_sub(1), self.p.get())
    }

    /// `T(n) - sigma_{k-1}(n)`.
    pub fn eta_at(&self, n: u64, t: &MatFp) -> MatFp {
        t.sub(&MatFp::scalar(t.p(), t.rows(), self.eigenvalue(n)))
    }
}

/// A form space together with `T(1), ..., T(B)`.
#[derive(Debug, Clone)]
pub struct HeckeModule {
    space: Arc<FormSpace>,
    bound: usize,
    ops: Vec<HeckeOp>,
}

/// Precision that supports `T(n)` for every `n <= bound` at weight `k`.
pub fn hecke_precision(k: u64, bound: usize) -> usize {
    bound.max(1) * sturm(k) + 1
}

impl HeckeModule {
    pub fn new(space: Arc<FormSpace>, bound: usize) -> Result<Self> {
        let ops = (1..=bound as u64)
            .map(|n| hecke_matrix(&space, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(HeckeModule { space, bound, ops })
    }

    /// `M_k(F_p)` (or `S_k(F_p)`) with operators up to `bound`.
    pub fn for_weight(p: Prime, k: u64, cuspidal: bool, bound: usize) -> Result<Self> {
        let full = form_space(k, hecke_precision(k, bound), Modulus::field(p))?;
        let space = if cuspidal {
            Arc::new(full.cuspidal())
        } else {
            full
        };
        HeckeModule::new(space, bound)
    }

    pub fn space(&self) -> &Arc<FormSpace> {
        &self.space
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn p(&self) -> u64 {
        self.space.prime().get()
    }

    pub fn weight(&self) -> u64 {
        self.space.weight()
    }

    /// `T(n)` for `1 <= n <= bound`.
    pub fn op(&self, n: u64) -> &MatFp {
        &self.ops[n as usize - 1].matrix
    }

    pub fn ops(&self) -> &[HeckeOp] {
        &self.ops
    }

    pub fn all_commute(&self) -> bool {
        self.ops
            .iter()
            .enumerate()
            .all(|(i, a)| self.ops[..i].iter().all(|b| a.matrix.commutes_with(&b.matrix)))
    }

    pub fn eisenstein_system(&self) -> EisensteinSystem {
        EisensteinSystem::new(self.weight(), self.space.prime())
    }

    /// The algebra generated by `T(n)`, `n <= bound`, with structure constants.
    pub fn algebra(&self) -> HeckeAlgebra {
        let gens: Vec<MatFp> = self.ops.iter().map(|o| o.matrix.clone()).collect();
        HeckeAlgebra::generated_by(self.p(), self.dim(), &gens)
    }

    /// Same, skipping the indices divisible by `p`.
    pub fn algebra_prime_to_p(&self) -> HeckeAlgebra {
        let p = self.p();
        let gens: Vec<MatFp> = self
            .ops
            .iter()
            .filter(|o| o.n % p != 0)
            .map(|o| o.matrix.clone())
            .collect();
        HeckeAlgebra::generated_by(p, self.dim(), &gens)
    }

    /// The generalized eigenspace of all `eta(n) = T(n) - sigma_{k-1}(n)`.
    pub fn localize(&self) -> Result<EisLocalPiece> {
        let sys = self.eisenstein_system();
        let p = self.p();
        let d = self.dim();
        let subspace = if d == 0 {
            Subspace::span(p, 0, &[])
        } else {
            let etas: Vec<MatFp> = self
                .ops
                .iter()
                .map(|o| sys.eta_at(o.n, &o.matrix))
                .collect();
            generalized_eigenspace(&etas, d)?
        };
        let restricted = self
            .ops
            .iter()
            .map(|o| subspace.restrict(&o.matrix))
            .collect::<Result<Vec<_>>>()?;
        Ok(EisLocalPiece {
            k: self.weight(),
            p,
            cuspidal: self.space.is_cuspidal(),
            ambient_dim: d,
            subspace,
            restricted,
        })
    }

    /// Matrix `[a(1; f_j | t_i)]` for an algebra basis `t_i`.
    pub fn duality_pairing_matrix(&self, basis: &[MatFp]) -> MatFp {
        let p = self.p();
        let a1: Vec<u64> = self.space.rows().iter().map(|r| r.coeff(1)).collect();
        let d = self.dim();
        MatFp::from_fn(p, basis.len(), d, |i, j| {
            (0..d).fold(0, |acc, l| add_mod(acc, mul_mod(basis[i].get(l, j), a1[l], p), p))
        })
    }

    /// `e_0`, the Fitting idempotent of `T(p)`; needs `bound >= p`.
    pub fn ordinary_projector(&self) -> Result<MatFp> {
        let p = self.p();
        if (self.bound as u64) < p {
            return Err(Error::InsufficientPrecision {
                needed: p as usize,
                have: self.bound,
            });
        }
        Ok(stable_idempotent(self.op(p)))
    }
}

/// A matrix algebra with a linear basis and its structure constants
/// `b_i b_j = sum_l c[i][j][l] b_l`. The first basis element is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeAlgebra {
    pub p: u64,
    pub basis: Vec<MatFp>,
    pub structure_constants: Vec<Vec<Vec<u64>>>,
}

impl HeckeAlgebra {
    pub fn generated_by(p: u64, n: usize, gens: &[MatFp]) -> Self {
        let basis = algebra_closure(p, n, gens);
        let structure_constants = basis
            .iter()
            .map(|a| {
                basis
                    .iter()
                    .map(|b| {
                        matrix_coordinates(&basis, &a.mul(b))
                            .expect("closure is multiplicatively closed")
                    })
                    .collect()
            })
            .collect();
        HeckeAlgebra {
            p,
            basis,
            structure_constants,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// The Eisenstein-local part of a form space: the common generalized
/// eigenspace of the `eta(n)`, with the operators restricted to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisLocalPiece {
    pub k: u64,
    pub p: u64,
    pub cuspidal: bool,
    pub ambient_dim: usize,
    /// Basis in the coordinates of the ambient space.
    pub subspace: Subspace,
    /// `T(1), ..., T(B)` restricted to the piece.
    pub restricted: Vec<MatFp>,
}

impl EisLocalPiece {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn contains(&self, coords: &[u64]) -> bool {
        self.subspace.contains(coords)
    }

    /// Restricted `eta(n)` for `n <= B`.
    pub fn etas(&self) -> Vec<MatFp> {
        let sys = EisensteinSystem::new(self.k, Prime::new(self.p).expect("validated prime"));
        self.restricted
            .iter()
            .enumerate()
            .map(|(i, t)| sys.eta_at(i as u64 + 1, t))
            .collect()
    }

    /// True when no element of the piece is a nonzero constant, judged on
    /// the coefficients of `space`.
    pub fn excludes_constants(&self, space: &FormSpace) -> bool {
        let p = self.p;
        if self.dim() == 0 {
            return true;
        }
        let forms: Vec<QSeries> = self
            .subspace
            .basis()
            .iter()
            .map(|c| space.combination(c))
            .collect();
        // vectors x with sum x_i f_i having a(n) = 0 for all n >= 1
        let higher = MatFp::from_fn(p, space.precision() - 1, forms.len(), |n, i| {
            forms[i].coeff(n + 1)
        });
        let ker = higher.kernel();
        (0..ker.rows()).all(|r| {
            let x = ker.row(r);
            let c0 = x
                .iter()
                .zip(&forms)
                .fold(0, |acc, (&xi, f)| add_mod(acc, mul_mod(xi, f.coeff(0), p), p));
            c0 == 0
        })
    }
}

/// Outcome of comparing the algebra with and without `T(n)`, `p | n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TpRedundancy {
    Redundant,
    NotRedundant,
    /// Weight outside `2 <= k <= p - 2`.
    Skipped,
}

/// Compares the algebra generated by `T(n)`, `n <= max(p + 1, B)`, with the
/// one generated by the same operators with `p ∤ n`, so `T(p)` is among the
/// operators tested for redundancy.
pub fn t_p_redundancy_check(p: Prime, k: u64) -> Result<TpRedundancy> {
    if k < 2 || k + 2 > p.get() || k % 2 == 1 {
        return Ok(TpRedundancy::Skipped);
    }
    Ok(if prime_to_p_generates(p, k)? {
        TpRedundancy::Redundant
    } else {
        TpRedundancy::NotRedundant
    })
}

/// The comparison behind [`t_p_redundancy_check`], without the weight gate.
pub fn prime_to_p_generates(p: Prime, k: u64) -> Result<bool> {
    let bound = (p.get() as usize + 1).max(generator_bound(k));
    let module = HeckeModule::for_weight(p, k, false, bound)?;
    Ok(module.algebra().dim() == module.algebra_prime_to_p().dim())
}

/// Summary of the Hecke computations at one `(p, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeReport {
    pub p: u64,
    pub k: u64,
    pub dim: usize,
    pub precision: usize,
    pub generator_bound: usize,
    pub algebra_dim: usize,
    pub eis_local_dim: usize,
    pub cusp_local_dim: usize,
    pub ordinary_dim: usize,
    pub duality_rank: usize,
    /// Perfectness is only claimed for `k ≢ 0 mod p-1`.
    pub duality_perfect_expected: bool,
    pub duality_perfect: bool,
    pub commutative: bool,
    pub excludes_constants: bool,
    pub tp_redundant: TpRedundancy,
}

pub fn hecke_report(p: Prime, k: u64) -> Result<HeckeReport> {
    let pv = p.get();
    let bound = generator_bound(k);
    let module = HeckeModule::for_weight(p, k, false, bound)?;
    let algebra = module.algebra();
    let pairing = module.duality_pairing_matrix(&algebra.basis);
    let duality_rank = pairing.rank();
    let piece = module.localize()?;
    let cusp = HeckeModule::for_weight(p, k, true, bound)?.localize()?;
    let ordinary = HeckeModule::for_weight(p, k, false, (pv as usize).max(bound))?;
    let e0 = ordinary.ordinary_projector()?;
    Ok(HeckeReport {
        p: pv,
        k,
        dim: module.dim(),
        precision: module.space().precision(),
        generator_bound: bound,
        algebra_dim: algebra.dim(),
        eis_local_dim: piece.dim(),
        cusp_local_dim: cusp.dim(),
        ordinary_dim: e0.rank(),
        duality_rank,
        duality_perfect_expected: k >= 2 && !k.is_multiple_of(pv - 1),
        duality_perfect: duality_rank == module.dim() && algebra.dim() == module.dim(),
        commutative: module.all_commute(),
        excludes_constants: piece.excludes_constants(module.space()),
        tp_redundant: t_p_redundancy_check(p, k)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{delta_q, eisenstein_q, miller_basis};

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn t1_is_identity() {
        let m = Modulus::field(prime(37));
        let s = miller_basis(24, 40, m).unwrap();
        assert_eq!(hecke_coeff_action(&s.rows()[1], 1).unwrap(), s.rows()[1]);
        assert_eq!(hecke_matrix(&s, 1).unwrap().matrix, MatFp::identity(37, 3));
    }

    #[test]
    fn delta_t2_eigenvalue() {
        let m = Modulus::field(Prime::new(1_000_003).unwrap());
        let d = delta_q(41, m);
        let img = hecke_coeff_action(&d, 2).unwrap();
        assert_eq!(img.precision(), 21);
        assert_eq!(img, d.scale(crate::arith::reduce_i64(-24, m.value())).truncate(21));
    }

    #[test]
    fn eisenstein_is_eigen() {
        let m = Modulus::field(prime(41));
        let e = eisenstein_q(10, 60, m).unwrap();
        for n in 1..6u64 {
            let img = hecke_coeff_action(&e, n).unwrap();
            let expect = e.scale(sigma_mod(n, 9, 41)).truncate(img.precision());
            assert_eq!(img, expect, "n = {n}");
        }
    }

    #[test]
    fn precision_is_enforced() {
        let m = Modulus::field(prime(11));
        let s = miller_basis(12, 3, m).unwrap();
        assert!(matches!(
            hecke_matrix(&s, 2),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn weight_four_is_scalar() {
        let module = HeckeModule::for_weight(prime(37), 4, false, 5).unwrap();
        for n in 1..=5u64 {
            assert_eq!(module.op(n).get(0, 0), sigma_mod(n, 3, 37));
        }
        assert_eq!(module.algebra().dim(), 1);
    }

    #[test]
    fn weight_twelve_eigenvalues() {
        let p = 13u64;
        let module = HeckeModule::for_weight(prime(p), 12, false, 2).unwrap();
        let t2 = module.op(2);
        // characteristic polynomial (x - sigma_11(2)) (x - tau(2))
        let e = MatFp::scalar(p, 2, sigma_mod(2, 11, p));
        let c = MatFp::scalar(p, 2, crate::arith::reduce_i64(-24, p));
        assert!(t2.sub(&e).mul(&t2.sub(&c)).is_zero());
        assert_eq!(module.algebra().dim(), 2);
    }

    #[test]
    fn duality_rank_weight_12_mod_11() {
        let module = HeckeModule::for_weight(prime(11), 12, false, 2).unwrap();
        let alg = module.algebra();
        assert_eq!(module.duality_pairing_matrix(&alg.basis).rank(), 2);
    }

    #[test]
    fn local_piece_at_irregular_pair() {
        let module = HeckeModule::for_weight(prime(37), 32, false, generator_bound(32)).unwrap();
        assert!(module.all_commute());
        let piece = module.localize().unwrap();
        assert!(piece.dim() >= 2);
        assert!(piece.excludes_constants(module.space()));
        let regular = HeckeModule::for_weight(prime(37), 4, false, 1).unwrap();
        assert_eq!(regular.localize().unwrap().dim(), 1);
    }

    #[test]
    fn ordinary_projector_fixes_eisenstein() {
        let module = HeckeModule::for_weight(prime(11), 16, false, 11).unwrap();
        let e0 = module.ordinary_projector().unwrap();
        assert_eq!(e0.mul(&e0), e0);
        for o in module.ops() {
            assert!(e0.commutes_with(&o.matrix));
        }
        let space = module.space();
        let e = eisenstein_q(16, space.precision(), space.modulus()).unwrap();
        let c = space.membership(&e).unwrap().unwrap();
        assert_eq!(e0.apply(&c), c);
    }

    #[test]
    fn redundancy_small_cases() {
        assert_eq!(t_p_redundancy_check(prime(11), 4).unwrap(), TpRedundancy::Redundant);
        assert_eq!(t_p_redundancy_check(prime(13), 10).unwrap(), TpRedundancy::Redundant);
        assert!(prime_to_p_generates(prime(11), 12).unwrap());
        assert_eq!(t_p_redundancy_check(prime(11), 10).unwrap(), TpRedundancy::Skipped);
    }
}
