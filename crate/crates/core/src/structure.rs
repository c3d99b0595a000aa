//! Finite-dimensional commutative local algebras over `F_p`: socles,
//! Gorenstein tests, minimal generators of ideals, and the Eisenstein-local
//! structure report.

use serde::{Deserialize, Serialize};

use crate::arith::{add_mod, mul_mod, Prime};
use crate::companion::{companion_dimension, local_pieces};
use crate::hecke::{generator_bound, EisLocalPiece, HeckeModule};
use crate::linalg::{algebra_closure, matrix_coordinates, MatFp, Subspace};
use crate::{Error, Result};

/// A commutative algebra with basis `b_0 = 1, b_1, ...`, structure constants
/// `b_i b_j = sum_l table[i][j][l] b_l`, and generators of a candidate
/// maximal ideal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalAlgebra {
    p: u64,
    table: Vec<Vec<Vec<u64>>>,
    identity: Vec<u64>,
    generators: Vec<Vec<u64>>,
}

impl LocalAlgebra {
    /// Validates shape, commutativity, the identity, and associativity on
    /// the basis.
    pub fn from_table(
        p: u64,
        table: Vec<Vec<Vec<u64>>>,
        identity: Vec<u64>,
        generators: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let n = table.len();
        let shape_ok = table
            .iter()
            .all(|row| row.len() == n && row.iter().all(|v| v.len() == n))
            && identity.len() == n
            && generators.iter().all(|g| g.len() == n);
        if !shape_ok {
            return Err(Error::DimensionMismatch("ragged multiplication table".into()));
        }
        let alg = LocalAlgebra {
            p,
            table,
            identity,
            generators,
        };
        for i in 0..n {
            let bi = alg.unit_vector(i);
            if alg.mul(&alg.identity, &bi) != bi {
                return Err(Error::DimensionMismatch("identity element fails".into()));
            }
            for j in 0..n {
                if alg.table[i][j] != alg.table[j][i] {
                    return Err(Error::NonCommuting);
                }
                let bj = alg.unit_vector(j);
                for l in 0..n {
                    let bl = alg.unit_vector(l);
                    if alg.mul(&alg.mul(&bi, &bj), &bl) != alg.mul(&bi, &alg.mul(&bj, &bl)) {
                        return Err(Error::DimensionMismatch("multiplication is not associative".into()));
                    }
                }
            }
        }
        Ok(alg)
    }

    /// From a linear basis of commuting matrices (identity first) and
    /// generators of the maximal ideal, all as matrices.
    pub fn from_matrices(p: u64, basis: &[MatFp], generators: &[MatFp]) -> Result<Self> {
        let coords = |m: &MatFp| {
            matrix_coordinates(basis, m)
                .ok_or_else(|| Error::NotMember("element outside the algebra".into()))
        };
        let table = basis
            .iter()
            .map(|a| basis.iter().map(|b| coords(&a.mul(b))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let n = basis[0].rows();
        let identity = coords(&MatFp::identity(p, n))?;
        let generators = generators.iter().map(coords).collect::<Result<Vec<_>>>()?;
        LocalAlgebra::from_table(p, table, identity, generators)
    }

    /// `F_p[x]/(x^n)` with maximal ideal `(x)`.
    pub fn truncated_polynomial(p: u64, n: usize) -> Self {
        let table = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut v = vec![0; n];
                        if i + j < n {
                            v[i + j] = 1;
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let mut identity = vec![0; n];
        identity[0] = 1;
        let generators = if n > 1 {
            let mut x = vec![0; n];
            x[1] = 1;
            vec![x]
        } else {
            Vec::new()
        };
        LocalAlgebra {
            p,
            table,
            identity,
            generators,
        }
    }

    /// `F_p[x, y]/(x, y)^2`, whose socle is two-dimensional.
    pub fn socle_two_fixture(p: u64) -> Self {
        let mut table = vec![vec![vec![0u64; 3]; 3]; 3];
        for (i, row) in table.iter_mut().enumerate() {
            row[0][i] = 1;
        }
        for (i, v) in table[0].iter_mut().enumerate() {
            v[i] = 1;
        }
        LocalAlgebra {
            p,
            table,
            identity: vec![1, 0, 0],
            generators: vec![vec![0, 1, 0], vec![0, 0, 1]],
        }
    }

    pub fn dim(&self) -> usize {
        self.table.len()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    fn unit_vector(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim()];
        v[i] = 1;
        v
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (n, p) = (self.dim(), self.p);
        let mut out = vec![0u64; n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let c = mul_mod(ai, bj, p);
                for (o, &t) in out.iter_mut().zip(&self.table[i][j]) {
                    if t != 0 {
                        *o = add_mod(*o, mul_mod(c, t, p), p);
                    }
                }
            }
        }
        out
    }

    /// The ideal generated by `gens`.
    pub fn ideal(&self, gens: &[Vec<u64>]) -> Subspace {
        let mut v = Vec::new();
        for g in gens {
            for i in 0..self.dim() {
                v.push(self.mul(g, &self.unit_vector(i)));
            }
        }
        Subspace::span(self.p, self.dim(), &v)
    }

    /// `I J`.
    pub fn ideal_product(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut v = Vec::new();
        for x in a.basis() {
            for y in b.basis() {
                v.push(self.mul(x, y));
            }
        }
        Subspace::span(self.p, self.dim(), &v)
    }

    pub fn maximal_ideal(&self) -> Subspace {
        self.ideal(&self.generators)
    }

    /// The generators span an ideal of codimension 1 that is nilpotent.
    pub fn is_local(&self) -> bool {
        let m = self.maximal_ideal();
        if m.dim() + 1 != self.dim() {
            return false;
        }
        let mut power = m.clone();
        while power.dim() > 0 {
            let next = self.ideal_product(&power, &m);
            if next.dim() == power.dim() {
                return false;
            }
            power = next;
        }
        true
    }

    fn require_local(&self) -> Result<()> {
        if self.is_local() {
            Ok(())
        } else {
            Err(Error::NonLocal(format!(
                "algebra of dimension {} is not local with the given generators",
                self.dim()
            )))
        }
    }

    /// `dim Ann(m)`.
    pub fn socle_dim(&self) -> Result<usize> {
        self.require_local()?;
        let n = self.dim();
        let blocks: Vec<MatFp> = self
            .generators
            .iter()
            .map(|g| {
                let cols: Vec<Vec<u64>> = (0..n).map(|i| self.mul(&self.unit_vector(i), g)).collect();
                MatFp::from_columns(self.p, n, &cols)
            })
            .collect();
        if blocks.is_empty() {
            return Ok(n);
        }
        let stacked = MatFp::vstack(self.p, n, &blocks);
        Ok(n - stacked.rank())
    }

    pub fn is_gorenstein(&self) -> Result<bool> {
        Ok(self.socle_dim()? == 1)
    }

    /// `dim I/mI`, the minimal number of generators of `I`.
    pub fn min_generators(&self, ideal: &Subspace) -> usize {
        let mi = self.ideal_product(&self.maximal_ideal(), ideal);
        ideal.dim() - mi.dim()
    }
}

/// The algebra generated by the restricted Hecke operators on a nonzero
/// local piece, with maximal ideal generated by the restricted `eta(n)`.
pub fn restrict_algebra(piece: &EisLocalPiece) -> Result<LocalAlgebra> {
    if piece.dim() == 0 {
        return Err(Error::ZeroInput("local piece is zero"));
    }
    let p = piece.p;
    let basis = algebra_closure(p, piece.dim(), &piece.restricted);
    let alg = LocalAlgebra::from_matrices(p, &basis, &piece.etas())?;
    alg.require_local()?;
    Ok(alg)
}

/// `dim S - dim (m S)` for the cuspidal piece; the module is cyclic iff 1.
pub fn module_generators(piece: &EisLocalPiece) -> usize {
    let mut v = Vec::new();
    for eta in piece.etas() {
        for j in 0..eta.cols() {
            v.push(eta.column(j));
        }
    }
    piece.dim() - Subspace::span(piece.p, piece.dim(), &v).dim()
}

/// `dim(M-local) - 1 = dim(S-local)`.
pub fn quotient_dual_dimension_identity(dim_m: usize, dim_s: usize) -> bool {
    dim_m == dim_s + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The cuspidal piece is zero.
    Regular,
    /// All checked conditions agree.
    Consistent,
    /// Some asserted implication failed.
    Contradiction,
    /// `c(m') != 1`; conditions reported, nothing asserted.
    Unasserted,
}

/// Structure of the Eisenstein-local Hecke algebras at `(p, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub p: u64,
    pub k: u64,
    pub k_prime: u64,
    pub dim_m_local: usize,
    pub dim_s_local: usize,
    pub c_m: usize,
    pub c_m_prime: usize,
    pub algebra_dim_full: usize,
    pub socle_dim_full: usize,
    pub gorenstein_full: bool,
    /// `None` when the cuspidal piece is zero.
    pub socle_dim_cusp: Option<usize>,
    pub gorenstein_cusp: Option<bool>,
    pub cusp_module_cyclic: Option<bool>,
    /// Minimal generators of the Eisenstein ideal image: the maximal ideal
    /// of the full local algebra mod `p`.
    pub eis_ideal_min_gens: usize,
    /// The maximal ideal of the cuspidal local algebra, for comparison.
    pub eis_ideal_min_gens_cusp: Option<usize>,
    pub dim_identity: bool,
    pub complete_intersection: String,
    pub equivalence_verified: Option<bool>,
    pub verdict: Verdict,
    pub failures: Vec<String>,
}

impl StructureReport {
    pub fn assertions_hold(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn csv_header() -> &'static [&'static str] {
        &["p", "k", "dimM_m", "dimS_m", "c_m'", "gor_H", "gor_h", "min_gens"]
    }

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.p.to_string(),
            self.k.to_string(),
            self.dim_m_local.to_string(),
            self.dim_s_local.to_string(),
            self.c_m_prime.to_string(),
            self.gorenstein_full.to_string(),
            self.gorenstein_cusp.map_or(String::new(), |b| b.to_string()),
            self.eis_ideal_min_gens.to_string(),
        ]
    }
}

fn check_scope(p: Prime, k: u64) -> Result<()> {
    if k % 2 == 1 {
        return Err(Error::InvalidWeight {
            k: k as i64,
            reason: "odd weight",
        });
    }
    if k < 4 || k + 3 > p.get() {
        return Err(Error::OutOfRange {
            k: k as i64,
            lo: 4,
            hi: p.get() as i64 - 3,
        });
    }
    Ok(())
}

/// Computes every testable condition at `(p, k)` and, when `c(m') = 1`,
/// asserts: the full local algebra is Gorenstein; the cuspidal local
/// algebra is Gorenstein exactly when the cuspidal module is cyclic and
/// exactly when the Eisenstein ideal image is principal; and the dimension
/// identity holds.
pub fn verify_eisenstein_equivalences(p: Prime, k: u64) -> Result<StructureReport> {
    verify_with_override(p, k, None)
}

/// As [`verify_eisenstein_equivalences`], with the full local algebra
/// replaced by `full`. Used to check that the assertions can fail.
pub fn verify_with_override(p: Prime, k: u64, full: Option<LocalAlgebra>) -> Result<StructureReport> {
    check_scope(p, k)?;
    let bound = generator_bound(k);
    let (piece_m, piece_mp) = local_pieces(p, k)?;
    let piece_s = HeckeModule::for_weight(p, k, true, bound)?.localize()?;
    let c_m = companion_dimension(&piece_m, None)?.dimension;
    let c_m_prime = companion_dimension(&piece_mp, None)?.dimension;

    let h_full = match full {
        Some(a) => a,
        None => restrict_algebra(&piece_m)?,
    };
    let socle_dim_full = h_full.socle_dim()?;
    let eis_ideal_min_gens = h_full.min_generators(&h_full.maximal_ideal());

    let cusp = if piece_s.dim() > 0 {
        let h = restrict_algebra(&piece_s)?;
        let socle = h.socle_dim()?;
        let gens = h.min_generators(&h.maximal_ideal());
        Some((socle, module_generators(&piece_s) == 1, gens))
    } else {
        None
    };

    let dim_identity = quotient_dual_dimension_identity(piece_m.dim(), piece_s.dim());
    let gorenstein_full = socle_dim_full == 1;
    let mut failures = Vec::new();
    let mut equivalence_verified = None;
    if c_m_prime == 1 {
        if !gorenstein_full {
            failures.push(format!(
                "full local algebra is not Gorenstein (socle dimension {socle_dim_full})"
            ));
        }
        if !dim_identity {
            failures.push(format!(
                "dim M-local - 1 = {} but dim S-local = {}",
                piece_m.dim() as i64 - 1,
                piece_s.dim()
            ));
        }
        if let Some((socle, cyclic, _)) = cusp {
            let gor = socle == 1;
            let principal = eis_ideal_min_gens == 1;
            let agree = gor == cyclic && cyclic == principal;
            if !agree {
                failures.push(format!(
                    "cuspidal Gorenstein = {gor}, cyclic module = {cyclic}, principal ideal = {principal}"
                ));
            }
            equivalence_verified = Some(agree);
        }
    }
    let verdict = if !failures.is_empty() {
        Verdict::Contradiction
    } else if c_m_prime != 1 {
        Verdict::Unasserted
    } else if cusp.is_none() {
        Verdict::Regular
    } else {
        Verdict::Consistent
    };
    Ok(StructureReport {
        p: p.get(),
        k,
        k_prime: p.get() + 1 - k,
        dim_m_local: piece_m.dim(),
        dim_s_local: piece_s.dim(),
        c_m,
        c_m_prime,
        algebra_dim_full: h_full.dim(),
        socle_dim_full,
        gorenstein_full,
        socle_dim_cusp: cusp.map(|c| c.0),
        gorenstein_cusp: cusp.map(|c| c.0 == 1),
        cusp_module_cyclic: cusp.map(|c| c.1),
        eis_ideal_min_gens,
        eis_ideal_min_gens_cusp: cusp.map(|c| c.2),
        dim_identity,
        complete_intersection: "not evaluated".into(),
        equivalence_verified,
        verdict,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn socle_of_small_algebras() {
        assert_eq!(LocalAlgebra::truncated_polynomial(5, 1).socle_dim().unwrap(), 1);
        assert_eq!(LocalAlgebra::truncated_polynomial(5, 2).socle_dim().unwrap(), 1);
        assert_eq!(LocalAlgebra::truncated_polynomial(5, 4).socle_dim().unwrap(), 1);
        let f = LocalAlgebra::socle_two_fixture(5);
        assert_eq!(f.socle_dim().unwrap(), 2);
        assert!(!f.is_gorenstein().unwrap());
    }

    #[test]
    fn fixture_socle_by_brute_force() {
        let f = LocalAlgebra::socle_two_fixture(5);
        let mut count = 0;
        for a in 0..5u64 {
            for b in 0..5 {
                for c in 0..5 {
                    let v = [a, b, c];
                    if f.generators().iter().all(|g| f.mul(&v, g).iter().all(|&x| x == 0)) {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 25);
    }

    #[test]
    fn min_generators_in_truncated_polynomials() {
        let a = LocalAlgebra::truncated_polynomial(7, 3);
        let x = vec![0, 1, 0];
        assert_eq!(a.min_generators(&a.ideal(&[x])), 1);
        assert_eq!(a.min_generators(&a.ideal(&[])), 0);
        let f = LocalAlgebra::socle_two_fixture(7);
        assert_eq!(f.min_generators(&f.maximal_ideal()), 2);
    }

    #[test]
    fn product_algebra_is_not_local() {
        // F_p x F_p as diagonal matrices, maximal-ideal candidate diag(0, 1)
        let p = 5;
        let basis = vec![MatFp::identity(p, 2), MatFp::from_rows(p, &[vec![0, 0], vec![0, 1]])];
        let a = LocalAlgebra::from_matrices(p, &basis, &basis[1..]).unwrap();
        assert!(!a.is_local());
        assert!(matches!(a.socle_dim(), Err(Error::NonLocal(_))));
    }

    #[test]
    fn non_commutative_table_rejected() {
        let mut t = LocalAlgebra::socle_two_fixture(5).table;
        t[1][2] = vec![0, 1, 0];
        assert!(LocalAlgebra::from_table(5, t, vec![1, 0, 0], vec![]).is_err());
    }

    #[test]
    fn irregular_pair_37_32() {
        let r = verify_eisenstein_equivalences(Prime::new(37).unwrap(), 32).unwrap();
        assert_eq!(r.c_m_prime, 1);
        assert!(r.gorenstein_full);
        assert_eq!(r.eis_ideal_min_gens, 1);
        assert!(r.dim_identity);
        assert_eq!(r.verdict, Verdict::Consistent, "{r:?}");
    }

    #[test]
    fn regular_pair_is_trivial() {
        let r = verify_eisenstein_equivalences(Prime::new(37).unwrap(), 12).unwrap();
        assert_eq!(r.dim_m_local, 1);
        assert_eq!(r.dim_s_local, 0);
        assert_eq!(r.verdict, Verdict::Regular);
    }

    #[test]
    fn injected_fault_is_flagged() {
        let p = Prime::new(37).unwrap();
        let r = verify_with_override(p, 32, Some(LocalAlgebra::socle_two_fixture(37))).unwrap();
        assert!(!r.assertions_hold());
        assert_eq!(r.verdict, Verdict::Contradiction);
    }
}
