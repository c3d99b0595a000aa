//! The θ-operator, filtration, and companion forms.
//!
//! `f` of weight `k` and `g` of weight `k' = p + 1 - k` are companions when
//! `θ^{k'} f = θ g`. Both sides live in weight `W = k + k'(p + 1)` of the
//! graded ring of mod-p forms, so comparing `floor(W/12) + 1` coefficients
//! decides the relation. Only q-expansions of the two small weights are ever
//! built; nothing is materialized at weight `W`.

use serde::{Deserialize, Serialize};

use crate::arith::{mul_mod, pow_mod, sigma_mod, sub_mod, Prime};
use crate::forms::{form_space, miller_basis, sturm, FormSpace, PrecisionPlan};
use crate::hecke::{generator_bound, EisLocalPiece, HeckeModule};
use crate::linalg::{MatFp, Subspace};
use crate::qseries::{Modulus, QSeries};
use crate::{Error, Result};

/// `θ^j f` with its graded weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaImage {
    pub source_weight: u64,
    pub iterate: u64,
    pub series: QSeries,
}

/// `a(n) -> n^j a(n)`; the weight tag grows by `j(p + 1)`.
pub fn theta(f: &QSeries, j: u64) -> ThetaImage {
    let p = f.modulus().prime().get();
    ThetaImage {
        source_weight: f.weight(),
        iterate: j,
        series: f
            .scale_by_index_power(j)
            .with_weight(f.weight() + j * (p + 1)),
    }
}

/// Least `k0 >= 0`, `k0 ≡ k mod p-1`, such that `f` (a form of weight `k`
/// over `F_p`) is a form of weight `k0`. Membership is tested at the Sturm
/// bound of `k`, where forms of weights `k0` and `k` can be compared after
/// multiplying by a power of `E_{p-1} ≡ 1`.
pub fn filtration(f: &QSeries, k: u64) -> Result<u64> {
    if f.is_zero() {
        return Err(Error::ZeroInput("filtration of the zero series"));
    }
    let modulus = f.modulus();
    let p = modulus.prime().get();
    let needed = sturm(k);
    if f.precision() < needed {
        return Err(Error::InsufficientPrecision {
            needed,
            have: f.precision(),
        });
    }
    let f = f.truncate(needed);
    let mut k0 = k % (p - 1);
    while k0 <= k {
        let space = miller_basis(k0, needed, modulus)?;
        if space.dim() > 0 && space.coordinates_checked(&f, needed)?.is_some() {
            return Ok(k0);
        }
        k0 += p - 1;
    }
    Err(Error::NotMember(format!("series is not a form of weight {k}")))
}

/// Weights `(a, b)` with `a + b = p + 1` and the plan for `θ^b (weight a) = θ (weight b)`.
pub fn companion_plan(p: Prime, a: u64) -> Result<(u64, PrecisionPlan)> {
    let pv = p.get();
    if a < 2 || a + 2 > pv + 1 || a % 2 == 1 {
        return Err(Error::OutOfRange {
            k: a as i64,
            lo: 2,
            hi: pv as i64 - 1,
        });
    }
    let b = pv + 1 - a;
    let w = a + b * (pv + 1);
    Ok((b, PrecisionPlan::for_weight("companion", &[a, b], w)))
}

/// The matrix whose kernel is `{(x, y) : θ^b (sum x_i f_i) = θ (sum y_l h_l)}`
/// on coefficients `1..bound`.
fn companion_system(p: u64, b: u64, sources: &[QSeries], targets: &[QSeries], bound: usize) -> MatFp {
    let (ns, nt) = (sources.len(), targets.len());
    MatFp::from_fn(p, bound.saturating_sub(1), ns + nt, |row, col| {
        let n = row as u64 + 1;
        if col < ns {
            mul_mod(pow_mod(n, b, p), sources[col].coeff(n as usize), p)
        } else {
            sub_mod(0, mul_mod(n % p, targets[col - ns].coeff(n as usize), p), p)
        }
    })
}

/// Solves `θ^{k'} f = θ g` for `g` in `M_{k'}(F_p)`. `f` must carry the
/// plan's number of coefficients. Returns `g`'s coordinates.
pub fn has_companion(f: &QSeries, k: u64) -> Result<Option<Vec<u64>>> {
    let p = f.modulus().prime();
    let (kp, plan) = companion_plan(p, k)?;
    if f.precision() < plan.bound {
        return Err(Error::InsufficientPrecision {
            needed: plan.bound,
            have: f.precision(),
        });
    }
    let targets = form_space(kp, plan.bound, f.modulus())?;
    let sys = companion_system(p.get(), kp, std::slice::from_ref(f), targets.rows(), plan.bound);
    // columns: [f | -h_l]; we need y with sum_l y_l (-n h_l(n)) = -n^{k'} f(n)
    let a = MatFp::from_fn(p.get(), sys.rows(), targets.dim(), |i, j| sys.get(i, j + 1));
    let rhs: Vec<u64> = (0..sys.rows()).map(|i| sub_mod(0, sys.get(i, 0), p.get())).collect();
    a.solve(&rhs)
}

/// One companion pair: coordinates of `f` (weight `a`) and `g` (weight `b`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub f: Vec<u64>,
    pub g: Vec<u64>,
}

/// `{f in piece : f has a companion}` and a basis of witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompanionSpace {
    pub weight: u64,
    pub other_weight: u64,
    pub piece_dim: usize,
    pub dimension: usize,
    pub witnesses: Vec<Witness>,
    pub plan: PrecisionPlan,
}

/// `c` for an Eisenstein-local piece of weight `a`: the dimension of the
/// subspace whose `θ^{p+1-a}` image lies in `θ(M_{p+1-a})`.
pub fn companion_dimension(piece: &EisLocalPiece, precision: Option<usize>) -> Result<CompanionSpace> {
    let p = Prime::new(piece.p)?;
    let (b, plan) = companion_plan(p, piece.k)?;
    let plan = plan.with_override(precision);
    let modulus = Modulus::field(p);
    let source_space = form_space(piece.k, plan.bound, modulus)?;
    let target_space = form_space(b, plan.bound, modulus)?;
    let sources: Vec<QSeries> = piece
        .subspace
        .basis()
        .iter()
        .map(|x| source_space.combination(x))
        .collect();
    let sys = companion_system(p.get(), b, &sources, target_space.rows(), plan.bound);
    let ker = sys.kernel();
    // kernel rows are in echelon form, so those with a pivot among the
    // source columns have independent source parts
    let ns = sources.len();
    let mut witnesses = Vec::new();
    for r in 0..ker.rows() {
        let row = ker.row(r);
        let Some(lead) = row.iter().position(|&c| c != 0) else {
            continue;
        };
        if lead >= ns {
            continue;
        }
        let x = &row[..ns];
        // back to ambient coordinates
        let mut f = vec![0u64; source_space.dim()];
        for (xi, basis_vec) in x.iter().zip(piece.subspace.basis()) {
            for (fj, &bj) in f.iter_mut().zip(basis_vec) {
                *fj = (*fj + mul_mod(*xi, bj, p.get())) % p.get();
            }
        }
        witnesses.push(Witness {
            f,
            g: row[ns..].to_vec(),
        });
    }
    Ok(CompanionSpace {
        weight: piece.k,
        other_weight: b,
        piece_dim: piece.dim(),
        dimension: witnesses.len(),
        witnesses,
        plan,
    })
}

/// `θ^{k'} E_k ≡ θ E_{k'}` on the coefficients of the companion plan.
/// Both series are taken in the normalization with `a(n) = sigma_{k-1}(n)`;
/// `θ` kills the constant terms, so only positive indices enter.
pub fn eisenstein_companion_identity(p: Prime, k: u64) -> Result<bool> {
    let (kp, plan) = companion_plan(p, k)?;
    let m = Modulus::field(p);
    let lhs = theta(&eisenstein_tail(k, plan.bound, m), kp).series;
    let rhs = theta(&eisenstein_tail(kp, plan.bound, m), 1).series;
    Ok((1..plan.bound).all(|n| lhs.coeff(n) == rhs.coeff(n)))
}

/// `sum_{n >= 1} sigma_{k-1}(n) q^n`, the part of `E_k` that survives `θ`.
fn eisenstein_tail(k: u64, precision: usize, m: Modulus) -> QSeries {
    QSeries::from_fn(m, k, precision, |n| {
        if n == 0 {
            0
        } else {
            sigma_mod(n as u64, k - 1, m.value())
        }
    })
}

/// `f` in the m-local piece implies `g` in the m'-local piece.
pub fn mirror_check(f: &[u64], g: &[u64], piece_m: &EisLocalPiece, piece_m_prime: &EisLocalPiece) -> bool {
    !piece_m.contains(f) || piece_m_prime.contains(g)
}

/// `dim ker θ` on `M_w(F_p)`, judged at the Sturm bound of `w + p + 1`.
pub fn theta_kernel_dim(p: Prime, w: u64) -> Result<usize> {
    let bound = sturm(w + p.get() + 1);
    let space = form_space(w, bound.max(sturm(w)), Modulus::field(p))?;
    let pv = p.get();
    let m = MatFp::from_fn(pv, bound.saturating_sub(1), space.dim(), |row, col| {
        let n = row + 1;
        mul_mod(n as u64 % pv, space.rows()[col].coeff(n), pv)
    });
    Ok(space.dim() - m.rank())
}

/// Companion data at an Eisenstein pair `(k, k')`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompanionReport {
    pub p: u64,
    pub k: u64,
    pub k_prime: u64,
    pub local_dim_m: usize,
    pub local_dim_m_prime: usize,
    pub c_m: usize,
    pub c_m_prime: usize,
    pub witnesses_m: Vec<Witness>,
    pub witnesses_m_prime: Vec<Witness>,
    pub plan_m: PrecisionPlan,
    pub plan_m_prime: PrecisionPlan,
    pub eisenstein_identity: bool,
    pub mirror_ok: bool,
    pub symmetry_ok: bool,
    pub theta_kernel_trivial: bool,
    /// `c_m <= c_m'`, with equality required for `k != p - 1`.
    pub dimensions_consistent: bool,
}

impl CompanionReport {
    pub fn all_hold(&self) -> bool {
        self.eisenstein_identity
            && self.mirror_ok
            && self.symmetry_ok
            && self.theta_kernel_trivial
            && self.dimensions_consistent
            && self.c_m >= 1
            && self.c_m_prime >= 1
    }
}

/// Both Eisenstein-local pieces at `(k, p + 1 - k)`.
pub fn local_pieces(p: Prime, k: u64) -> Result<(EisLocalPiece, EisLocalPiece)> {
    let kp = p.get() + 1 - k;
    let m = HeckeModule::for_weight(p, k, false, generator_bound(k))?.localize()?;
    let mp = HeckeModule::for_weight(p, kp, false, generator_bound(kp))?.localize()?;
    Ok((m, mp))
}

fn check_scope(p: Prime, k: u64) -> Result<()> {
    let pv = p.get();
    if k % 2 == 1 {
        return Err(Error::InvalidWeight {
            k: k as i64,
            reason: "odd weight",
        });
    }
    if k < 4 || k + 3 > pv {
        return Err(Error::OutOfRange {
            k: k as i64,
            lo: 4,
            hi: pv as i64 - 3,
        });
    }
    Ok(())
}

/// Symmetric form of a witness: `θ^k g = θ f` on the given coefficients.
fn symmetric_relation_holds(
    w: &Witness,
    f_space: &FormSpace,
    g_space: &FormSpace,
    f_weight: u64,
    bound: usize,
) -> bool {
    let f = f_space.combination(&w.f);
    let g = g_space.combination(&w.g);
    let lhs = theta(&g, f_weight).series;
    let rhs = theta(&f, 1).series;
    (1..bound).all(|n| lhs.coeff(n) == rhs.coeff(n))
}

/// Companion dimensions on both sides of the pair `(k, p + 1 - k)` with all
/// the consistency checks, for even `4 <= k <= p - 3`.
pub fn companion_report(p: Prime, k: u64, precision: Option<usize>) -> Result<CompanionReport> {
    check_scope(p, k)?;
    let pv = p.get();
    let kp = pv + 1 - k;
    let (piece_m, piece_mp) = local_pieces(p, k)?;
    let side_m = companion_dimension(&piece_m, precision)?;
    let side_mp = companion_dimension(&piece_mp, precision)?;

    let m = Modulus::field(p);
    let top = side_m.plan.bound.max(side_mp.plan.bound);
    let space_k = form_space(k, top, m)?;
    let space_kp = form_space(kp, top, m)?;

    let mirror_ok = side_m
        .witnesses
        .iter()
        .all(|w| mirror_check(&w.f, &w.g, &piece_m, &piece_mp))
        && side_mp
            .witnesses
            .iter()
            .all(|w| mirror_check(&w.f, &w.g, &piece_mp, &piece_m));
    let symmetry_ok = side_m
        .witnesses
        .iter()
        .all(|w| symmetric_relation_holds(w, &space_k, &space_kp, k, side_mp.plan.bound))
        && side_mp
            .witnesses
            .iter()
            .all(|w| symmetric_relation_holds(w, &space_kp, &space_k, kp, side_m.plan.bound));
    let (c_m, c_mp) = (side_m.dimension, side_mp.dimension);
    let dimensions_consistent = c_m <= c_mp && (k == pv - 1 || c_m == c_mp);

    Ok(CompanionReport {
        p: pv,
        k,
        k_prime: kp,
        local_dim_m: piece_m.dim(),
        local_dim_m_prime: piece_mp.dim(),
        c_m,
        c_m_prime: c_mp,
        witnesses_m: side_m.witnesses,
        witnesses_m_prime: side_mp.witnesses,
        plan_m: side_m.plan,
        plan_m_prime: side_mp.plan,
        eisenstein_identity: eisenstein_companion_identity(p, k)?,
        mirror_ok,
        symmetry_ok,
        theta_kernel_trivial: theta_kernel_dim(p, kp)? == 0,
        dimensions_consistent,
    })
}

/// Span of the `f`-parts of a list of witnesses.
pub fn witness_span(p: u64, ambient: usize, witnesses: &[Witness]) -> Subspace {
    let v: Vec<Vec<u64>> = witnesses.iter().map(|w| w.f.clone()).collect();
    Subspace::span(p, ambient, &v)
}
