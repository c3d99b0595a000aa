//! Dense linear algebra over `F_p`.
//!
//! Matrices act on column vectors. Pivoting always takes the first nonzero
//! entry, so every output is reproducible bit for bit.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::arith::{add_mod, inv_mod, mul_mod, sub_mod};
use crate::{Error, Result};

/// A dense `rows × cols` matrix over `F_p`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatFp {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Result of row reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: MatFp,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl MatFp {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        MatFp {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = MatFp::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    pub fn scalar(p: u64, n: usize, c: u64) -> Self {
        let mut m = MatFp::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = c % p;
        }
        m
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|x| x % p));
        }
        MatFp {
            p,
            rows: r,
            cols: c,
            data,
        }
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(p: u64, rows: usize, cols: &[Vec<u64>]) -> Self {
        let mut m = MatFp::zeros(p, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &x) in col.iter().enumerate() {
                m.data[i * m.cols + j] = x % p;
            }
        }
        m
    }

    pub fn from_fn(p: u64, rows: usize, cols: usize, f: impl Fn(usize, usize) -> u64) -> Self {
        let mut m = MatFp::zeros(p, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j) % p;
            }
        }
        m
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries in row-major order.
    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> MatFp {
        MatFp::from_fn(self.p, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &MatFp) -> MatFp {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        assert_eq!(self.p, other.p);
        let p = self.p;
        let mut out = MatFp::zeros(p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = add_mod(out.data[idx], mul_mod(a, other.get(k, j), p), p);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| add_mod(acc, mul_mod(a, b, self.p), self.p))
            })
            .collect()
    }

    pub fn add(&self, other: &MatFp) -> MatFp {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| add_mod(a, b, self.p))
            .collect();
        MatFp { data, ..*self }
    }

    pub fn sub(&self, other: &MatFp) -> MatFp {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| sub_mod(a, b, self.p))
            .collect();
        MatFp { data, ..*self }
    }

    pub fn scale(&self, c: u64) -> MatFp {
        let c = c % self.p;
        let data = self.data.iter().map(|&a| mul_mod(a, c, self.p)).collect();
        MatFp { data, ..*self }
    }

    pub fn pow(&self, mut e: u64) -> MatFp {
        assert!(self.is_square());
        let mut acc = MatFp::identity(self.p, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn commutes_with(&self, other: &MatFp) -> bool {
        self.mul(other) == other.mul(self)
    }

    /// Stack matrices with equal column counts on top of each other.
    pub fn vstack(p: u64, cols: usize, blocks: &[MatFp]) -> MatFp {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        MatFp { p, rows, cols, data }
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Rref {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..m.cols {
                    m.data.swap(piv * m.cols + j, r * m.cols + j);
                }
            }
            let inv = inv_mod(m.get(r, c), p).expect("nonzero entry of a prime field");
            for j in c..m.cols {
                let idx = r * m.cols + j;
                m.data[idx] = mul_mod(m.data[idx], inv, p);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let sub = mul_mod(f, m.data[r * m.cols + j], p);
                    let idx = i * m.cols + j;
                    m.data[idx] = sub_mod(m.data[idx], sub, p);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let rank = pivots.len();
        Rref {
            matrix: m,
            pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the null space `{v : A v = 0}`, one vector per row, itself in
    /// reduced echelon form.
    pub fn kernel(&self) -> MatFp {
        let p = self.p;
        let Rref { matrix, pivots, .. } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = MatFp::zeros(p, free.len(), self.cols);
        for (b, &f) in free.iter().enumerate() {
            basis.set(b, f, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                basis.set(b, pc, sub_mod(0, matrix.get(i, f), p));
            }
        }
        basis.rref().matrix
    }

    /// Some solution of `A x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[u64]) -> Result<Option<Vec<u64>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let p = self.p;
        let mut aug = MatFp::zeros(p, self.rows, self.cols + 1);
        for (i, &bi) in b.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, bi);
        }
        let Rref { matrix, pivots, .. } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = matrix.get(i, self.cols);
        }
        Ok(Some(x))
    }

    /// Inverse of a square matrix, if it is invertible.
    pub fn inverse(&self) -> Option<MatFp> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = MatFp::zeros(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let Rref { matrix, pivots, .. } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(MatFp::from_fn(self.p, n, n, |i, j| matrix.get(i, n + j)))
    }
}

/// A subspace of `F_p^n`, held as a reduced echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subspace {
    p: u64,
    ambient: usize,
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(p: u64, ambient: usize, vectors: &[Vec<u64>]) -> Self {
        if vectors.is_empty() {
            return Subspace {
                p,
                ambient,
                basis: Vec::new(),
                pivots: Vec::new(),
            };
        }
        let r = MatFp::from_rows(p, vectors).rref();
        let basis = (0..r.rank).map(|i| r.matrix.row(i).to_vec()).collect();
        Subspace {
            p,
            ambient,
            basis,
            pivots: r.pivots,
        }
    }

    pub fn whole(p: u64, n: usize) -> Self {
        Subspace::span(p, n, &MatFp::identity(p, n).row_vecs())
    }

    pub fn from_matrix_rows(m: &MatFp) -> Self {
        Subspace::span(m.p(), m.cols(), &m.row_vecs())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in the echelon basis, when `v` lies in the span.
    pub fn coordinates(&self, v: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(v.len(), self.ambient);
        let coords: Vec<u64> = self.pivots.iter().map(|&c| v[c] % self.p).collect();
        let mut rebuilt = vec![0u64; self.ambient];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (r, &x) in rebuilt.iter_mut().zip(b) {
                *r = add_mod(*r, mul_mod(*c, x, self.p), self.p);
            }
        }
        let matches = rebuilt.iter().zip(v).all(|(&a, &b)| a == b % self.p);
        matches.then_some(coords)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut v = self.basis.clone();
        v.extend_from_slice(&other.basis);
        Subspace::span(self.p, self.ambient, &v)
    }

    /// Matrix whose columns are the basis vectors.
    pub fn inclusion(&self) -> MatFp {
        MatFp::from_columns(self.p, self.ambient, &self.basis)
    }

    /// Matrix of an operator that preserves the subspace, in the echelon basis.
    pub fn restrict(&self, op: &MatFp) -> Result<MatFp> {
        let cols: Option<Vec<Vec<u64>>> = self
            .basis
            .iter()
            .map(|b| self.coordinates(&op.apply(b)))
            .collect();
        let cols = cols.ok_or_else(|| {
            Error::DimensionMismatch("operator does not preserve the subspace".into())
        })?;
        Ok(MatFp::from_columns(self.p, self.dim(), &cols))
    }
}

/// `∩_η ker(η^d)`: the common generalized kernel of commuting operators.
pub fn generalized_eigenspace(ops: &[MatFp], d: usize) -> Result<Subspace> {
    let Some(first) = ops.first() else {
        return Err(Error::DimensionMismatch("no operators given".into()));
    };
    let (p, n) = (first.p(), first.cols());
    for (i, a) in ops.iter().enumerate() {
        if !a.is_square() || a.rows() != n {
            return Err(Error::DimensionMismatch("operators of different sizes".into()));
        }
        if ops[..i].iter().any(|b| !a.commutes_with(b)) {
            return Err(Error::NonCommuting);
        }
    }
    let powers: Vec<MatFp> = ops.iter().map(|a| a.pow(d as u64)).collect();
    let stacked = MatFp::vstack(p, n, &powers);
    Ok(Subspace::from_matrix_rows(&stacked.kernel()))
}

/// Projector onto `im(U^d)` along `ker(U^d)`, `d = dim`: the idempotent of
/// the Fitting decomposition of `U`.
pub fn stable_idempotent(u: &MatFp) -> MatFp {
    assert!(u.is_square());
    let n = u.rows();
    let p = u.p();
    if n == 0 {
        return MatFp::zeros(p, 0, 0);
    }
    let v = u.pow(n as u64);
    let image = Subspace::span(p, n, &v.transpose().row_vecs());
    let kernel = Subspace::from_matrix_rows(&v.kernel());
    let mut cols = image.basis().to_vec();
    cols.extend_from_slice(kernel.basis());
    let change = MatFp::from_columns(p, n, &cols);
    let inv = change
        .inverse()
        .expect("Fitting decomposition is a direct sum");
    let mut diag = MatFp::zeros(p, n, n);
    for i in 0..image.dim() {
        diag.set(i, i, 1);
    }
    change.mul(&diag).mul(&inv)
}

/// Linear basis of the unital algebra generated by `gens`, found by
/// multiplying the current span by every generator until it stabilizes.
/// The first basis element is the identity.
pub fn algebra_closure(p: u64, n: usize, gens: &[MatFp]) -> Vec<MatFp> {
    let mut basis: Vec<MatFp> = Vec::new();
    let mut echelon = Subspace::span(p, n * n, &[]);
    let mut queue = VecDeque::from([MatFp::identity(p, n)]);
    while let Some(m) = queue.pop_front() {
        let flat = m.as_slice().to_vec();
        if echelon.contains(&flat) {
            continue;
        }
        let mut vecs = echelon.basis().to_vec();
        vecs.push(flat);
        echelon = Subspace::span(p, n * n, &vecs);
        for g in gens {
            queue.push_back(g.mul(&m));
        }
        basis.push(m);
    }
    basis
}

/// Coordinates of `m` in a linear basis of matrices, if it lies in the span.
pub fn matrix_coordinates(basis: &[MatFp], m: &MatFp) -> Option<Vec<u64>> {
    let p = m.p();
    let len = m.rows() * m.cols();
    let cols: Vec<Vec<u64>> = basis.iter().map(|b| b.as_slice().to_vec()).collect();
    let a = MatFp::from_columns(p, len, &cols);
    a.solve(m.as_slice()).ok().flatten()
}
