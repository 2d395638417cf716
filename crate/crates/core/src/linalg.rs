//! Exact linear algebra: ranks, kernels and subspace arithmetic.
//!
//! The public matrix type is dense; eliminations run on sparse rows through
//! [`Echelon`], which is what the cochain and ideal code feeds directly.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::Field;

/// Sparse vector: strictly increasing indices, no explicit zeros.
pub type SparseVec<F> = Vec<(usize, F)>;

/// Drops zeros and merges duplicate indices.
pub fn normalize_sparse<F: Field>(mut v: Vec<(usize, F)>) -> SparseVec<F> {
    v.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec<F> = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some((j, acc)) if *j == i => {
                let cur = std::mem::replace(acc, F::zero());
                *acc = cur + c;
            }
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

pub fn to_sparse<F: Field>(dense: &[F]) -> SparseVec<F> {
    dense
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

pub fn to_dense<F: Field>(v: &SparseVec<F>, len: usize) -> Vec<F> {
    let mut out = vec![F::zero(); len];
    for (i, c) in v {
        out[*i] = c.clone();
    }
    out
}

/// `a - coeff * b`
fn sub_scaled<F: Field>(a: &SparseVec<F>, coeff: &F, b: &SparseVec<F>) -> SparseVec<F> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, -(coeff.mul_ref(&b[j].1))));
            j += 1;
        } else {
            let mut c = a[i].1.clone();
            c.sub_mul_assign(coeff, &b[j].1);
            if !c.is_zero() {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn scale<F: Field>(v: &mut SparseVec<F>, c: &F) {
    for (_, x) in v.iter_mut() {
        *x = x.mul_ref(c);
    }
}

/// Incremental row-echelon form over sparse rows. Every stored row has a
/// distinct leading column with leading coefficient one.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    ncols: usize,
    rows: Vec<SparseVec<F>>,
    pivots: HashMap<usize, usize>,
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivots: HashMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec<F>] {
        &self.rows
    }

    /// Cancels leading entries against stored pivots until the leading column
    /// is free (or the vector vanishes).
    fn reduce_leading(&self, mut v: SparseVec<F>) -> SparseVec<F> {
        while let Some((lead, c)) = v.first() {
            match self.pivots.get(lead) {
                Some(&r) => {
                    let c = c.clone();
                    v = sub_scaled(&v, &c, &self.rows[r]);
                }
                None => break,
            }
        }
        v
    }

    /// Adds `v` to the row space. Returns `true` if the rank grew.
    pub fn insert(&mut self, v: SparseVec<F>) -> bool {
        debug_assert!(v.iter().all(|(i, _)| *i < self.ncols));
        let mut v = self.reduce_leading(v);
        let Some((lead, c)) = v.first().cloned() else {
            return false;
        };
        let inv = c.inverse().expect("leading entry is nonzero");
        scale(&mut v, &inv);
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(v);
        true
    }

    pub fn contains(&self, v: &SparseVec<F>) -> bool {
        self.reduce_leading(v.clone()).is_empty()
    }

    /// Fully reduced rows, sorted by pivot column.
    pub fn rref(&self) -> Vec<SparseVec<F>> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| self.rows[r][0].0);
        let mut reduced: Vec<SparseVec<F>> = order.iter().map(|&r| self.rows[r].clone()).collect();
        let pivot_cols: Vec<usize> = reduced.iter().map(|r| r[0].0).collect();
        let pivot_index: HashMap<usize, usize> =
            pivot_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        // Back substitution from the last pivot upwards.
        for i in (0..reduced.len()).rev() {
            loop {
                let target = reduced[i]
                    .iter()
                    .skip(1)
                    .find(|(col, _)| pivot_index.contains_key(col))
                    .map(|(col, c)| (pivot_index[col], c.clone()));
                match target {
                    Some((k, c)) => {
                        let next = sub_scaled(&reduced[i], &c, &reduced[k]);
                        reduced[i] = next;
                    }
                    None => break,
                }
            }
        }
        reduced
    }

    /// Basis of the solution space of `row . x = 0` for all stored rows.
    pub fn nullspace(&self) -> Vec<SparseVec<F>> {
        let rref = self.rref();
        let pivot_set: HashMap<usize, usize> =
            rref.iter().enumerate().map(|(i, r)| (r[0].0, i)).collect();
        let mut basis = Vec::new();
        for free in (0..self.ncols).filter(|c| !pivot_set.contains_key(c)) {
            let mut v: Vec<(usize, F)> = vec![(free, F::one())];
            for row in &rref {
                if let Ok(pos) = row.binary_search_by_key(&free, |(i, _)| *i) {
                    v.push((row[0].0, -row[pos].1.clone()));
                }
            }
            basis.push(normalize_sparse(v));
        }
        basis
    }
}

/// Rank of the matrix whose rows are the given sparse vectors.
pub fn sparse_rank<F: Field>(ncols: usize, rows: impl IntoIterator<Item = SparseVec<F>>) -> usize {
    let mut ech = Echelon::new(ncols);
    for r in rows {
        ech.insert(r);
    }
    ech.rank()
}

/// Dense exact matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> ExactMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(ExactMatrix {
            rows: nrows,
            cols,
            data,
        })
    }

    /// Builds a matrix from integer entries.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| F::from_i64(x)).collect())
                .collect(),
        )
    }

    pub fn from_sparse_rows(cols: usize, rows: &[SparseVec<F>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in r {
                m.set(i, *j, c.clone());
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn sparse_rows(&self) -> Vec<SparseVec<F>> {
        (0..self.rows).map(|i| to_sparse(self.row(i))).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j].add_mul_assign(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F]) -> Result<Vec<F>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc.add_mul_assign(a, b);
                }
                acc
            })
            .collect())
    }

    fn echelon(&self) -> Echelon<F> {
        let mut ech = Echelon::new(self.cols);
        for r in self.sparse_rows() {
            ech.insert(r);
        }
        ech
    }
}

/// Rank over the matrix's field.
pub fn rank<F: Field>(m: &ExactMatrix<F>) -> usize {
    m.echelon().rank()
}

/// Basis of `{ v : M v = 0 }`; its size is `cols - rank(M)`.
pub fn kernel_basis<F: Field>(m: &ExactMatrix<F>) -> Vec<Vec<F>> {
    m.echelon()
        .nullspace()
        .iter()
        .map(|v| to_dense(v, m.ncols()))
        .collect()
}

/// One solution of `M x = b`, if any exists.
pub fn solve<F: Field>(m: &ExactMatrix<F>, b: &[F]) -> Result<Option<Vec<F>>> {
    if b.len() != m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: b.len(),
        });
    }
    let n = m.ncols();
    let mut ech = Echelon::new(n + 1);
    for i in 0..m.nrows() {
        let mut row = to_sparse(m.row(i));
        if !b[i].is_zero() {
            row.push((n, b[i].clone()));
        }
        ech.insert(row);
    }
    let rref = ech.rref();
    if rref.iter().any(|r| r[0].0 == n) {
        return Ok(None);
    }
    let mut x = vec![F::zero(); n];
    for r in &rref {
        if let Some((_, c)) = r.iter().find(|(j, _)| *j == n) {
            x[r[0].0] = c.clone();
        }
    }
    Ok(Some(x))
}

/// A subspace of `F^ambient`, stored in echelon form.
#[derive(Clone, Debug)]
pub struct Subspace<F> {
    ech: Echelon<F>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ech: Echelon::new(ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let mut s = Self::zero(ambient);
        for i in 0..ambient {
            s.ech.insert(vec![(i, F::one())]);
        }
        s
    }

    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = SparseVec<F>>) -> Self {
        let mut s = Self::zero(ambient);
        for v in vectors {
            s.ech.insert(v);
        }
        s
    }

    pub fn from_echelon(ech: Echelon<F>) -> Self {
        Subspace { ech }
    }

    /// Reduced row echelon basis.
    pub fn rref(&self) -> Vec<SparseVec<F>> {
        self.ech.rref()
    }

    pub fn ambient(&self) -> usize {
        self.ech.ncols()
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Returns `true` if the dimension grew.
    pub fn add_vector(&mut self, v: SparseVec<F>) -> bool {
        self.ech.insert(v)
    }

    pub fn contains(&self, v: &SparseVec<F>) -> bool {
        self.ech.contains(v)
    }

    pub fn basis(&self) -> &[SparseVec<F>] {
        self.ech.rows()
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> bool {
        other.basis().iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        let mut s = self.clone();
        for v in other.basis() {
            s.ech.insert(v.clone());
        }
        s
    }

    /// Intersection via the Zassenhaus block elimination.
    pub fn meet(&self, other: &Subspace<F>) -> Subspace<F> {
        let n = self.ambient();
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(n);
        }
        let mut ech = Echelon::new(2 * n);
        for u in self.basis() {
            let mut row = u.clone();
            row.extend(u.iter().map(|(i, c)| (i + n, c.clone())));
            ech.insert(row);
        }
        for w in other.basis() {
            ech.insert(w.clone());
        }
        let meet_rows = ech
            .rows()
            .iter()
            .filter(|r| r[0].0 >= n)
            .map(|r| r.iter().map(|(i, c)| (i - n, c.clone())).collect::<SparseVec<F>>());
        Subspace::span(n, meet_rows)
    }
}

fn span_of<F: Field>(vectors: &[Vec<F>]) -> Result<(usize, Subspace<F>)> {
    let ambient = vectors.first().map_or(0, Vec::len);
    for v in vectors {
        if v.len() != ambient {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                found: v.len(),
            });
        }
    }
    Ok((ambient, Subspace::span(ambient, vectors.iter().map(|v| to_sparse(v)))))
}

fn common_ambient<F: Field>(u: &[Vec<F>], w: &[Vec<F>]) -> Result<(Subspace<F>, Subspace<F>)> {
    let (du, su) = span_of(u)?;
    let (dw, sw) = span_of(w)?;
    match (u.is_empty(), w.is_empty()) {
        (false, false) if du != dw => Err(Error::DimensionMismatch {
            expected: du,
            found: dw,
        }),
        (true, false) => Ok((Subspace::zero(dw), sw)),
        (false, true) => Ok((su, Subspace::zero(du))),
        _ => Ok((su, sw)),
    }
}

/// Basis of `span(U) ∩ span(W)`.
pub fn subspace_meet<F: Field>(u: &[Vec<F>], w: &[Vec<F>]) -> Result<Vec<Vec<F>>> {
    let (su, sw) = common_ambient(u, w)?;
    let meet = su.meet(&sw);
    Ok(meet
        .basis()
        .iter()
        .map(|v| to_dense(v, meet.ambient()))
        .collect())
}

/// Basis of `span(U) + span(W)`.
pub fn subspace_sum<F: Field>(u: &[Vec<F>], w: &[Vec<F>]) -> Result<Vec<Vec<F>>> {
    let (su, sw) = common_ambient(u, w)?;
    let sum = su.sum(&sw);
    Ok(sum
        .basis()
        .iter()
        .map(|v| to_dense(v, sum.ambient()))
        .collect())
}

/// `dim span(U) - dim span(W)`, requiring `span(W) ⊆ span(U)`.
pub fn quotient_dim<F: Field>(u: &[Vec<F>], w: &[Vec<F>]) -> Result<usize> {
    let (su, sw) = common_ambient(u, w)?;
    if !su.contains_subspace(&sw) {
        return Err(Error::NotContained(
            "the denominator is not a subspace of the numerator".into(),
        ));
    }
    Ok(su.dim() - sw.dim())
}
