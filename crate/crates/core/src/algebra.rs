//! Finite-dimensional graded algebras given by structure constants.
//!
//! An algebra is a labeled homogeneous basis plus a multiplication table.
//! Products are written in path order: `x * y` is "x, then y", so for a
//! configuration algebra `a12 * a21` is the loop at vertex 1.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::config::ConfigGraph;
use crate::error::{Error, Result};
use crate::field::{parse_coeff, Field, FieldSpec};
use crate::graded::{DegreeSupport, GradedVectorSpace};
use crate::linalg::{normalize_sparse, solve, ExactMatrix, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisElement {
    pub label: String,
    pub degree: i64,
}

/// A graded algebra with a homogeneous labeled basis.
#[derive(Clone, Debug)]
pub struct GradedAlgebra<F> {
    basis: Vec<BasisElement>,
    index: HashMap<String, usize>,
    table: Vec<SparseVec<F>>,
    unit: SparseVec<F>,
    idempotents: Option<Vec<SparseVec<F>>>,
}

/// How each basis element sits between the idempotents: `e_l * b * e_r = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitBase {
    pub idempotents: usize,
    /// `(l, r)` for every basis element.
    pub ends: Vec<(usize, usize)>,
}

/// One failed axiom instance, named by basis labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Grading {
        left: String,
        right: String,
        expected_degree: i64,
    },
    Associativity {
        a: String,
        b: String,
        c: String,
    },
    LeftUnit {
        element: String,
    },
    RightUnit {
        element: String,
    },
    Idempotents {
        reason: String,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<F: Field> GradedAlgebra<F> {
    /// Assembles an algebra from its table. Missing products are zero. When
    /// `unit` is `None` it is solved for from the table.
    pub fn from_parts(
        basis: Vec<BasisElement>,
        products: Vec<(usize, usize, SparseVec<F>)>,
        unit: Option<SparseVec<F>>,
        idempotents: Option<Vec<SparseVec<F>>>,
    ) -> Result<Self> {
        let n = basis.len();
        let mut index = HashMap::with_capacity(n);
        for (i, b) in basis.iter().enumerate() {
            if index.insert(b.label.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate basis label `{}`", b.label)));
            }
        }
        let mut table = vec![Vec::new(); n * n];
        for (i, j, v) in products {
            if i >= n || j >= n || v.iter().any(|(k, _)| *k >= n) {
                return Err(Error::invalid("product refers to an unknown basis element"));
            }
            let slot = &mut table[i * n + j];
            slot.extend(v);
            *slot = normalize_sparse(std::mem::take(slot));
        }
        let mut alg = GradedAlgebra {
            basis,
            index,
            table,
            unit: Vec::new(),
            idempotents: None,
        };
        alg.unit = match unit {
            Some(u) => normalize_sparse(u),
            None => alg.solve_unit()?,
        };
        alg.idempotents = idempotents.map(|v| v.into_iter().map(normalize_sparse).collect());
        Ok(alg)
    }

    fn solve_unit(&self) -> Result<SparseVec<F>> {
        // u * b_j = b_j and b_j * u = b_j for every j, linear in the coefficients of u.
        let n = self.dim();
        let mut rows = Vec::with_capacity(2 * n * n);
        let mut rhs = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for side in 0..2 {
                for out in 0..n {
                    let row: Vec<F> = (0..n)
                        .map(|i| {
                            let prod = if side == 0 { self.mul_basis(i, j) } else { self.mul_basis(j, i) };
                            coeff_of(prod, out)
                        })
                        .collect();
                    rows.push(row);
                    rhs.push(if out == j { F::one() } else { F::zero() });
                }
            }
        }
        if n == 0 {
            return Err(Error::InvalidAlgebra("the zero algebra has no unit".into()));
        }
        let m = ExactMatrix::from_rows(rows)?;
        let u = solve(&m, &rhs)?
            .ok_or_else(|| Error::InvalidAlgebra("no two-sided unit exists".into()))?;
        Ok(crate::linalg::to_sparse(&u))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::invalid(format!("unknown basis label `{label}`")))
    }

    pub fn unit(&self) -> &SparseVec<F> {
        &self.unit
    }

    pub fn idempotents(&self) -> Option<&[SparseVec<F>]> {
        self.idempotents.as_deref()
    }

    /// Product of two basis elements.
    pub fn mul_basis(&self, i: usize, j: usize) -> &SparseVec<F> {
        &self.table[i * self.dim() + j]
    }

    pub fn mul(&self, x: &SparseVec<F>, y: &SparseVec<F>) -> SparseVec<F> {
        let mut acc = Vec::new();
        for (i, a) in x {
            for (j, b) in y {
                let ab = a.mul_ref(b);
                for (k, c) in self.mul_basis(*i, *j) {
                    acc.push((*k, ab.mul_ref(c)));
                }
            }
        }
        normalize_sparse(acc)
    }

    pub fn basis_vector(&self, i: usize) -> SparseVec<F> {
        vec![(i, F::one())]
    }

    /// Element given by `(label, coefficient)` pairs.
    pub fn element(&self, terms: &[(&str, F)]) -> Result<SparseVec<F>> {
        let mut v = Vec::with_capacity(terms.len());
        for (l, c) in terms {
            v.push((self.require(l)?, c.clone()));
        }
        Ok(normalize_sparse(v))
    }

    pub fn underlying_space(&self) -> GradedVectorSpace {
        let mut v = GradedVectorSpace::new();
        for b in &self.basis {
            v.push(b.degree, b.label.clone())
                .expect("labels are unique");
        }
        v
    }

    pub fn is_nonnegatively_graded(&self) -> bool {
        self.basis.iter().all(|b| b.degree >= 0)
    }

    /// Checks grading, associativity, unit laws and (when present) the
    /// idempotent decomposition. Every failing instance is listed.
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut violations = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let expected = self.degree(i) + self.degree(j);
                if self.mul_basis(i, j).iter().any(|(k, _)| self.degree(*k) != expected) {
                    violations.push(Violation::Grading {
                        left: self.label(i).into(),
                        right: self.label(j).into(),
                        expected_degree: expected,
                    });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul_basis(a, b);
                for c in 0..n {
                    let left = self.mul(ab, &self.basis_vector(c));
                    let right = self.mul(&self.basis_vector(a), self.mul_basis(b, c));
                    if left != right {
                        violations.push(Violation::Associativity {
                            a: self.label(a).into(),
                            b: self.label(b).into(),
                            c: self.label(c).into(),
                        });
                    }
                }
            }
        }
        for b in 0..n {
            let bv = self.basis_vector(b);
            if self.mul(&self.unit, &bv) != bv {
                violations.push(Violation::LeftUnit {
                    element: self.label(b).into(),
                });
            }
            if self.mul(&bv, &self.unit) != bv {
                violations.push(Violation::RightUnit {
                    element: self.label(b).into(),
                });
            }
        }
        if let Some(idem) = &self.idempotents {
            if let Err(reason) = self.check_idempotents(idem) {
                violations.push(Violation::Idempotents { reason });
            }
        }
        ValidationReport { violations }
    }

    fn check_idempotents(&self, idem: &[SparseVec<F>]) -> std::result::Result<(), String> {
        let mut sum: Vec<(usize, F)> = Vec::new();
        for (i, e) in idem.iter().enumerate() {
            if e.iter().any(|(k, _)| self.degree(*k) != 0) {
                return Err(format!("e{} is not of degree 0", i + 1));
            }
            for (j, f) in idem.iter().enumerate() {
                let p = self.mul(e, f);
                let expected = if i == j { e.clone() } else { Vec::new() };
                if p != expected {
                    return Err(if i == j {
                        format!("e{} is not idempotent", i + 1)
                    } else {
                        format!("e{} and e{} are not orthogonal", i + 1, j + 1)
                    });
                }
            }
            sum.extend(e.iter().cloned());
        }
        if normalize_sparse(sum) != self.unit {
            return Err("the idempotents do not sum to the unit".into());
        }
        // Orthogonal nonzero idempotents are independent, so spanning A^0 is a count.
        let deg0 = self.basis.iter().filter(|b| b.degree == 0).count();
        if deg0 != idem.len() || idem.iter().any(Vec::is_empty) {
            return Err(format!(
                "{} idempotents cannot span a degree-0 part of dimension {deg0}",
                idem.len()
            ));
        }
        Ok(())
    }

    /// The idempotents `e_1, ..., e_m` spanning `A^0`: the declared ones, or
    /// else the degree-0 basis elements if they form such a family.
    pub fn detect_idempotents(&self) -> Result<Vec<SparseVec<F>>> {
        if let Some(idem) = &self.idempotents {
            self.check_idempotents(idem).map_err(Error::InvalidAlgebra)?;
            return Ok(idem.clone());
        }
        let candidates: Vec<SparseVec<F>> = (0..self.dim())
            .filter(|&i| self.degree(i) == 0)
            .map(|i| self.basis_vector(i))
            .collect();
        self.check_idempotents(&candidates)
            .map_err(|r| Error::InvalidAlgebra(format!("no split idempotent decomposition of A^0: {r}")))?;
        Ok(candidates)
    }

    /// Separably augmented structure over `R = A^0 ≅ k^m`: requires a
    /// nonnegative grading and a basis adapted to the idempotents.
    pub fn split_base(&self) -> Result<SplitBase> {
        if !self.is_nonnegatively_graded() {
            return Err(Error::InvalidAlgebra(
                "relative computations need a nonnegatively graded algebra".into(),
            ));
        }
        let idem = self.detect_idempotents()?;
        let ends = (0..self.dim())
            .map(|b| {
                let bv = self.basis_vector(b);
                adapted_ends(&idem, |e| self.mul(e, &bv), |e| self.mul(&bv, e), &bv)
                    .ok_or_else(|| {
                        Error::InvalidAlgebra(format!(
                            "basis element `{}` is not adapted to the idempotents",
                            self.label(b)
                        ))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SplitBase {
            idempotents: idem.len(),
            ends,
        })
    }
}

fn coeff_of<F: Field>(v: &SparseVec<F>, i: usize) -> F {
    v.iter()
        .find(|(k, _)| *k == i)
        .map_or_else(F::zero, |(_, c)| c.clone())
}

/// The unique `(l, r)` with `e_l x = x = x e_r` and `e_i x = 0 = x e_j` otherwise.
fn adapted_ends<F: Field>(
    idem: &[SparseVec<F>],
    left: impl Fn(&SparseVec<F>) -> SparseVec<F>,
    right: impl Fn(&SparseVec<F>) -> SparseVec<F>,
    x: &SparseVec<F>,
) -> Option<(usize, usize)> {
    let side = |act: &dyn Fn(&SparseVec<F>) -> SparseVec<F>| {
        let mut found = None;
        for (i, e) in idem.iter().enumerate() {
            let y = act(e);
            if y == *x {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            } else if !y.is_empty() {
                return None;
            }
        }
        found
    };
    Some((side(&left)?, side(&right)?))
}

impl<F: Field> DegreeSupport for GradedAlgebra<F> {
    fn support(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.basis.iter().map(|b| b.degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }
}

/// `k[t]/t^{n+1}` with `deg t = k`, basis `1, t, t^2, ..., t^n`.
pub fn truncated_poly<F: Field>(n: u32, k: i64) -> GradedAlgebra<F> {
    let n = n as usize;
    let label = |j: usize| match j {
        0 => "1".to_string(),
        1 => "t".to_string(),
        _ => format!("t^{j}"),
    };
    let basis = (0..=n)
        .map(|j| BasisElement {
            label: label(j),
            degree: j as i64 * k,
        })
        .collect();
    let mut products = Vec::new();
    for a in 0..=n {
        for b in 0..=n - a {
            products.push((a, b, vec![(a + b, F::one())]));
        }
    }
    GradedAlgebra::from_parts(basis, products, Some(vec![(0, F::one())]), Some(vec![vec![(0, F::one())]]))
        .expect("truncated polynomial table is well formed")
}

/// How the loops `a_ij a_ji` compose in a configuration algebra.
#[derive(Clone, Debug)]
pub enum Preset<F> {
    /// Every product of two arrows vanishes.
    Orthogonal,
    /// `a_ij a_ji = t_i^{2h/k}` for every ordered edge.
    Zigzag,
    /// `a_ij a_ji = c_ij t_i^{2h/k}` with the given constants (missing pairs are zero).
    Explicit(BTreeMap<(usize, usize), F>),
}

fn vertex_tag(i: usize, j: usize, wide: bool) -> String {
    if wide {
        format!("{}_{}", i + 1, j + 1)
    } else {
        format!("{}{}", i + 1, j + 1)
    }
}

/// The graded endomorphism algebra of a configuration of `P^n[k]`-like objects
/// whose edges all carry Hom-degree `h`. Basis: `e_i`, `t_i^l` (`1 ≤ l ≤ n`) and
/// `a_ij` for both orientations of every edge. `t_i a_ij = a_ij t_j = 0`, and
/// arrow products are fixed by the preset.
pub fn build_configuration_algebra<F: Field>(
    graph: &ConfigGraph,
    n: u32,
    k: i64,
    h: i64,
    preset: &Preset<F>,
) -> Result<GradedAlgebra<F>> {
    if n == 0 || k < 1 || h < 1 {
        return Err(Error::invalid("configuration algebras need n ≥ 1, k ≥ 1 and h ≥ 1"));
    }
    graph.check_simple()?;
    let m = graph.vertex_count();
    let n = n as usize;
    let wide = m > 9;
    let mut basis = Vec::new();
    for i in 0..m {
        basis.push(BasisElement {
            label: format!("e{}", i + 1),
            degree: 0,
        });
    }
    let t_index = |i: usize, l: usize| m + i * n + (l - 1);
    for i in 0..m {
        for l in 1..=n {
            let label = if l == 1 {
                format!("t{}", i + 1)
            } else {
                format!("t{}^{l}", i + 1)
            };
            basis.push(BasisElement {
                label,
                degree: l as i64 * k,
            });
        }
    }
    let mut arrows: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for e in graph.edges() {
        for (s, t) in [(e.u, e.v), (e.v, e.u)] {
            arrows.insert((s, t), basis.len());
            basis.push(BasisElement {
                label: format!("a{}", vertex_tag(s, t, wide)),
                degree: h,
            });
        }
    }

    // Loop exponent for a_ij a_ji, when the preset needs one.
    let needs_loops = match preset {
        Preset::Orthogonal => false,
        Preset::Zigzag => !arrows.is_empty(),
        Preset::Explicit(c) => c.values().any(|v| !v.is_zero()),
    };
    let loop_power = if needs_loops {
        if (2 * h) % k != 0 {
            return Err(Error::invalid(format!(
                "preset infeasible: k = {k} does not divide 2h = {}",
                2 * h
            )));
        }
        let r = (2 * h / k) as usize;
        if r > n {
            return Err(Error::invalid(format!(
                "preset infeasible: 2h/k = {r} exceeds n = {n}"
            )));
        }
        r
    } else {
        0
    };

    let mut products: Vec<(usize, usize, SparseVec<F>)> = Vec::new();
    let ends = |b: usize| -> (usize, usize) {
        if b < m {
            (b, b)
        } else if b < m + m * n {
            let i = (b - m) / n;
            (i, i)
        } else {
            *arrows
                .iter()
                .find(|(_, &idx)| idx == b)
                .map(|(st, _)| st)
                .expect("arrow index")
        }
    };
    for b in 0..basis.len() {
        let (l, r) = ends(b);
        products.push((l, b, vec![(b, F::one())]));
        if b >= m {
            products.push((b, r, vec![(b, F::one())]));
        }
    }
    for i in 0..m {
        for a in 1..=n {
            for b in 1..=n - a.min(n) {
                if a + b <= n {
                    products.push((t_index(i, a), t_index(i, b), vec![(t_index(i, a + b), F::one())]));
                }
            }
        }
    }
    for (&(i, j), &a_ij) in &arrows {
        let Some(&a_ji) = arrows.get(&(j, i)) else { continue };
        let c = match preset {
            Preset::Orthogonal => F::zero(),
            Preset::Zigzag => F::one(),
            Preset::Explicit(table) => table.get(&(i, j)).cloned().unwrap_or_else(F::zero),
        };
        if !c.is_zero() {
            products.push((a_ij, a_ji, vec![(t_index(i, loop_power), c)]));
        }
    }

    let unit = (0..m).map(|i| (i, F::one())).collect();
    let idempotents = (0..m).map(|i| vec![(i, F::one())]).collect();
    let alg = GradedAlgebra::from_parts(basis, products, Some(unit), Some(idempotents))?;
    let report = alg.validate();
    if !report.passes() {
        return Err(Error::InvalidAlgebra(format!(
            "composition constants violate the algebra axioms ({} violations, first: {:?})",
            report.violations.len(),
            report.violations[0]
        )));
    }
    Ok(alg)
}

/// A graded bimodule over a graded algebra, by action tables on a labeled basis.
#[derive(Clone, Debug)]
pub struct GradedBimodule<F> {
    basis: Vec<BasisElement>,
    algebra_dim: usize,
    left: Vec<SparseVec<F>>,
    right: Vec<SparseVec<F>>,
}

impl<F: Field> GradedBimodule<F> {
    /// `A` as a bimodule over itself.
    pub fn regular(alg: &GradedAlgebra<F>) -> Self {
        let n = alg.dim();
        let mut left = Vec::with_capacity(n * n);
        let mut right = Vec::with_capacity(n * n);
        for a in 0..n {
            for x in 0..n {
                left.push(alg.mul_basis(a, x).clone());
            }
        }
        for x in 0..n {
            for a in 0..n {
                right.push(alg.mul_basis(x, a).clone());
            }
        }
        GradedBimodule {
            basis: alg.basis().to_vec(),
            algebra_dim: n,
            left,
            right,
        }
    }

    pub fn from_tables(
        basis: Vec<BasisElement>,
        algebra_dim: usize,
        left: Vec<SparseVec<F>>,
        right: Vec<SparseVec<F>>,
    ) -> Result<Self> {
        let n = basis.len();
        if left.len() != algebra_dim * n || right.len() != algebra_dim * n {
            return Err(Error::invalid("bimodule action tables have the wrong size"));
        }
        Ok(GradedBimodule {
            basis,
            algebra_dim,
            left: left.into_iter().map(normalize_sparse).collect(),
            right: right.into_iter().map(normalize_sparse).collect(),
        })
    }

    /// `M⟨i⟩`: the same module with `M⟨i⟩^q = M^{q+i}`.
    pub fn shifted(&self, i: i64) -> Self {
        let mut s = self.clone();
        for b in &mut s.basis {
            b.degree -= i;
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn space(&self) -> GradedVectorSpace {
        let mut v = GradedVectorSpace::new();
        for b in &self.basis {
            v.push(b.degree, b.label.clone())
                .expect("labels are unique");
        }
        v
    }

    /// `a * m` for basis elements.
    pub fn act_left(&self, a: usize, m: usize) -> &SparseVec<F> {
        &self.left[a * self.dim() + m]
    }

    /// `m * a` for basis elements.
    pub fn act_right(&self, m: usize, a: usize) -> &SparseVec<F> {
        &self.right[m * self.algebra_dim + a]
    }

    pub fn left_elem(&self, a: &SparseVec<F>, x: &SparseVec<F>) -> SparseVec<F> {
        let mut acc = Vec::new();
        for (i, c) in a {
            for (j, d) in x {
                let cd = c.mul_ref(d);
                for (k, e) in self.act_left(*i, *j) {
                    acc.push((*k, cd.mul_ref(e)));
                }
            }
        }
        normalize_sparse(acc)
    }

    pub fn right_elem(&self, x: &SparseVec<F>, a: &SparseVec<F>) -> SparseVec<F> {
        let mut acc = Vec::new();
        for (j, d) in x {
            for (i, c) in a {
                let cd = c.mul_ref(d);
                for (k, e) in self.act_right(*j, *i) {
                    acc.push((*k, cd.mul_ref(e)));
                }
            }
        }
        normalize_sparse(acc)
    }

    /// Checks homogeneity, associativity of both actions, the bimodule
    /// compatibility and unitality. Returns a list of failures.
    pub fn validate(&self, alg: &GradedAlgebra<F>) -> Vec<String> {
        let mut errs = Vec::new();
        if alg.dim() != self.algebra_dim {
            errs.push("algebra dimension does not match the action tables".into());
            return errs;
        }
        let n = self.dim();
        let na = alg.dim();
        for a in 0..na {
            for x in 0..n {
                let d = alg.degree(a) + self.degree(x);
                if self.act_left(a, x).iter().any(|(k, _)| self.degree(*k) != d)
                    || self.act_right(x, a).iter().any(|(k, _)| self.degree(*k) != d)
                {
                    errs.push(format!("action of {} on {} is not homogeneous", alg.label(a), self.basis[x].label));
                }
            }
        }
        for a in 0..na {
            for b in 0..na {
                let ab = alg.mul_basis(a, b);
                for x in 0..n {
                    let xv = vec![(x, F::one())];
                    let av = alg.basis_vector(a);
                    let bv = alg.basis_vector(b);
                    if self.left_elem(ab, &xv) != self.left_elem(&av, &self.left_elem(&bv, &xv)) {
                        errs.push(format!("left action not associative at ({}, {}, {})", alg.label(a), alg.label(b), self.basis[x].label));
                    }
                    if self.right_elem(&xv, ab) != self.right_elem(&self.right_elem(&xv, &av), &bv) {
                        errs.push(format!("right action not associative at ({}, {}, {})", self.basis[x].label, alg.label(a), alg.label(b)));
                    }
                    if self.right_elem(&self.left_elem(&av, &xv), &bv) != self.left_elem(&av, &self.right_elem(&xv, &bv)) {
                        errs.push(format!("actions do not commute at ({}, {}, {})", alg.label(a), self.basis[x].label, alg.label(b)));
                    }
                }
            }
        }
        for x in 0..n {
            let xv = vec![(x, F::one())];
            if self.left_elem(alg.unit(), &xv) != xv || self.right_elem(&xv, alg.unit()) != xv {
                errs.push(format!("unit does not act trivially on {}", self.basis[x].label));
            }
        }
        errs
    }

    /// `(l, r)` with `e_l m e_r = m` for every basis element.
    pub fn ends(&self, alg: &GradedAlgebra<F>) -> Result<Vec<(usize, usize)>> {
        let idem = alg.detect_idempotents()?;
        (0..self.dim())
            .map(|x| {
                let xv = vec![(x, F::one())];
                adapted_ends(&idem, |e| self.left_elem(e, &xv), |e| self.right_elem(&xv, e), &xv)
                    .ok_or_else(|| {
                        Error::InvalidAlgebra(format!(
                            "module basis element `{}` is not adapted to the idempotents",
                            self.basis[x].label
                        ))
                    })
            })
            .collect()
    }
}

impl<F: Field> DegreeSupport for GradedBimodule<F> {
    fn support(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.basis.iter().map(|b| b.degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

/// A coefficient as written in JSON: a `"p/q"` string or a bare integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffDoc {
    Text(String),
    Int(i64),
}

impl CoeffDoc {
    pub fn parse<F: Field>(&self) -> Result<F> {
        match self {
            CoeffDoc::Text(s) => parse_coeff(s),
            CoeffDoc::Int(i) => Ok(F::from_i64(*i)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub label: String,
    pub coeff: CoeffDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductDoc {
    pub left: String,
    pub right: String,
    pub result: Vec<TermDoc>,
}

/// An idempotent as a single basis label or a sum of basis labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IdempotentDoc {
    Single(String),
    Sum(Vec<String>),
}

/// On-disk form of a graded algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    pub basis: Vec<BasisElement>,
    pub mult: Vec<ProductDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<TermDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idempotents: Option<Vec<IdempotentDoc>>,
}

impl AlgebraDoc {
    pub fn to_algebra<F: Field>(&self) -> Result<GradedAlgebra<F>> {
        let index: HashMap<&str, usize> = self
            .basis
            .iter()
            .enumerate()
            .map(|(i, b)| (b.label.as_str(), i))
            .collect();
        let lookup = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| Error::invalid(format!("unknown basis label `{l}`")))
        };
        let terms = |ts: &[TermDoc]| -> Result<SparseVec<F>> {
            ts.iter()
                .map(|t| Ok((lookup(&t.label)?, t.coeff.parse::<F>()?)))
                .collect()
        };
        let mut products = Vec::with_capacity(self.mult.len());
        for p in &self.mult {
            products.push((lookup(&p.left)?, lookup(&p.right)?, terms(&p.result)?));
        }
        let unit = self.unit.as_deref().map(terms).transpose()?;
        let idempotents = self
            .idempotents
            .as_ref()
            .map(|list| {
                list.iter()
                    .map(|e| {
                        let labels: Vec<&str> = match e {
                            IdempotentDoc::Single(l) => vec![l.as_str()],
                            IdempotentDoc::Sum(ls) => ls.iter().map(String::as_str).collect(),
                        };
                        labels.iter().map(|l| Ok((lookup(l)?, F::one()))).collect::<Result<SparseVec<F>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        GradedAlgebra::from_parts(self.basis.clone(), products, unit, idempotents)
    }

    pub fn from_algebra<F: Field>(alg: &GradedAlgebra<F>) -> Self {
        let term = |(i, c): &(usize, F)| TermDoc {
            label: alg.label(*i).to_string(),
            coeff: CoeffDoc::Text(c.to_string()),
        };
        let mut mult = Vec::new();
        for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let p = alg.mul_basis(i, j);
                if !p.is_empty() {
                    mult.push(ProductDoc {
                        left: alg.label(i).into(),
                        right: alg.label(j).into(),
                        result: p.iter().map(term).collect(),
                    });
                }
            }
        }
        let idempotents = alg.idempotents().map(|idem| {
            idem.iter()
                .map(|e| {
                    if e.len() == 1 && e[0].1.is_one() {
                        IdempotentDoc::Single(alg.label(e[0].0).into())
                    } else {
                        IdempotentDoc::Sum(e.iter().map(|(i, _)| alg.label(*i).into()).collect())
                    }
                })
                .collect()
        });
        AlgebraDoc {
            field: Some(F::spec()),
            basis: alg.basis().to_vec(),
            mult,
            unit: Some(alg.unit().iter().map(term).collect()),
            idempotents,
        }
    }
}
