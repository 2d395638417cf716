//! Graph-level combinatorics of configurations: shift normalization, sign
//! assignments and Koszul-signed graded powers of Poincaré data.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// A vertex name as written in JSON; integers and strings are both accepted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexName {
    Int(i64),
    Text(String),
}

impl fmt::Display for VertexName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexName::Int(i) => write!(f, "{i}"),
            VertexName::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub u: VertexName,
    pub v: VertexName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_uv: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_vu: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<VertexName>,
    pub edges: Vec<EdgeDoc>,
}

/// An edge `u--v` with optional Hom-degrees `a_uv`, `a_vu` and a sign degree `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    pub a_uv: Option<i64>,
    pub a_vu: Option<i64>,
    pub d: Option<i64>,
}

impl GraphEdge {
    pub fn plain(u: usize, v: usize) -> Self {
        GraphEdge {
            u,
            v,
            a_uv: None,
            a_vu: None,
            d: None,
        }
    }

    /// The endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    /// Hom-degree read in the direction `from → other(from)`.
    fn a_from(&self, from: usize) -> Option<i64> {
        if from == self.u {
            self.a_uv
        } else {
            self.a_vu
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigGraph {
    names: Vec<String>,
    edges: Vec<GraphEdge>,
}

impl ConfigGraph {
    /// Graph on vertices named `1..=m`. Edge endpoints are 0-based indices.
    pub fn new(m: usize, edges: Vec<GraphEdge>) -> Result<Self> {
        let g = ConfigGraph {
            names: (1..=m).map(|i| i.to_string()).collect(),
            edges,
        };
        g.check_simple()?;
        Ok(g)
    }

    pub fn path(m: usize) -> Self {
        Self::new(m, (1..m).map(|i| GraphEdge::plain(i - 1, i)).collect()).expect("path is simple")
    }

    pub fn cycle(m: usize) -> Self {
        assert!(m >= 3, "a simple cycle needs at least three vertices");
        Self::new(m, (0..m).map(|i| GraphEdge::plain(i, (i + 1) % m)).collect()).expect("cycle is simple")
    }

    /// Vertex 0 joined to each of `1..m`.
    pub fn star(m: usize) -> Self {
        Self::new(m, (1..m).map(|i| GraphEdge::plain(0, i)).collect()).expect("star is simple")
    }

    pub fn from_doc(doc: &GraphDoc) -> Result<Self> {
        let names: Vec<String> = doc.vertices.iter().map(ToString::to_string).collect();
        let mut index = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate vertex `{n}`")));
            }
        }
        let lookup = |v: &VertexName| {
            index
                .get(&v.to_string())
                .copied()
                .ok_or_else(|| Error::invalid(format!("edge endpoint `{v}` is not a vertex")))
        };
        let edges = doc
            .edges
            .iter()
            .map(|e| {
                Ok(GraphEdge {
                    u: lookup(&e.u)?,
                    v: lookup(&e.v)?,
                    a_uv: e.a_uv,
                    a_vu: e.a_vu,
                    d: e.d,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let g = ConfigGraph { names, edges };
        g.check_simple()?;
        Ok(g)
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            vertices: self.names.iter().map(|n| VertexName::Text(n.clone())).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    u: VertexName::Text(self.names[e.u].clone()),
                    v: VertexName::Text(self.names[e.v].clone()),
                    a_uv: e.a_uv,
                    a_vu: e.a_vu,
                    d: e.d,
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn edges_mut(&mut self) -> &mut [GraphEdge] {
        &mut self.edges
    }

    /// No self-loops, no repeated edges, endpoints in range.
    pub fn check_simple(&self) -> Result<()> {
        let m = self.vertex_count();
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.u >= m || e.v >= m {
                return Err(Error::invalid("edge endpoint out of range"));
            }
            if e.u == e.v {
                return Err(Error::invalid(format!("self-loop at vertex {}", self.names[e.u])));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::invalid(format!(
                    "repeated edge {}--{}",
                    self.names[e.u], self.names[e.v]
                )));
            }
        }
        Ok(())
    }

    pub fn is_forest(&self) -> bool {
        let mut dsu: Vec<usize> = (0..self.vertex_count()).collect();
        fn find(d: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while d[r] != r {
                r = d[r];
            }
            d[x] = r;
            r
        }
        for e in &self.edges {
            let (a, b) = (find(&mut dsu, e.u), find(&mut dsu, e.v));
            if a == b {
                return false;
            }
            dsu[a] = b;
        }
        true
    }

    fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertex_count()];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.u].push(i);
            inc[e.v].push(i);
        }
        inc
    }
}

/// A BFS spanning forest with the potentials `value(child) = value(parent) + w(edge)`.
struct Forest {
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    order_edges: Vec<bool>,
}

fn spanning_forest(g: &ConfigGraph) -> Forest {
    let m = g.vertex_count();
    let inc = g.incidence();
    let mut parent = vec![None; m];
    let mut depth = vec![0; m];
    let mut visited = vec![false; m];
    let mut tree_edge = vec![false; g.edges.len()];
    for root in 0..m {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &ei in &inc[x] {
                let y = g.edges[ei].other(x);
                if !visited[y] {
                    visited[y] = true;
                    parent[y] = Some((x, ei));
                    depth[y] = depth[x] + 1;
                    tree_edge[ei] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    Forest {
        parent,
        depth,
        order_edges: tree_edge,
    }
}

impl Forest {
    /// The cycle closed by the non-tree edge `u--v`, as a vertex sequence
    /// starting at `u`, running through the tree to `v`.
    fn cycle_through(&self, u: usize, v: usize) -> Vec<usize> {
        let (mut a, mut b) = (u, v);
        let mut left = vec![a];
        let mut right = vec![b];
        while a != b {
            if self.depth[a] >= self.depth[b] {
                a = self.parent[a].expect("non-root").0;
                left.push(a);
            } else {
                b = self.parent[b].expect("non-root").0;
                right.push(b);
            }
        }
        right.pop();
        right.reverse();
        left.extend(right);
        left
    }
}

fn cycle_names(g: &ConfigGraph, cycle: &[usize]) -> Vec<String> {
    cycle.iter().map(|&v| g.names[v].clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ShiftOutcome {
    Consistent {
        h: i64,
        /// Vertex name → shift `n_i`.
        shifts: BTreeMap<String, i64>,
        /// `(u, v, a'_uv, a'_vu)` after shifting; every entry equals `h`.
        normalized: Vec<(String, String, i64, i64)>,
        /// Set when the graph has cycles: the holonomy condition extends the tree case.
        extension: bool,
    },
    Inconsistent {
        h: i64,
        /// Vertices of the offending cycle in traversal order.
        cycle: Vec<String>,
        /// Sum of `a_ij - h` along the cycle.
        holonomy: i64,
    },
}

/// Shifts `n_i` with `n_j = n_i + a_ij - h` along every edge, `h = nk/2`,
/// so that every edge has normalized degree `a_ij - n_j + n_i = h`.
pub fn normalize_shifts(g: &ConfigGraph, nk: i64) -> Result<ShiftOutcome> {
    if nk % 2 != 0 {
        return Err(Error::invalid(format!("nk = {nk} is odd")));
    }
    let h = nk / 2;
    let mut a = Vec::with_capacity(g.edges.len());
    for e in &g.edges {
        let (Some(x), Some(y)) = (e.a_uv, e.a_vu) else {
            return Err(Error::invalid(format!(
                "edge {}--{} lacks a_uv or a_vu",
                g.names[e.u], g.names[e.v]
            )));
        };
        if x + y != nk {
            return Err(Error::invalid(format!(
                "Serre duality fails on edge {}--{}: {x} + {y} ≠ {nk}",
                g.names[e.u], g.names[e.v]
            )));
        }
        a.push((x, y));
    }
    let forest = spanning_forest(g);
    let m = g.vertex_count();
    // Shifts in BFS order: parents are assigned before children.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&v| forest.depth[v]);
    let mut shift = vec![0i64; m];
    for &v in &order {
        if let Some((p, ei)) = forest.parent[v] {
            shift[v] = shift[p] + g.edges[ei].a_from(p).expect("checked") - h;
        }
    }
    for (ei, e) in g.edges.iter().enumerate() {
        if forest.order_edges[ei] {
            continue;
        }
        if shift[e.v] != shift[e.u] + a[ei].0 - h {
            let cycle = forest.cycle_through(e.u, e.v);
            let holonomy = cycle_holonomy(g, &cycle, h);
            return Ok(ShiftOutcome::Inconsistent {
                h,
                cycle: cycle_names(g, &cycle),
                holonomy,
            });
        }
    }
    let normalized = g
        .edges
        .iter()
        .zip(&a)
        .map(|(e, &(x, y))| {
            (
                g.names[e.u].clone(),
                g.names[e.v].clone(),
                x - shift[e.v] + shift[e.u],
                y - shift[e.u] + shift[e.v],
            )
        })
        .collect();
    Ok(ShiftOutcome::Consistent {
        h,
        shifts: (0..m).map(|v| (g.names[v].clone(), shift[v])).collect(),
        normalized,
        extension: !g.is_forest(),
    })
}

/// Σ (a_ij − h) along a closed vertex sequence (last vertex joins the first).
fn cycle_holonomy(g: &ConfigGraph, cycle: &[usize], h: i64) -> i64 {
    let mut total = 0;
    for (i, &x) in cycle.iter().enumerate() {
        let y = cycle[(i + 1) % cycle.len()];
        let e = g
            .edges
            .iter()
            .find(|e| (e.u == x && e.v == y) || (e.u == y && e.v == x))
            .expect("consecutive cycle vertices are adjacent");
        total += e.a_from(x).expect("checked") - h;
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SignOutcome {
    Feasible {
        /// Vertex name → ε ∈ {+1, −1}.
        signs: BTreeMap<String, i8>,
        /// Set when the graph has cycles (parity condition beyond trees).
        extension: bool,
    },
    Infeasible {
        /// A cycle of odd total degree.
        cycle: Vec<String>,
    },
}

/// Signs with `ε_u ε_v = (−1)^{d_uv}` on every edge, roots set to `+1`.
pub fn sign_assignment(g: &ConfigGraph) -> Result<SignOutcome> {
    let mut parity = Vec::with_capacity(g.edges.len());
    for e in &g.edges {
        let d = e.d.ok_or_else(|| {
            Error::invalid(format!("edge {}--{} lacks the degree d", g.names[e.u], g.names[e.v]))
        })?;
        parity.push(d.rem_euclid(2) == 1);
    }
    let forest = spanning_forest(g);
    let m = g.vertex_count();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&v| forest.depth[v]);
    let mut eps = vec![1i8; m];
    for &v in &order {
        if let Some((p, ei)) = forest.parent[v] {
            eps[v] = if parity[ei] { -eps[p] } else { eps[p] };
        }
    }
    for (ei, e) in g.edges.iter().enumerate() {
        let want = if parity[ei] { -1 } else { 1 };
        if eps[e.u] * eps[e.v] != want {
            let cycle = forest.cycle_through(e.u, e.v);
            return Ok(SignOutcome::Infeasible {
                cycle: cycle_names(g, &cycle),
            });
        }
    }
    Ok(SignOutcome::Feasible {
        signs: (0..m).map(|v| (g.names[v].clone(), eps[v])).collect(),
        extension: !g.is_forest(),
    })
}

/// Graded dimensions: degree → dimension, zero entries dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PoincarePolynomial(pub BTreeMap<i64, u64>);

impl PoincarePolynomial {
    pub fn new(entries: impl IntoIterator<Item = (i64, u64)>) -> Self {
        let mut map = BTreeMap::new();
        for (d, c) in entries {
            *map.entry(d).or_insert(0) += c;
        }
        map.retain(|_, c| *c != 0);
        PoincarePolynomial(map)
    }

    /// `k[-m]`: one dimension in degree `m`.
    pub fn shift_of_unit(m: i64) -> Self {
        Self::new([(m, 1)])
    }

    pub fn dim(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn get(&self, d: i64) -> u64 {
        self.0.get(&d).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerKind {
    Symmetric,
    Exterior,
}

fn binom(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::Overflow("a binomial coefficient".into()))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

/// `S^n(P)` or `Λ^n(P)` in the graded sense: under `S`, even degrees are
/// symmetric and odd degrees exterior; under `Λ` the roles swap.
pub fn graded_power(p: &PoincarePolynomial, n: u32, kind: PowerKind) -> Result<PoincarePolynomial> {
    let n = n as u64;
    let overflow = || Error::Overflow("a graded power dimension".into());
    // series[(j, degree)] = coefficient of x^j y^degree, truncated at j ≤ n
    let mut series: BTreeMap<(u64, i64), u128> = BTreeMap::from([((0, 0), 1)]);
    for (&d, &c) in &p.0 {
        let symmetric = (d % 2 == 0) == (kind == PowerKind::Symmetric);
        let factor: Vec<u128> = (0..=n)
            .map(|j| {
                if symmetric {
                    if c == 0 { Ok(u128::from(j == 0)) } else { binom(c + j - 1, j) }
                } else {
                    binom(c, j)
                }
            })
            .collect::<Result<_>>()?;
        let mut next: BTreeMap<(u64, i64), u128> = BTreeMap::new();
        for (&(j0, deg0), &a) in &series {
            for (j, &b) in factor.iter().enumerate() {
                let j = j as u64;
                if b == 0 || j0 + j > n {
                    continue;
                }
                let term = a.checked_mul(b).ok_or_else(overflow)?;
                let slot = next.entry((j0 + j, deg0 + d * j as i64)).or_insert(0);
                *slot = slot.checked_add(term).ok_or_else(overflow)?;
            }
        }
        series = next;
    }
    let mut out = BTreeMap::new();
    for ((j, deg), c) in series {
        if j == n && c != 0 {
            out.insert(deg, u64::try_from(c).map_err(|_| overflow())?);
        }
    }
    Ok(PoincarePolynomial(out))
}

/// Refuses fields whose characteristic divides `n!`.
pub fn check_characteristic(field: FieldSpec, n: u32) -> Result<()> {
    match field {
        FieldSpec::PrimeField(p) if p <= u64::from(n) => Err(Error::invalid(format!(
            "characteristic {p} divides {n}!; graded powers need p > n"
        ))),
        _ => Ok(()),
    }
}

/// Graded Hom between `n`-th equivariant powers: `S^n P` when the
/// linearizations agree, `Λ^n P` when they differ.
pub fn kunneth_hom(p: &PoincarePolynomial, n: u32, same_linearization: bool) -> Result<PoincarePolynomial> {
    graded_power(
        p,
        n,
        if same_linearization {
            PowerKind::Symmetric
        } else {
            PowerKind::Exterior
        },
    )
}
