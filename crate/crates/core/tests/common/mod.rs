//! Fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use formalitykit_core::algebra::BasisElement;
use formalitykit_core::config::{ConfigGraph, GraphEdge};
use formalitykit_core::linalg::{rank, ExactMatrix};
use formalitykit_core::{truncated_poly, Field, GradedAlgebra};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_2024;

pub fn rng(salt: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(SEED ^ salt)
}

fn elem(label: &str, degree: i64) -> BasisElement {
    BasisElement {
        label: label.into(),
        degree,
    }
}

/// Exterior algebra on `x, y` in degree 1: basis `1, x, y, xy`.
pub fn exterior2<F: Field>() -> GradedAlgebra<F> {
    let basis = vec![elem("1", 0), elem("x", 1), elem("y", 1), elem("xy", 2)];
    let one = F::one;
    let mut products = Vec::new();
    for i in 0..4 {
        products.push((0, i, vec![(i, one())]));
        if i > 0 {
            products.push((i, 0, vec![(i, one())]));
        }
    }
    products.push((1, 2, vec![(3, one())]));
    products.push((2, 1, vec![(3, -one())]));
    GradedAlgebra::from_parts(basis, products, None, None).unwrap()
}

/// Path algebra of `1 → 2` with the arrow in degree `d`: basis `e1, e2, a`.
pub fn arrow_quiver<F: Field>(d: i64) -> GradedAlgebra<F> {
    let basis = vec![elem("e1", 0), elem("e2", 0), elem("a", d)];
    let one = F::one;
    let products = vec![
        (0, 0, vec![(0, one())]),
        (1, 1, vec![(1, one())]),
        (0, 2, vec![(2, one())]),
        (2, 1, vec![(2, one())]),
    ];
    GradedAlgebra::from_parts(basis, products, None, None).unwrap()
}

/// `k × k` concentrated in degree 0.
pub fn split_pair<F: Field>() -> GradedAlgebra<F> {
    let basis = vec![elem("e1", 0), elem("e2", 0)];
    let products = vec![(0, 0, vec![(0, F::one())]), (1, 1, vec![(1, F::one())])];
    GradedAlgebra::from_parts(basis, products, None, None).unwrap()
}

/// Fixtures of dimension at most four.
pub fn small_fixtures<F: Field>() -> Vec<(String, GradedAlgebra<F>)> {
    let mut out = vec![
        ("k[t]/t^2, deg 2".to_string(), truncated_poly::<F>(1, 2)),
        ("k[t]/t^3, deg 1".to_string(), truncated_poly::<F>(2, 1)),
        ("k[t]/t^3, deg 2".to_string(), truncated_poly::<F>(2, 2)),
        ("k[t]/t^4, deg 1".to_string(), truncated_poly::<F>(3, 1)),
        ("exterior(x, y)".to_string(), exterior2::<F>()),
        ("quiver 1->2, deg 1".to_string(), arrow_quiver::<F>(1)),
        ("quiver 1->2, deg 2".to_string(), arrow_quiver::<F>(2)),
        ("k x k".to_string(), split_pair::<F>()),
    ];
    out.retain(|(_, a)| a.dim() <= 4);
    out
}

/// Internal degrees `q` for which some `p`-cochain `A^{⊗p} → A` can be
/// nonzero, padded by one on each side.
pub fn q_window<F: Field>(alg: &GradedAlgebra<F>, p: usize) -> std::ops::RangeInclusive<i64> {
    let degs: Vec<i64> = alg.basis().iter().map(|b| b.degree).collect();
    let (lo, hi) = (*degs.iter().min().unwrap(), *degs.iter().max().unwrap());
    let p = p as i64;
    (lo - p * hi - 1)..=(hi - p * lo + 1)
}

/// Random tree on `m` vertices: vertex `i` attaches to a random earlier vertex.
pub fn random_tree(rng: &mut ChaCha8Rng, m: usize) -> ConfigGraph {
    let edges = (1..m).map(|i| GraphEdge::plain(rng.gen_range(0..i), i)).collect();
    ConfigGraph::new(m, edges).unwrap()
}

/// Random simple graph on `m` vertices with edge probability `prob`.
pub fn random_graph(rng: &mut ChaCha8Rng, m: usize, prob: f64) -> ConfigGraph {
    let mut edges = Vec::new();
    for u in 0..m {
        for v in u + 1..m {
            if rng.gen_bool(prob) {
                edges.push(GraphEdge::plain(u, v));
            }
        }
    }
    ConfigGraph::new(m, edges).unwrap()
}

/// Koszul sign of the permutation taking position `i` to `perm[i]` on a word
/// with the given degrees, computed by bubble sort into place.
fn koszul_sign(degrees: &[i64], perm: &[usize]) -> (i64, i64) {
    let mut arr: Vec<usize> = perm.to_vec();
    let mut degs: Vec<i64> = degrees.to_vec();
    let (mut koszul, mut sign) = (1i64, 1i64);
    for i in 0..arr.len() {
        for j in 0..arr.len() - 1 - i {
            if arr[j] > arr[j + 1] {
                arr.swap(j, j + 1);
                if degs[j] % 2 != 0 && degs[j + 1] % 2 != 0 {
                    koszul = -koszul;
                }
                degs.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    (koszul, sign)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Graded `S^n` (or `Λ^n`) of a graded space given by basis degrees, as the
/// rank of the Koszul-signed (anti)symmetrizer on `V^{⊗n}`, per degree.
pub fn brute_force_power(degrees: &[i64], n: usize, exterior: bool) -> BTreeMap<i64, u64> {
    use formalitykit_core::Rational;
    let d = degrees.len();
    let words: Vec<Vec<usize>> = (0..d.pow(n as u32))
        .map(|mut x| {
            let mut w = vec![0; n];
            for slot in w.iter_mut() {
                *slot = x % d.max(1);
                x /= d.max(1);
            }
            w
        })
        .collect();
    if d == 0 {
        return if n == 0 { BTreeMap::from([(0, 1)]) } else { BTreeMap::new() };
    }
    let index: BTreeMap<Vec<usize>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let perms = permutations(n);
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, w) in words.iter().enumerate() {
        by_degree.entry(w.iter().map(|&j| degrees[j]).sum()).or_default().push(i);
    }
    let mut out = BTreeMap::new();
    for (deg, cols) in by_degree {
        let local: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut rows = Vec::new();
        for &c in &cols {
            let w = &words[c];
            let mut row = vec![Rational::from_i64(0); cols.len()];
            for perm in &perms {
                // σ·(v_{w0} ⊗ … ) places factor i at position perm[i].
                let mut target = vec![0; n];
                for (i, &p) in perm.iter().enumerate() {
                    target[p] = w[i];
                }
                let degs: Vec<i64> = w.iter().map(|&j| degrees[j]).collect();
                let (koszul, sign) = koszul_sign(&degs, perm);
                let coeff = if exterior { koszul * sign } else { koszul };
                let slot = local[&index[&target]];
                row[slot] = row[slot].clone() + Rational::from_i64(coeff);
            }
            rows.push(row);
        }
        let r = rank(&ExactMatrix::from_rows(rows).unwrap());
        if r > 0 {
            out.insert(deg, r as u64);
        }
    }
    out
}

/// Whether signs `ε` with `ε_u ε_v = (-1)^{d_uv}` exist, by trying all `2^m`.
pub fn signs_exist(m: usize, edges: &[(usize, usize, i64)]) -> bool {
    (0u32..1 << m).any(|mask| {
        edges.iter().all(|&(u, v, d)| {
            let (a, b) = ((mask >> u) & 1, (mask >> v) & 1);
            ((a ^ b) as i64) == d.rem_euclid(2)
        })
    })
}
