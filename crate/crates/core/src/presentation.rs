//! Truncated tensor algebras `T(V)` over `R = k^m`, homogeneous ideals in
//! them, and the Butler–King description of `Tor^A_q(R, R)` for `A = T(V)/I`.
//!
//! Word spaces are split into blocks by `(degree, source, target)`; every
//! ideal is a subspace of each block. Everything above the truncation degree
//! `D` is discarded, and results that could depend on it are refused.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{BasisElement, CoeffDoc, GradedAlgebra, Preset};
use crate::config::ConfigGraph;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::graded::GradedVectorSpace;
use crate::linalg::{normalize_sparse, Echelon, SparseVec, Subspace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub label: String,
    /// 0-based vertex indices.
    pub src: usize,
    pub tgt: usize,
    pub deg: i64,
}

/// A word is keyed by its source vertex followed by generator ids.
pub type Word = Vec<u32>;

#[derive(Clone, Debug)]
struct Block {
    degree: i64,
    src: usize,
    tgt: usize,
    words: Vec<Word>,
}

/// All composable words of degree `≤ D`, grouped into blocks.
#[derive(Clone, Debug)]
struct WordSpace {
    blocks: Vec<Block>,
    block_of: HashMap<(i64, usize, usize), usize>,
    locate: HashMap<Word, (usize, usize)>,
}

impl WordSpace {
    fn build(m: usize, gens: &[Generator], d_max: i64, cap: usize) -> Result<Self> {
        let mut blocks: Vec<Block> = Vec::new();
        let mut block_of = HashMap::new();
        let mut locate = HashMap::new();
        let mut total = 0usize;
        // Breadth-first by degree: extend words of degree d by one generator.
        let mut frontier: BTreeMap<i64, Vec<(Word, usize)>> = BTreeMap::new();
        for v in 0..m {
            frontier.entry(0).or_default().push((vec![v as u32], v));
        }
        while let Some((d, words)) = frontier.pop_first() {
            for (w, tgt) in words {
                total += 1;
                if total > cap {
                    return Err(Error::ResourceCap {
                        what: format!("tensor words up to degree {d_max}"),
                        needed: total,
                        cap,
                    });
                }
                let src = w[0] as usize;
                let b = *block_of.entry((d, src, tgt)).or_insert_with(|| {
                    blocks.push(Block {
                        degree: d,
                        src,
                        tgt,
                        words: Vec::new(),
                    });
                    blocks.len() - 1
                });
                locate.insert(w.clone(), (b, blocks[b].words.len()));
                blocks[b].words.push(w.clone());
                for (gi, g) in gens.iter().enumerate() {
                    if g.src == tgt && d + g.deg <= d_max {
                        let mut w2 = w.clone();
                        w2.push(gi as u32);
                        frontier.entry(d + g.deg).or_default().push((w2, g.tgt));
                    }
                }
            }
        }
        Ok(WordSpace {
            blocks,
            block_of,
            locate,
        })
    }

    fn block(&self, d: i64, s: usize, t: usize) -> Option<usize> {
        self.block_of.get(&(d, s, t)).copied()
    }
}

/// A homogeneous two-sided ideal (or any block-graded subspace) of `T(V)`,
/// known in degrees `≤ D`.
#[derive(Clone, Debug)]
pub struct HomogeneousIdeal<F> {
    blocks: Vec<Subspace<F>>,
}

impl<F: Field> HomogeneousIdeal<F> {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(Subspace::dim).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Subspace::is_zero)
    }
}

#[derive(Clone, Debug)]
pub struct TensorPresentation<F> {
    m: usize,
    gens: Vec<Generator>,
    /// Relations split into `(source, target)` components, as `(word, coeff)` lists.
    relations: Vec<Vec<(Word, F)>>,
    truncation: i64,
    space: WordSpace,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub label: String,
    /// 1-based vertex indices.
    pub src: usize,
    pub tgt: usize,
    pub deg: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTermDoc {
    pub word: Vec<String>,
    pub coeff: CoeffDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub vertices: usize,
    pub generators: Vec<GeneratorDoc>,
    pub relations: Vec<Vec<RelationTermDoc>>,
    pub truncation: i64,
}

/// `max` of affine functions `slope·p + intercept`: a lower bound for
/// `mindeg Tor_q` as a function of `p` (`q = 2p` or `2p + 1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MindegBound {
    pub q_parity: u8,
    pub pieces: Vec<(i64, i64)>,
}

impl MindegBound {
    pub fn at(&self, p: i64) -> i64 {
        self.pieces
            .iter()
            .map(|(s, c)| s * p + c)
            .max()
            .expect("at least one piece")
    }
}

/// Lower bound for `mindeg Tor_q` from `μ = mindeg I` and `ν = mindeg J`:
/// `max(pμ, 2ν + (p-1)μ)` for `q = 2p` and `pμ + ν` for `q = 2p + 1`.
pub fn mindeg_bound(mu: i64, nu: i64, odd: bool) -> Result<MindegBound> {
    if !(nu >= 1 && mu >= 2 * nu) {
        return Err(Error::invalid(format!(
            "mindeg bounds need μ ≥ 2ν ≥ 2, got μ = {mu}, ν = {nu}"
        )));
    }
    Ok(if odd {
        MindegBound {
            q_parity: 1,
            pieces: vec![(mu, nu)],
        }
    } else {
        MindegBound {
            q_parity: 0,
            pieces: vec![(mu, 0), (mu, 2 * nu - mu)],
        }
    })
}

/// The bound at a concrete `q ≥ 1`.
pub fn mindeg_bound_at(mu: i64, nu: i64, q: usize) -> Result<i64> {
    let p = (q / 2) as i64;
    Ok(mindeg_bound(mu, nu, q % 2 == 1)?.at(p))
}

/// Outcome of the search for `N` with `J^N ⊆ I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nilpotence {
    pub verified: bool,
    /// Smallest `N` with every word of length `N` in `I`, when found.
    pub exponent: Option<usize>,
    /// `maxdeg(T(V)/I)`, exact when `verified`.
    pub maxdeg_quotient: Option<i64>,
}

pub const DEFAULT_MAX_TENSOR_WORDS: usize = 2_000_000;

impl<F: Field> TensorPresentation<F> {
    pub fn new(
        m: usize,
        gens: Vec<Generator>,
        relations: Vec<Vec<(Vec<usize>, F)>>,
        truncation: i64,
    ) -> Result<Self> {
        Self::with_cap(m, gens, relations, truncation, DEFAULT_MAX_TENSOR_WORDS)
    }

    pub fn with_cap(
        m: usize,
        gens: Vec<Generator>,
        relations: Vec<Vec<(Vec<usize>, F)>>,
        truncation: i64,
        cap: usize,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("a presentation needs at least one vertex"));
        }
        if truncation < 0 {
            return Err(Error::invalid("truncation degree must be nonnegative"));
        }
        for g in &gens {
            if g.src >= m || g.tgt >= m {
                return Err(Error::invalid(format!("generator `{}` has an endpoint out of range", g.label)));
            }
            if g.deg < 1 {
                return Err(Error::invalid(format!("generator `{}` must have positive degree", g.label)));
            }
        }
        let mut split: Vec<Vec<(Word, F)>> = Vec::new();
        for (ri, rel) in relations.into_iter().enumerate() {
            let mut parts: BTreeMap<(usize, usize), Vec<(Word, F)>> = BTreeMap::new();
            let mut degree = None;
            for (word, c) in rel {
                if word.is_empty() {
                    return Err(Error::invalid(format!("relation {} contains an empty word", ri + 1)));
                }
                if word.iter().any(|&g| g >= gens.len()) {
                    return Err(Error::invalid(format!("relation {} uses an unknown generator", ri + 1)));
                }
                for pair in word.windows(2) {
                    if gens[pair[0]].tgt != gens[pair[1]].src {
                        return Err(Error::invalid(format!(
                            "relation {}: `{}` is not followed by `{}` in a composable way",
                            ri + 1,
                            gens[pair[0]].label,
                            gens[pair[1]].label
                        )));
                    }
                }
                let d: i64 = word.iter().map(|&g| gens[g].deg).sum();
                if *degree.get_or_insert(d) != d {
                    return Err(Error::invalid(format!("relation {} is not homogeneous", ri + 1)));
                }
                let s = gens[word[0]].src;
                let t = gens[*word.last().expect("nonempty")].tgt;
                let mut key: Word = vec![s as u32];
                key.extend(word.iter().map(|&g| g as u32));
                parts.entry((s, t)).or_default().push((key, c));
            }
            split.extend(parts.into_values());
        }
        let space = WordSpace::build(m, &gens, truncation, cap)?;
        Ok(TensorPresentation {
            m,
            gens,
            relations: split,
            truncation,
            space,
        })
    }

    /// `k[t]/t^{n+1}` with `deg t = k`.
    pub fn truncated_poly(n: u32, k: i64, truncation: i64) -> Result<Self> {
        let gens = vec![Generator {
            label: "t".into(),
            src: 0,
            tgt: 0,
            deg: k,
        }];
        Self::new(1, gens, vec![vec![(vec![0; n as usize + 1], F::one())]], truncation)
    }

    /// Presentation of the configuration algebra with generators `t_i` and
    /// `a_ij`: `t_i^{n+1}`, `t_i a_ij`, `a_ij t_j`, `a_ij a_jl` (`l ≠ i`) and the
    /// preset's loop relations `a_ij a_ji − c_ij t_i^{2h/k}`.
    pub fn configuration(graph: &ConfigGraph, n: u32, k: i64, h: i64, preset: &Preset<F>, truncation: i64) -> Result<Self> {
        // Build the algebra first: it validates the preset.
        let alg = crate::algebra::build_configuration_algebra(graph, n, k, h, preset)?;
        let m = graph.vertex_count();
        let wide = m > 9;
        let tag = |i: usize, j: usize| {
            if wide {
                format!("{}_{}", i + 1, j + 1)
            } else {
                format!("{}{}", i + 1, j + 1)
            }
        };
        let mut gens = Vec::new();
        for i in 0..m {
            gens.push(Generator {
                label: format!("t{}", i + 1),
                src: i,
                tgt: i,
                deg: k,
            });
        }
        let mut arrow = BTreeMap::new();
        for e in graph.edges() {
            for (s, t) in [(e.u, e.v), (e.v, e.u)] {
                arrow.insert((s, t), gens.len());
                gens.push(Generator {
                    label: format!("a{}", tag(s, t)),
                    src: s,
                    tgt: t,
                    deg: h,
                });
            }
        }
        let one = F::one();
        let mut rels: Vec<Vec<(Vec<usize>, F)>> = Vec::new();
        for i in 0..m {
            rels.push(vec![(vec![i; n as usize + 1], one.clone())]);
        }
        for (&(i, j), &a) in &arrow {
            rels.push(vec![(vec![i, a], one.clone())]);
            rels.push(vec![(vec![a, j], one.clone())]);
            for (&(j2, l), &b) in &arrow {
                if j2 != j {
                    continue;
                }
                if l != i {
                    rels.push(vec![(vec![a, b], one.clone())]);
                    continue;
                }
                // a_ij a_ji equals the loop element computed in the algebra.
                let ai = alg.index_of(&gens[a].label).expect("arrow label");
                let bi = alg.index_of(&gens[b].label).expect("arrow label");
                let mut rel = vec![(vec![a, b], one.clone())];
                for (z, c) in alg.mul_basis(ai, bi) {
                    let label = alg.label(*z);
                    let power = match label.split_once('^') {
                        Some((_, e)) => e.parse::<usize>().expect("power label"),
                        None => 1,
                    };
                    rel.push((vec![i; power], -c.clone()));
                }
                rels.push(rel);
            }
        }
        Self::new(m, gens, rels, truncation)
    }

    pub fn from_doc(doc: &PresentationDoc) -> Result<Self> {
        let gens = doc
            .generators
            .iter()
            .map(|g| {
                if g.src == 0 || g.tgt == 0 || g.src > doc.vertices || g.tgt > doc.vertices {
                    return Err(Error::invalid(format!(
                        "generator `{}`: vertices are numbered 1..={}",
                        g.label, doc.vertices
                    )));
                }
                Ok(Generator {
                    label: g.label.clone(),
                    src: g.src - 1,
                    tgt: g.tgt - 1,
                    deg: g.deg,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let index: HashMap<&str, usize> = gens.iter().enumerate().map(|(i, g)| (g.label.as_str(), i)).collect();
        if index.len() != gens.len() {
            return Err(Error::invalid("duplicate generator labels"));
        }
        let relations = doc
            .relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .map(|t| {
                        let word = t
                            .word
                            .iter()
                            .map(|l| {
                                index
                                    .get(l.as_str())
                                    .copied()
                                    .ok_or_else(|| Error::invalid(format!("unknown generator `{l}`")))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok((word, t.coeff.parse::<F>()?))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.vertices, gens, relations, doc.truncation)
    }

    pub fn to_doc(&self) -> PresentationDoc {
        PresentationDoc {
            vertices: self.m,
            generators: self
                .gens
                .iter()
                .map(|g| GeneratorDoc {
                    label: g.label.clone(),
                    src: g.src + 1,
                    tgt: g.tgt + 1,
                    deg: g.deg,
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|rel| {
                    rel.iter()
                        .map(|(w, c)| RelationTermDoc {
                            word: w[1..].iter().map(|&g| self.gens[g as usize].label.clone()).collect(),
                            coeff: CoeffDoc::Text(c.to_string()),
                        })
                        .collect()
                })
                .collect(),
            truncation: self.truncation,
        }
    }

    /// Same presentation with a different truncation degree.
    pub fn retruncate(&self, truncation: i64) -> Result<Self> {
        let space = WordSpace::build(self.m, &self.gens, truncation, DEFAULT_MAX_TENSOR_WORDS)?;
        Ok(TensorPresentation {
            truncation,
            space,
            ..self.clone()
        })
    }

    pub fn vertices(&self) -> usize {
        self.m
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    fn render(&self, w: &[u32]) -> String {
        if w.len() == 1 {
            format!("e{}", w[0] + 1)
        } else {
            w[1..]
                .iter()
                .map(|&g| self.gens[g as usize].label.as_str())
                .collect::<Vec<_>>()
                .join("*")
        }
    }

    /// Labels of all composable words of degree `d`; degree 0 gives the idempotents.
    pub fn word_basis(&self, d: i64) -> Result<Vec<String>> {
        if d < 0 || d > self.truncation {
            return Err(Error::invalid(format!(
                "degree {d} is outside 0..={}",
                self.truncation
            )));
        }
        let mut out = Vec::new();
        for b in &self.space.blocks {
            if b.degree == d {
                out.extend(b.words.iter().map(|w| self.render(w)));
            }
        }
        Ok(out)
    }

    pub fn zero_ideal(&self) -> HomogeneousIdeal<F> {
        HomogeneousIdeal {
            blocks: self
                .space
                .blocks
                .iter()
                .map(|b| Subspace::zero(b.words.len()))
                .collect(),
        }
    }

    /// `T(V)` itself (the zeroth power of any ideal).
    pub fn whole(&self) -> HomogeneousIdeal<F> {
        HomogeneousIdeal {
            blocks: self
                .space
                .blocks
                .iter()
                .map(|b| Subspace::full(b.words.len()))
                .collect(),
        }
    }

    /// The augmentation ideal `J = T(V)^+`.
    pub fn augmentation(&self) -> HomogeneousIdeal<F> {
        HomogeneousIdeal {
            blocks: self
                .space
                .blocks
                .iter()
                .map(|b| {
                    if b.degree > 0 {
                        Subspace::full(b.words.len())
                    } else {
                        Subspace::zero(b.words.len())
                    }
                })
                .collect(),
        }
    }

    /// Concatenation `x · y` of block vectors, landing in the block of the
    /// product (if it lies within the truncation).
    fn concat(&self, bx: usize, x: &SparseVec<F>, by: usize, y: &SparseVec<F>) -> Option<(usize, SparseVec<F>)> {
        let (blx, bly) = (&self.space.blocks[bx], &self.space.blocks[by]);
        debug_assert_eq!(blx.tgt, bly.src);
        let target = self.space.block(blx.degree + bly.degree, blx.src, bly.tgt)?;
        let mut acc = Vec::with_capacity(x.len() * y.len());
        let mut key: Word = Vec::new();
        for (i, a) in x {
            for (j, b) in y {
                key.clear();
                key.extend_from_slice(&blx.words[*i]);
                key.extend_from_slice(&bly.words[*j][1..]);
                let (tb, li) = self.space.locate[&key];
                debug_assert_eq!(tb, target);
                acc.push((li, a.mul_ref(b)));
            }
        }
        Some((target, normalize_sparse(acc)))
    }

    /// Blocks in increasing degree.
    fn blocks_by_degree(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.space.blocks.len()).collect();
        order.sort_by_key(|&b| {
            let bl = &self.space.blocks[b];
            (bl.degree, bl.src, bl.tgt)
        });
        order
    }

    /// `X + Y`
    pub fn sum(&self, x: &HomogeneousIdeal<F>, y: &HomogeneousIdeal<F>) -> HomogeneousIdeal<F> {
        HomogeneousIdeal {
            blocks: x.blocks.iter().zip(&y.blocks).map(|(a, b)| a.sum(b)).collect(),
        }
    }

    /// `X ∩ Y`
    pub fn meet(&self, x: &HomogeneousIdeal<F>, y: &HomogeneousIdeal<F>) -> HomogeneousIdeal<F> {
        HomogeneousIdeal {
            blocks: x
                .blocks
                .par_iter()
                .zip(&y.blocks)
                .map(|(a, b)| a.meet(b))
                .collect(),
        }
    }

    /// `X · Y`: the span of all products `x y`, truncated at `D`.
    pub fn product(&self, x: &HomogeneousIdeal<F>, y: &HomogeneousIdeal<F>) -> HomogeneousIdeal<F> {
        let mut out: Vec<Echelon<F>> = self.space.blocks.iter().map(|b| Echelon::new(b.words.len())).collect();
        for (bx, sx) in x.blocks.iter().enumerate() {
            if sx.is_zero() {
                continue;
            }
            let blx = &self.space.blocks[bx];
            for (by, sy) in y.blocks.iter().enumerate() {
                let bly = &self.space.blocks[by];
                if sy.is_zero() || bly.src != blx.tgt || blx.degree + bly.degree > self.truncation {
                    continue;
                }
                for u in sx.basis() {
                    for v in sy.basis() {
                        if let Some((t, w)) = self.concat(bx, u, by, v) {
                            out[t].insert(w);
                        }
                    }
                }
            }
        }
        from_echelons(out)
    }

    /// `g · X` summed over generators `g`, i.e. `J · X` for a two-sided ideal `X`.
    pub fn left_by_generators(&self, x: &HomogeneousIdeal<F>) -> HomogeneousIdeal<F> {
        self.by_generators(x, true)
    }

    /// `X · J` for a two-sided ideal `X`.
    pub fn right_by_generators(&self, x: &HomogeneousIdeal<F>) -> HomogeneousIdeal<F> {
        self.by_generators(x, false)
    }

    fn generator_block(&self, g: usize) -> Option<(usize, usize)> {
        let gen = &self.gens[g];
        let key: Word = vec![gen.src as u32, g as u32];
        self.space.locate.get(&key).copied()
    }

    fn by_generators(&self, x: &HomogeneousIdeal<F>, left: bool) -> HomogeneousIdeal<F> {
        let mut out: Vec<Echelon<F>> = self.space.blocks.iter().map(|b| Echelon::new(b.words.len())).collect();
        for g in 0..self.gens.len() {
            let Some((gb, gi)) = self.generator_block(g) else { continue };
            let gv = vec![(gi, F::one())];
            for (bx, sx) in x.blocks.iter().enumerate() {
                let blx = &self.space.blocks[bx];
                let fits = if left { blx.src == self.gens[g].tgt } else { blx.tgt == self.gens[g].src };
                if sx.is_zero() || !fits {
                    continue;
                }
                for u in sx.basis() {
                    let prod = if left { self.concat(gb, &gv, bx, u) } else { self.concat(bx, u, gb, &gv) };
                    if let Some((t, w)) = prod {
                        out[t].insert(w);
                    }
                }
            }
        }
        from_echelons(out)
    }

    fn relation_vectors(&self) -> Vec<(usize, SparseVec<F>)> {
        self.relations
            .iter()
            .filter_map(|rel| {
                let mut block = None;
                let mut v = Vec::new();
                for (w, c) in rel {
                    let (b, i) = *self.space.locate.get(w)?;
                    block = Some(b);
                    v.push((i, c.clone()));
                }
                Some((block?, normalize_sparse(v)))
            })
            .collect()
    }

    /// The two-sided ideal `I` generated by the relations.
    pub fn relation_ideal(&self) -> HomogeneousIdeal<F> {
        let mut out: Vec<Echelon<F>> = self.space.blocks.iter().map(|b| Echelon::new(b.words.len())).collect();
        for (b, v) in self.relation_vectors() {
            out[b].insert(v);
        }
        // I_d = R_d + V·I_{<d} + I_{<d}·V, degree by degree.
        for b in self.blocks_by_degree() {
            if out[b].rank() == 0 {
                continue;
            }
            let rows: Vec<SparseVec<F>> = out[b].rows().to_vec();
            let bl = &self.space.blocks[b];
            for g in 0..self.gens.len() {
                let Some((gb, gi)) = self.generator_block(g) else { continue };
                let gv = vec![(gi, F::one())];
                let gen = &self.gens[g];
                if gen.tgt == bl.src {
                    for r in &rows {
                        if let Some((t, w)) = self.concat(gb, &gv, b, r) {
                            out[t].insert(w);
                        }
                    }
                }
                if gen.src == bl.tgt {
                    for r in &rows {
                        if let Some((t, w)) = self.concat(b, r, gb, &gv) {
                            out[t].insert(w);
                        }
                    }
                }
            }
        }
        from_echelons(out)
    }

    /// `I · Y = T(V) · (R · Y)` for the relation ideal `I` and a two-sided ideal `Y`.
    fn relations_times(&self, y: &HomogeneousIdeal<F>) -> HomogeneousIdeal<F> {
        let mut out: Vec<Echelon<F>> = self.space.blocks.iter().map(|b| Echelon::new(b.words.len())).collect();
        for (rb, r) in self.relation_vectors() {
            let rbl = &self.space.blocks[rb];
            for (by, sy) in y.blocks.iter().enumerate() {
                let bly = &self.space.blocks[by];
                if sy.is_zero() || bly.src != rbl.tgt || rbl.degree + bly.degree > self.truncation {
                    continue;
                }
                for v in sy.basis() {
                    if let Some((t, w)) = self.concat(rb, &r, by, v) {
                        out[t].insert(w);
                    }
                }
            }
        }
        for b in self.blocks_by_degree() {
            if out[b].rank() == 0 {
                continue;
            }
            let rows: Vec<SparseVec<F>> = out[b].rows().to_vec();
            let bl = &self.space.blocks[b];
            for g in 0..self.gens.len() {
                if self.gens[g].tgt != bl.src {
                    continue;
                }
                let Some((gb, gi)) = self.generator_block(g) else { continue };
                let gv = vec![(gi, F::one())];
                for r in &rows {
                    if let Some((t, w)) = self.concat(gb, &gv, b, r) {
                        out[t].insert(w);
                    }
                }
            }
        }
        from_echelons(out)
    }

    /// `I^0 = T(V), I^1 = I, ..., I^p`.
    pub fn relation_powers(&self, p: usize) -> Vec<HomogeneousIdeal<F>> {
        let mut powers = vec![self.whole()];
        for _ in 0..p {
            let next = self.relations_times(powers.last().expect("nonempty"));
            powers.push(next);
        }
        powers
    }

    pub fn block_dims(&self, x: &HomogeneousIdeal<F>) -> BTreeMap<(i64, usize, usize), usize> {
        x.blocks
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_zero())
            .map(|(b, s)| {
                let bl = &self.space.blocks[b];
                ((bl.degree, bl.src, bl.tgt), s.dim())
            })
            .collect()
    }

    pub fn degree_dims(&self, x: &HomogeneousIdeal<F>) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for ((d, _, _), n) in self.block_dims(x) {
            *out.entry(d).or_insert(0) += n;
        }
        out
    }

    /// Smallest degree with a nonzero component (`None` for the zero ideal).
    pub fn mindeg(&self, x: &HomogeneousIdeal<F>) -> Option<i64> {
        self.degree_dims(x).keys().next().copied()
    }

    /// Closure under multiplication by every generator on both sides,
    /// within the truncation.
    pub fn is_two_sided(&self, x: &HomogeneousIdeal<F>) -> bool {
        let l = self.left_by_generators(x);
        let r = self.right_by_generators(x);
        x.blocks
            .iter()
            .zip(l.blocks.iter().zip(&r.blocks))
            .all(|(s, (a, b))| s.contains_subspace(a) && s.contains_subspace(b))
    }

    /// Whether `e · w ∈ X` for the word with the given label.
    pub fn contains_word(&self, x: &HomogeneousIdeal<F>, label: &str) -> bool {
        for (b, bl) in self.space.blocks.iter().enumerate() {
            for (i, w) in bl.words.iter().enumerate() {
                if self.render(w) == label {
                    return x.blocks[b].contains(&vec![(i, F::one())]);
                }
            }
        }
        false
    }

    /// `V ∩ I ⊆ V`: nonzero means the presentation is not minimal.
    fn generator_relations(&self, i: &HomogeneousIdeal<F>) -> usize {
        let mut n = 0;
        for (b, bl) in self.space.blocks.iter().enumerate() {
            let gens: Vec<SparseVec<F>> = bl
                .words
                .iter()
                .enumerate()
                .filter(|(_, w)| w.len() == 2)
                .map(|(k, _)| vec![(k, F::one())])
                .collect();
            if gens.is_empty() {
                continue;
            }
            let v = Subspace::span(bl.words.len(), gens);
            n += v.meet(&i.blocks[b]).dim();
        }
        n
    }

    /// Searches for `N` with all words of length `N` in `I`, among the `N`
    /// whose words all fit below the truncation.
    pub fn nilpotence(&self, i: &HomogeneousIdeal<F>) -> Nilpotence {
        let max_gen = self.gens.iter().map(|g| g.deg).max();
        let Some(max_gen) = max_gen else {
            // No generators: A = R.
            return Nilpotence {
                verified: true,
                exponent: Some(1),
                maxdeg_quotient: Some(0),
            };
        };
        let mut exponent = None;
        let mut n = 1usize;
        while n as i64 * max_gen <= self.truncation {
            let all_in = self.space.blocks.iter().enumerate().all(|(b, bl)| {
                bl.words
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| w.len() == n + 1)
                    .all(|(k, _)| i.blocks[b].contains(&vec![(k, F::one())]))
            });
            if all_in {
                exponent = Some(n);
                break;
            }
            n += 1;
        }
        let maxdeg_quotient = exponent.map(|_| {
            self.space
                .blocks
                .iter()
                .enumerate()
                .filter(|(b, bl)| i.blocks[*b].dim() < bl.words.len())
                .map(|(_, bl)| bl.degree)
                .max()
                .unwrap_or(0)
        });
        Nilpotence {
            verified: exponent.is_some(),
            exponent,
            maxdeg_quotient,
        }
    }

    /// `dim (T(V)/I)_d` for every `d ≤ D`.
    pub fn quotient_dims(&self) -> BTreeMap<i64, usize> {
        let i = self.relation_ideal();
        let mut out = BTreeMap::new();
        for (b, bl) in self.space.blocks.iter().enumerate() {
            let n = bl.words.len() - i.blocks[b].dim();
            if n > 0 {
                *out.entry(bl.degree).or_insert(0) += n;
            }
        }
        out
    }

    /// `Tor^A_q(R, R)` as a graded vector space, labeled by blocks.
    pub fn tor_term(&self, q: usize) -> Result<GradedVectorSpace> {
        Ok(self.tor_blocks(q)?.space)
    }

    /// `Tor^A_q(R, R)` with per-block dimensions.
    pub fn tor_blocks(&self, q: usize) -> Result<TorTerm> {
        let mut blocks = BTreeMap::new();
        if q == 0 {
            for v in 0..self.m {
                blocks.insert((0, v, v), 1);
            }
            return Ok(TorTerm::new(q, blocks));
        }
        let i = self.relation_ideal();
        let nil = self.nilpotence(&i);
        if !nil.verified {
            return Err(Error::Inconclusive(format!(
                "no power of J was verified to lie in I within truncation {}",
                self.truncation
            )));
        }
        let maxdeg = nil.maxdeg_quotient.expect("verified");
        let needed = q as i64 * maxdeg;
        if needed > self.truncation {
            return Err(Error::TruncationInsufficient {
                needed,
                have: self.truncation,
            });
        }
        if q == 1 {
            // J / (J^2 + I), which is V / (V ∩ I) for minimal presentations.
            for (b, bl) in self.space.blocks.iter().enumerate() {
                let positive = bl.words.iter().filter(|w| w.len() >= 2).count();
                if positive == 0 {
                    continue;
                }
                let mut den = i.blocks[b].clone();
                for (k, w) in bl.words.iter().enumerate() {
                    if w.len() >= 3 {
                        den.add_vector(vec![(k, F::one())]);
                    }
                }
                let n = positive - den.dim();
                if n > 0 {
                    blocks.insert((bl.degree, bl.src, bl.tgt), n);
                }
            }
            return Ok(TorTerm::new(q, blocks));
        }
        if self.generator_relations(&i) > 0 {
            return Err(Error::invalid(
                "the presentation is not minimal (I meets V); replace V by V/(V ∩ I)",
            ));
        }
        let p = q / 2;
        let powers = self.relation_powers(p + 1);
        let (num, den) = if q % 2 == 0 {
            // (I^p ∩ J I^{p-1} J) / (J I^p + I^p J)
            let jij = self.right_by_generators(&self.left_by_generators(&powers[p - 1]));
            let num = self.meet(&powers[p], &jij);
            let den = self.sum(&self.left_by_generators(&powers[p]), &self.right_by_generators(&powers[p]));
            (num, den)
        } else {
            // (J I^p ∩ I^p J) / (I^{p+1} + J I^p J)
            let ji = self.left_by_generators(&powers[p]);
            let ij = self.right_by_generators(&powers[p]);
            let num = self.meet(&ji, &ij);
            let den = self.sum(&powers[p + 1], &self.right_by_generators(&ji));
            (num, den)
        };
        for (b, bl) in self.space.blocks.iter().enumerate() {
            if !num.blocks[b].contains_subspace(&den.blocks[b]) {
                return Err(Error::NotContained(format!(
                    "Tor_{q} denominator escapes the numerator in degree {}",
                    bl.degree
                )));
            }
            let n = num.blocks[b].dim() - den.blocks[b].dim();
            if n > 0 {
                blocks.insert((bl.degree, bl.src, bl.tgt), n);
            }
        }
        Ok(TorTerm::new(q, blocks))
    }

    /// The quotient `T(V)/I` as a graded algebra, basis given by words that
    /// are not pivots of the reduced relation ideal.
    pub fn quotient_algebra(&self) -> Result<GradedAlgebra<F>> {
        let i = self.relation_ideal();
        let nil = self.nilpotence(&i);
        let maxdeg = nil.maxdeg_quotient.ok_or_else(|| {
            Error::Inconclusive("the quotient may extend beyond the truncation".into())
        })?;
        if 2 * maxdeg > self.truncation {
            return Err(Error::TruncationInsufficient {
                needed: 2 * maxdeg,
                have: self.truncation,
            });
        }
        let rrefs: Vec<Vec<SparseVec<F>>> = i
            .blocks
            .iter()
            .map(Subspace::rref)
            .collect();
        let mut basis = Vec::new();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        for (b, bl) in self.space.blocks.iter().enumerate() {
            let pivots: std::collections::HashSet<usize> = rrefs[b].iter().map(|r| r[0].0).collect();
            for (k, w) in bl.words.iter().enumerate() {
                if !pivots.contains(&k) {
                    index.insert((b, k), basis.len());
                    basis.push(BasisElement {
                        label: self.render(w),
                        degree: bl.degree,
                    });
                }
            }
        }
        let reduce = |b: usize, v: SparseVec<F>| -> SparseVec<F> {
            let mut v = v;
            for r in &rrefs[b] {
                let pc = r[0].0;
                if let Some(c) = v.iter().find(|(k, _)| *k == pc).map(|(_, c)| c.clone()) {
                    let mut acc = v.clone();
                    acc.extend(r.iter().map(|(k, x)| (*k, -(c.mul_ref(x)))));
                    v = normalize_sparse(acc);
                }
            }
            v
        };
        let mut entries: Vec<(usize, usize)> = index.keys().copied().collect();
        entries.sort_by_key(|k| index[k]);
        let mut products = Vec::new();
        for &(bx, kx) in &entries {
            for &(by, ky) in &entries {
                if self.space.blocks[bx].tgt != self.space.blocks[by].src {
                    continue;
                }
                let Some((t, w)) = self.concat(bx, &vec![(kx, F::one())], by, &vec![(ky, F::one())]) else {
                    continue;
                };
                let red = reduce(t, w);
                let v: SparseVec<F> = red.into_iter().map(|(k, c)| (index[&(t, k)], c)).collect();
                products.push((index[&(bx, kx)], index[&(by, ky)], v));
            }
        }
        let idempotents: Vec<SparseVec<F>> = (0..self.m)
            .map(|v| {
                let (b, k) = self.space.locate[&vec![v as u32]];
                vec![(index[&(b, k)], F::one())]
            })
            .collect();
        let unit = normalize_sparse(idempotents.iter().flatten().cloned().collect());
        GradedAlgebra::from_parts(basis, products, Some(unit), Some(idempotents))
    }
}

fn from_echelons<F: Field>(out: Vec<Echelon<F>>) -> HomogeneousIdeal<F> {
    HomogeneousIdeal {
        blocks: out.into_iter().map(Subspace::from_echelon).collect(),
    }
}

/// `Tor_q` dimensions per `(degree, source, target)` block (0-based vertices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorTerm {
    pub q: usize,
    pub blocks: BTreeMap<(i64, usize, usize), usize>,
    pub space: GradedVectorSpace,
}

impl TorTerm {
    fn new(q: usize, blocks: BTreeMap<(i64, usize, usize), usize>) -> Self {
        let mut space = GradedVectorSpace::new();
        for (&(d, s, t), &n) in &blocks {
            space.push_block(d, n, &format!("{}>{}", s + 1, t + 1));
        }
        TorTerm { q, blocks, space }
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.space.dims()
    }
}
