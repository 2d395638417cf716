//! Bigraded Hochschild cohomology `HH^{p,q}(A, M)`.
//!
//! Two engines compute the same groups. The bar engine works with cochains
//! `Hom^q(Ā^{⊗p}, M)`, either over the base `R = A^0` with the normalized bar
//! construction or over the ground field with the full standard complex. The
//! resolution engine uses an explicitly supplied periodic free resolution of
//! `A` by shifted copies of `A^e`.
//!
//! Only words whose total degree can reach `M` after the shift by `q` are
//! ever materialized.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{CoeffDoc, GradedAlgebra, GradedBimodule};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::graded::DegreeSupport;
use crate::linalg::{normalize_sparse, Echelon, SparseVec};

pub const DEFAULT_MAX_WORDS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarMode {
    /// Normalized bar construction over `R = A^0`, tensor words in `A^{>0}`.
    RelativeNormalized,
    /// Standard complex over the ground field, words in all of `A`.
    Absolute,
}

impl std::str::FromStr for BarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relative" | "relative_normalized" => Ok(BarMode::RelativeNormalized),
            "absolute" => Ok(BarMode::Absolute),
            _ => Err(Error::invalid(format!("unknown bar mode `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HhOptions {
    pub max_words: usize,
    pub cocycles: bool,
}

impl Default for HhOptions {
    fn default() -> Self {
        HhOptions {
            max_words: DEFAULT_MAX_WORDS,
            cocycles: false,
        }
    }
}

/// One term `word ↦ coeff · target` of a cocycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleTerm {
    pub word: Vec<String>,
    pub target: String,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HhResult {
    pub p: usize,
    pub q: i64,
    pub dim: usize,
    pub mode: BarMode,
    /// Cochain dimensions in homological degrees `p-1, p, p+1`.
    pub slice_dims: [usize; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycles: Option<Vec<Vec<CocycleTerm>>>,
}

/// Tensor words are keyed by their starting vertex followed by letter ids,
/// so that length-0 words at different vertices stay distinct.
type WordKey = Vec<u32>;

struct BarContext<'a, F> {
    alg: &'a GradedAlgebra<F>,
    mode: BarMode,
    vertices: usize,
    /// Basis indices of `A` used as letters.
    letters: Vec<usize>,
    letter_of: Vec<Option<u32>>,
    /// Ends of every basis element of `A`.
    ends: Vec<(u32, u32)>,
    /// For each letter `z`: pairs of letters `(x, y)` with `x y = c z + ...`.
    coproduct: Vec<Vec<(u32, u32, F)>>,
    letter_deg_min: i64,
    letter_deg_max: i64,
}

impl<'a, F: Field> BarContext<'a, F> {
    fn new(alg: &'a GradedAlgebra<F>, mode: BarMode) -> Result<Self> {
        let (vertices, ends, letters): (usize, Vec<(u32, u32)>, Vec<usize>) = match mode {
            BarMode::Absolute => (1, vec![(0, 0); alg.dim()], (0..alg.dim()).collect()),
            BarMode::RelativeNormalized => {
                let split = alg.split_base()?;
                let ends = split.ends.iter().map(|&(l, r)| (l as u32, r as u32)).collect();
                let letters = (0..alg.dim()).filter(|&i| alg.degree(i) > 0).collect();
                (split.idempotents, ends, letters)
            }
        };
        let mut letter_of = vec![None; alg.dim()];
        for (li, &b) in letters.iter().enumerate() {
            letter_of[b] = Some(li as u32);
        }
        let mut coproduct = vec![Vec::new(); letters.len()];
        for (xi, &x) in letters.iter().enumerate() {
            for (yi, &y) in letters.iter().enumerate() {
                for (z, c) in alg.mul_basis(x, y) {
                    // Products of positive-degree letters stay positive, so in
                    // relative mode nothing is dropped here.
                    if let Some(zi) = letter_of[*z] {
                        coproduct[zi as usize].push((xi as u32, yi as u32, c.clone()));
                    }
                }
            }
        }
        let degs: Vec<i64> = letters.iter().map(|&b| alg.degree(b)).collect();
        Ok(BarContext {
            alg,
            mode,
            vertices,
            letter_of,
            ends,
            coproduct,
            letter_deg_min: degs.iter().copied().min().unwrap_or(0),
            letter_deg_max: degs.iter().copied().max().unwrap_or(0),
            letters,
        })
    }

    fn letter_ends(&self, li: u32) -> (u32, u32) {
        self.ends[self.letters[li as usize]]
    }

    fn letter_deg(&self, li: u32) -> i64 {
        self.alg.degree(self.letters[li as usize])
    }

    fn word_ends(&self, w: &[u32]) -> (u32, u32) {
        match w.last() {
            Some(&last) if w.len() > 1 => (w[0], self.letter_ends(last).1),
            _ => (w[0], w[0]),
        }
    }

    /// All composable words of length `p` whose degree `W` satisfies
    /// `lo ≤ W ≤ hi` and `accept(l, r, W)`. Errors past `cap` words.
    fn enumerate(
        &self,
        p: usize,
        lo: i64,
        hi: i64,
        cap: usize,
        accept: &dyn Fn(u32, u32, i64) -> bool,
    ) -> Result<Vec<(WordKey, i64)>> {
        let mut out = Vec::new();
        let mut word: WordKey = Vec::with_capacity(p + 1);
        for v in 0..self.vertices as u32 {
            word.clear();
            word.push(v);
            self.extend(&mut word, v, 0, p, lo, hi, cap, accept, &mut out)?;
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        word: &mut WordKey,
        right: u32,
        deg: i64,
        remaining: usize,
        lo: i64,
        hi: i64,
        cap: usize,
        accept: &dyn Fn(u32, u32, i64) -> bool,
        out: &mut Vec<(WordKey, i64)>,
    ) -> Result<()> {
        let rem = remaining as i64;
        if deg + rem * self.letter_deg_min > hi || deg + rem * self.letter_deg_max < lo {
            return Ok(());
        }
        if remaining == 0 {
            if accept(word[0], right, deg) {
                if out.len() >= cap {
                    return Err(Error::ResourceCap {
                        what: format!("words in a length-{} bar slice", word.len() - 1),
                        needed: cap + 1,
                        cap,
                    });
                }
                out.push((word.clone(), deg));
            }
            return Ok(());
        }
        for li in 0..self.letters.len() as u32 {
            let (l, r) = self.letter_ends(li);
            if l != right {
                continue;
            }
            word.push(li);
            self.extend(word, r, deg + self.letter_deg(li), remaining - 1, lo, hi, cap, accept, out)?;
            word.pop();
        }
        Ok(())
    }

    fn render_word(&self, w: &[u32]) -> Vec<String> {
        if w.len() == 1 {
            return match self.mode {
                BarMode::Absolute => vec![],
                BarMode::RelativeNormalized => vec![format!("e{}", w[0] + 1)],
            };
        }
        w[1..]
            .iter()
            .map(|&li| self.alg.label(self.letters[li as usize]).to_string())
            .collect()
    }
}

/// Basis of `Hom^q(Ā^{⊗p}, M)` compatible with the base: pairs `(word, m)`
/// with matching ends and `deg m = deg word + q`.
struct CochainSlice {
    words: Vec<WordKey>,
    index: HashMap<WordKey, usize>,
    offsets: Vec<usize>,
    groups: Vec<usize>,
    dim: usize,
}

/// `M` basis grouped by `(l, r, degree)`.
struct TargetGroups {
    key_to_group: HashMap<(u32, u32, i64), usize>,
    groups: Vec<Vec<usize>>,
    position: Vec<usize>,
    deg_min: i64,
    deg_max: i64,
}

impl TargetGroups {
    fn new<F: Field>(module: &GradedBimodule<F>, ends: &[(u32, u32)]) -> Self {
        let mut key_to_group = HashMap::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut position = vec![0; module.dim()];
        for x in 0..module.dim() {
            let key = (ends[x].0, ends[x].1, module.degree(x));
            let g = *key_to_group.entry(key).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            position[x] = groups[g].len();
            groups[g].push(x);
        }
        let support = module.support();
        TargetGroups {
            key_to_group,
            groups,
            position,
            deg_min: support.first().copied().unwrap_or(0),
            deg_max: support.last().copied().unwrap_or(-1),
        }
    }

    fn group(&self, l: u32, r: u32, deg: i64) -> Option<usize> {
        self.key_to_group.get(&(l, r, deg)).copied()
    }
}

impl CochainSlice {
    fn build<F: Field>(ctx: &BarContext<'_, F>, targets: &TargetGroups, p: usize, q: i64, cap: usize) -> Result<Self> {
        let accept = |l: u32, r: u32, w: i64| targets.group(l, r, w + q).is_some();
        let found = ctx.enumerate(p, targets.deg_min - q, targets.deg_max - q, cap, &accept)?;
        let mut words = Vec::with_capacity(found.len());
        let mut index = HashMap::with_capacity(found.len());
        let mut offsets = Vec::with_capacity(found.len());
        let mut groups = Vec::with_capacity(found.len());
        let mut dim = 0usize;
        for (w, deg) in found {
            let (l, r) = ctx.word_ends(&w);
            let g = targets.group(l, r, deg + q).expect("accepted word");
            index.insert(w.clone(), words.len());
            words.push(w);
            offsets.push(dim);
            groups.push(g);
            dim += targets.groups[g].len();
        }
        if dim > cap {
            return Err(Error::ResourceCap {
                what: format!("cochains in homological degree {p}"),
                needed: dim,
                cap,
            });
        }
        Ok(CochainSlice {
            words,
            index,
            offsets,
            groups,
            dim,
        })
    }

    fn column(&self, word: &[u32], x: usize, targets: &TargetGroups) -> Option<usize> {
        let wi = *self.index.get(word)?;
        debug_assert!(targets.groups[self.groups[wi]].contains(&x));
        Some(self.offsets[wi] + targets.position[x])
    }

    /// `(word index, target element)` for a column.
    fn entries<'s>(&'s self, targets: &'s TargetGroups) -> impl Iterator<Item = (usize, usize)> + 's {
        self.groups
            .iter()
            .enumerate()
            .flat_map(move |(wi, &g)| targets.groups[g].iter().map(move |&x| (wi, x)))
    }
}

/// `δ(φ_{w,x})` as a sparse vector over the next slice, where `φ_{w,x}`
/// sends `w` to `x` and every other word to zero. With
/// `δf(a_1..a_{p+1}) = a_1 f(a_2..) + Σ (-1)^i f(..a_i a_{i+1}..) + (-1)^{p+1} f(..a_p) a_{p+1}`.
fn coboundary<F: Field>(
    ctx: &BarContext<'_, F>,
    module: &GradedBimodule<F>,
    targets: &TargetGroups,
    next: &CochainSlice,
    word: &[u32],
    x: usize,
) -> SparseVec<F> {
    let p = word.len() - 1;
    let (l, r) = ctx.word_ends(word);
    let mut acc: Vec<(usize, F)> = Vec::new();
    let mut buf: WordKey = Vec::with_capacity(p + 2);

    for (li, &b) in ctx.letters.iter().enumerate() {
        let (al, ar) = ctx.ends[b];
        if ar == l {
            buf.clear();
            buf.push(al);
            buf.push(li as u32);
            buf.extend_from_slice(&word[1..]);
            for (y, c) in module.act_left(b, x) {
                if let Some(col) = next.column(&buf, *y, targets) {
                    acc.push((col, c.clone()));
                }
            }
        }
        if al == r {
            buf.clear();
            buf.extend_from_slice(word);
            buf.push(li as u32);
            let neg = (p + 1) % 2 == 1;
            for (y, c) in module.act_right(x, b) {
                if let Some(col) = next.column(&buf, *y, targets) {
                    acc.push((col, if neg { -c.clone() } else { c.clone() }));
                }
            }
        }
    }
    for i in 1..=p {
        let z = word[i] as usize;
        let neg = i % 2 == 1;
        for (xa, xb, c) in &ctx.coproduct[z] {
            buf.clear();
            buf.extend_from_slice(&word[..i]);
            buf.push(*xa);
            buf.push(*xb);
            buf.extend_from_slice(&word[i + 1..]);
            if let Some(col) = next.column(&buf, x, targets) {
                acc.push((col, if neg { -c.clone() } else { c.clone() }));
            }
        }
    }
    normalize_sparse(acc)
}

fn coboundary_rows<F: Field>(
    ctx: &BarContext<'_, F>,
    module: &GradedBimodule<F>,
    targets: &TargetGroups,
    from: &CochainSlice,
    to: &CochainSlice,
) -> Vec<SparseVec<F>> {
    let entries: Vec<(usize, usize)> = from.entries(targets).collect();
    entries
        .par_iter()
        .map(|&(wi, x)| coboundary(ctx, module, targets, to, &from.words[wi], x))
        .collect()
}

fn sparse_rank<F: Field>(ncols: usize, rows: &[SparseVec<F>]) -> usize {
    let mut ech = Echelon::new(ncols);
    for r in rows {
        if !r.is_empty() {
            ech.insert(r.clone());
        }
    }
    ech.rank()
}

fn check_module<F: Field>(alg: &GradedAlgebra<F>, module: &GradedBimodule<F>) -> Result<()> {
    let report = alg.validate();
    if !report.passes() {
        return Err(Error::InvalidAlgebra(format!(
            "{} axiom violations, first: {:?}",
            report.violations.len(),
            report.violations[0]
        )));
    }
    let errs = module.validate(alg);
    if let Some(e) = errs.first() {
        return Err(Error::invalid(format!("coefficient bimodule: {e}")));
    }
    Ok(())
}

fn module_ends<F: Field>(alg: &GradedAlgebra<F>, module: &GradedBimodule<F>, mode: BarMode) -> Result<Vec<(u32, u32)>> {
    Ok(match mode {
        BarMode::Absolute => vec![(0, 0); module.dim()],
        BarMode::RelativeNormalized => module
            .ends(alg)?
            .into_iter()
            .map(|(l, r)| (l as u32, r as u32))
            .collect(),
    })
}

/// `dim HH^{p,q}(A, M)` from the bar construction, with cocycle
/// representatives of a basis on request.
pub fn hh_bar<F: Field>(
    alg: &GradedAlgebra<F>,
    module: &GradedBimodule<F>,
    p: usize,
    q: i64,
    mode: BarMode,
    opts: HhOptions,
) -> Result<HhResult> {
    check_module(alg, module)?;
    let ctx = BarContext::new(alg, mode)?;
    let ends = module_ends(alg, module, mode)?;
    let targets = TargetGroups::new(module, &ends);
    let cap = opts.max_words;

    let cur = CochainSlice::build(&ctx, &targets, p, q, cap)?;
    let next = CochainSlice::build(&ctx, &targets, p + 1, q, cap)?;
    let prev = if p > 0 {
        Some(CochainSlice::build(&ctx, &targets, p - 1, q, cap)?)
    } else {
        None
    };
    let slice_dims = [prev.as_ref().map_or(0, |s| s.dim), cur.dim, next.dim];
    if cur.dim == 0 {
        return Ok(HhResult {
            p,
            q,
            dim: 0,
            mode,
            slice_dims,
            cocycles: opts.cocycles.then(Vec::new),
        });
    }

    let ((rank_out, out_rows), (rank_in, in_rows)) = rayon::join(
        || {
            let rows = coboundary_rows(&ctx, module, &targets, &cur, &next);
            (sparse_rank(next.dim, &rows), rows)
        },
        || match &prev {
            Some(prev) if prev.dim > 0 => {
                let rows = coboundary_rows(&ctx, module, &targets, prev, &cur);
                (sparse_rank(cur.dim, &rows), rows)
            }
            _ => (0, Vec::new()),
        },
    );
    let dim = cur.dim - rank_out - rank_in;

    let cocycles = if opts.cocycles {
        let reps = cohomology_representatives(cur.dim, next.dim, &out_rows, &in_rows);
        let columns: Vec<(usize, usize)> = cur.entries(&targets).collect();
        Some(
            reps.iter()
                .map(|v| {
                    v.iter()
                        .map(|(col, c)| {
                            let (wi, x) = columns[*col];
                            CocycleTerm {
                                word: ctx.render_word(&cur.words[wi]),
                                target: module.basis()[x].label.clone(),
                                coeff: c.to_string(),
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    } else {
        None
    };
    Ok(HhResult {
        p,
        q,
        dim,
        mode,
        slice_dims,
        cocycles,
    })
}

/// Kernel of the map with rows `out_rows` (one per source coordinate),
/// reduced modulo the span of `in_rows`.
fn cohomology_representatives<F: Field>(
    dim: usize,
    next_dim: usize,
    out_rows: &[SparseVec<F>],
    in_rows: &[SparseVec<F>],
) -> Vec<SparseVec<F>> {
    let mut columns: Vec<Vec<(usize, F)>> = vec![Vec::new(); next_dim];
    for (j, row) in out_rows.iter().enumerate() {
        for (c, v) in row {
            columns[*c].push((j, v.clone()));
        }
    }
    let mut ech = Echelon::new(dim);
    for c in columns {
        if !c.is_empty() {
            ech.insert(c);
        }
    }
    let kernel = ech.nullspace();
    let mut image = Echelon::new(dim);
    for r in in_rows {
        if !r.is_empty() {
            image.insert(r.clone());
        }
    }
    let mut reps = Vec::new();
    for v in kernel {
        if image.insert(v.clone()) {
            reps.push(v);
        }
    }
    reps
}

/// Checks `δ ∘ δ = 0` from homological degree `p` to `p + 2`.
pub fn check_coboundary_squared<F: Field>(
    alg: &GradedAlgebra<F>,
    module: &GradedBimodule<F>,
    p: usize,
    q: i64,
    mode: BarMode,
    max_words: usize,
) -> Result<bool> {
    let ctx = BarContext::new(alg, mode)?;
    let ends = module_ends(alg, module, mode)?;
    let targets = TargetGroups::new(module, &ends);
    let s0 = CochainSlice::build(&ctx, &targets, p, q, max_words)?;
    let s1 = CochainSlice::build(&ctx, &targets, p + 1, q, max_words)?;
    let s2 = CochainSlice::build(&ctx, &targets, p + 2, q, max_words)?;
    let first = coboundary_rows(&ctx, module, &targets, &s0, &s1);
    let second = coboundary_rows(&ctx, module, &targets, &s1, &s2);
    Ok(first.iter().all(|row| {
        let mut acc = Vec::new();
        for (j, c) in row {
            for (k, d) in &second[*j] {
                acc.push((*k, c.mul_ref(d)));
            }
        }
        normalize_sparse(acc).is_empty()
    }))
}

/// Number of composable words of length `p` and degree `q` in the bar
/// construction, i.e. `dim (Ā^{⊗p})_q` (tensor over `R` in relative mode).
pub fn bar_word_count<F: Field>(alg: &GradedAlgebra<F>, p: usize, q: i64, mode: BarMode, max_words: usize) -> Result<usize> {
    let ctx = BarContext::new(alg, mode)?;
    Ok(ctx.enumerate(p, q, q, max_words, &|_, _, _| true)?.len())
}

/// The term `B_p = A ⊗ Ā^{⊗p} ⊗ A` of the bar resolution in one internal
/// degree, with its differential into `B_{p-1}` (or the multiplication map
/// onto `A` when `p = 0`).
#[derive(Clone, Debug)]
pub struct BarComplexSlice<F> {
    pub p: usize,
    pub q: i64,
    /// `(left factor, word, right factor)` as basis indices / letter ids.
    pub basis: Vec<(usize, Vec<String>, usize)>,
    /// Row `i` is the image of basis element `i`.
    pub differential: Vec<SparseVec<F>>,
    pub target_dim: usize,
}

struct BarTerm {
    keys: Vec<(usize, WordKey, usize)>,
    index: HashMap<(usize, WordKey, usize), usize>,
}

fn bar_term<F: Field>(ctx: &BarContext<'_, F>, p: usize, q: i64, cap: usize) -> Result<BarTerm> {
    let alg = ctx.alg;
    let support = alg.support();
    let (amin, amax) = (support[0], *support.last().expect("nonzero algebra"));
    let words = ctx.enumerate(p, q - 2 * amax, q - 2 * amin, cap, &|_, _, _| true)?;
    let mut keys = Vec::new();
    for (w, wd) in words {
        let (l, r) = ctx.word_ends(&w);
        for a in 0..alg.dim() {
            if ctx.ends[a].1 != l {
                continue;
            }
            for b in 0..alg.dim() {
                if ctx.ends[b].0 == r && alg.degree(a) + wd + alg.degree(b) == q {
                    keys.push((a, w.clone(), b));
                    if keys.len() > cap {
                        return Err(Error::ResourceCap {
                            what: format!("bar resolution term {p} in degree {q}"),
                            needed: keys.len(),
                            cap,
                        });
                    }
                }
            }
        }
    }
    let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    Ok(BarTerm { keys, index })
}

/// Assembles `B_p` in internal degree `q` and its differential.
pub fn bar_slice<F: Field>(alg: &GradedAlgebra<F>, p: usize, q: i64, mode: BarMode, max_words: usize) -> Result<BarComplexSlice<F>> {
    let ctx = BarContext::new(alg, mode)?;
    let src = bar_term(&ctx, p, q, max_words)?;
    let mut differential = Vec::with_capacity(src.keys.len());
    let target_dim;
    if p == 0 {
        target_dim = alg.dim();
        for (a, _, b) in &src.keys {
            differential.push(alg.mul_basis(*a, *b).clone());
        }
    } else {
        let tgt = bar_term(&ctx, p - 1, q, max_words)?;
        target_dim = tgt.keys.len();
        for (a, w, b) in &src.keys {
            let mut acc = Vec::new();
            let mut push = |a2: usize, w2: WordKey, b2: usize, c: F| {
                let i = *tgt.index.get(&(a2, w2, b2)).expect("differential stays in the slice");
                acc.push((i, c));
            };
            // a·a_1 [a_2 | ...] b
            let first = ctx.letters[w[1] as usize];
            let rest: WordKey = if w.len() == 2 {
                vec![ctx.ends[first].1]
            } else {
                let mut v = vec![ctx.ends[first].1];
                v.extend_from_slice(&w[2..]);
                v
            };
            for (z, c) in alg.mul_basis(*a, first) {
                push(*z, rest.clone(), *b, c.clone());
            }
            for i in 1..p {
                let neg = i % 2 == 1;
                let x = ctx.letters[w[i] as usize];
                let y = ctx.letters[w[i + 1] as usize];
                for (z, c) in alg.mul_basis(x, y) {
                    let Some(zi) = ctx.letter_of[*z] else { continue };
                    let mut w2 = w[..i].to_vec();
                    w2.push(zi);
                    w2.extend_from_slice(&w[i + 2..]);
                    push(*a, w2, *b, if neg { -c.clone() } else { c.clone() });
                }
            }
            let last = ctx.letters[w[p] as usize];
            let init: WordKey = w[..p].to_vec();
            let neg = p % 2 == 1;
            for (z, c) in alg.mul_basis(last, *b) {
                push(*a, init.clone(), *z, if neg { -c.clone() } else { c.clone() });
            }
            differential.push(normalize_sparse(acc));
        }
    }
    Ok(BarComplexSlice {
        p,
        q,
        basis: src
            .keys
            .iter()
            .map(|(a, w, b)| (*a, ctx.render_word(w), *b))
            .collect(),
        differential,
        target_dim,
    })
}

impl<F: Field> BarComplexSlice<F> {
    /// Whether `self.differential` followed by `lower.differential` vanishes.
    pub fn composes_to_zero(&self, lower: &BarComplexSlice<F>) -> bool {
        self.differential.iter().all(|row| {
            let mut acc = Vec::new();
            for (j, c) in row {
                for (k, d) in &lower.differential[*j] {
                    acc.push((*k, c.mul_ref(d)));
                }
            }
            normalize_sparse(acc).is_empty()
        })
    }
}

// ---------------------------------------------------------------------------
// Periodic resolutions
// ---------------------------------------------------------------------------

/// `Σ c · left ⊗ right` in `A^e`, as basis indices of `A`.
pub type EnvelopingElement<F> = Vec<(usize, usize, F)>;

/// A free resolution `... → F^2 → F^1 → F^0 → A` with `F^j = A^e(shift_j)`,
/// generator `g_j` in degree `-shift_j`, and `d_j(g_j) = x_j · g_{j-1}`.
#[derive(Clone, Debug)]
pub struct PeriodicResolutionSpec<F> {
    pub shifts: Vec<i64>,
    /// `multipliers[j-1] = x_j` for `j ≥ 1`.
    pub multipliers: Vec<EnvelopingElement<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvelopingTermDoc {
    pub left: String,
    pub right: String,
    pub coeff: CoeffDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionTermDoc {
    pub shift: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub multiplier: Vec<EnvelopingTermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionDoc {
    pub terms: Vec<ResolutionTermDoc>,
}

impl<F: Field> PeriodicResolutionSpec<F> {
    /// The 2-periodic resolution of `k[t]/t^{n+1}`, `deg t = k`, with terms
    /// `F^0 .. F^len`: odd maps multiply by `t⊗1 - 1⊗t`, even ones by
    /// `Σ t^{n-j} ⊗ t^j`.
    pub fn truncated_poly(alg: &GradedAlgebra<F>, n: u32, k: i64, len: usize) -> Result<Self> {
        let power = |j: u32| -> Result<usize> {
            let label = match j {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{j}"),
            };
            alg.index_of(&label)
                .ok_or_else(|| Error::invalid(format!("algebra has no basis element `{label}`")))
        };
        let span = i64::from(n + 1) * k;
        let shifts = (0..=len)
            .map(|j| {
                let i = (j / 2) as i64;
                if j % 2 == 0 {
                    -i * span
                } else {
                    -(i * span + k)
                }
            })
            .collect();
        let u = vec![(power(1)?, power(0)?, F::one()), (power(0)?, power(1)?, -F::one())];
        let v = (0..=n)
            .map(|j| Ok((power(n - j)?, power(j)?, F::one())))
            .collect::<Result<Vec<_>>>()?;
        let multipliers = (1..=len).map(|j| if j % 2 == 1 { u.clone() } else { v.clone() }).collect();
        Ok(PeriodicResolutionSpec { shifts, multipliers })
    }

    pub fn from_doc(doc: &ResolutionDoc, alg: &GradedAlgebra<F>) -> Result<Self> {
        if doc.terms.is_empty() {
            return Err(Error::invalid("a resolution needs at least the term F^0"));
        }
        let lookup = |l: &str| {
            alg.index_of(l)
                .ok_or_else(|| Error::invalid(format!("unknown basis label `{l}` in resolution")))
        };
        let shifts = doc.terms.iter().map(|t| t.shift).collect();
        let multipliers = doc.terms[1..]
            .iter()
            .map(|t| {
                t.multiplier
                    .iter()
                    .map(|e| Ok((lookup(&e.left)?, lookup(&e.right)?, e.coeff.parse::<F>()?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PeriodicResolutionSpec { shifts, multipliers })
    }

    pub fn to_doc(&self, alg: &GradedAlgebra<F>) -> ResolutionDoc {
        let terms = self
            .shifts
            .iter()
            .enumerate()
            .map(|(j, &shift)| ResolutionTermDoc {
                shift,
                multiplier: if j == 0 {
                    Vec::new()
                } else {
                    self.multipliers[j - 1]
                        .iter()
                        .map(|(a, b, c)| EnvelopingTermDoc {
                            left: alg.label(*a).into(),
                            right: alg.label(*b).into(),
                            coeff: CoeffDoc::Text(c.to_string()),
                        })
                        .collect()
                },
            })
            .collect();
        ResolutionDoc { terms }
    }

    /// Index of the last term.
    pub fn len(&self) -> usize {
        self.shifts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.len() <= 1
    }

    fn generator_degree(&self, j: usize) -> i64 {
        -self.shifts[j]
    }

    /// `(u ⊗ v) ↦ Σ c (u a) ⊗ (b v)`: the image of `u g_j v` under `d_j`, in `A ⊗ A`.
    fn apply(&self, alg: &GradedAlgebra<F>, j: usize, u: usize, v: usize) -> Vec<((usize, usize), F)> {
        let mut out: BTreeMap<(usize, usize), F> = BTreeMap::new();
        for (a, b, c) in &self.multipliers[j - 1] {
            for (ua, c1) in alg.mul_basis(u, *a) {
                for (bv, c2) in alg.mul_basis(*b, v) {
                    let e = out.entry((*ua, *bv)).or_insert_with(F::zero);
                    e.add_mul_assign(&c.mul_ref(c1), c2);
                }
            }
        }
        out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Degree-0 maps, composites vanishing, augmentation killing `d_1`, and
    /// exactness at positions `0..len` in every internal degree.
    pub fn validate(&self, alg: &GradedAlgebra<F>) -> Result<()> {
        if self.multipliers.len() + 1 != self.shifts.len() {
            return Err(Error::invalid("one multiplier per term beyond F^0 is required"));
        }
        if self.shifts.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid("term shifts must be weakly decreasing"));
        }
        for j in 1..=self.len() {
            let want = self.generator_degree(j) - self.generator_degree(j - 1);
            if self.multipliers[j - 1].iter().any(|(a, b, _)| alg.degree(*a) + alg.degree(*b) != want) {
                return Err(Error::invalid(format!(
                    "multiplier of d_{j} is not homogeneous of degree {want}"
                )));
            }
        }
        // Composites on the generator 1 ⊗ 1 suffice, since all maps are A^e-linear.
        for j in 2..=self.len() {
            let mut total: BTreeMap<(usize, usize), F> = BTreeMap::new();
            for (a, b, c) in &self.multipliers[j - 1] {
                for ((x, y), d) in self.apply(alg, j - 1, *a, *b) {
                    total.entry((x, y)).or_insert_with(F::zero).add_mul_assign(c, &d);
                }
            }
            if total.values().any(|c| !c.is_zero()) {
                return Err(Error::invalid(format!("d_{} ∘ d_{j} is not zero", j - 1)));
            }
        }
        if self.len() >= 1 {
            let mut acc = Vec::new();
            for (a, b, c) in &self.multipliers[0] {
                for (z, d) in alg.mul_basis(*a, *b) {
                    acc.push((*z, c.mul_ref(d)));
                }
            }
            if !normalize_sparse(acc).is_empty() {
                return Err(Error::invalid("augmentation ∘ d_1 is not zero"));
            }
        }
        self.check_exactness(alg)
    }

    fn check_exactness(&self, alg: &GradedAlgebra<F>) -> Result<()> {
        let support = alg.support();
        let (amin, amax) = (support[0], *support.last().expect("nonzero algebra"));
        let by_degree = |d: i64| -> Vec<(usize, usize)> {
            let mut v = Vec::new();
            for u in 0..alg.dim() {
                for w in 0..alg.dim() {
                    if alg.degree(u) + alg.degree(w) == d {
                        v.push((u, w));
                    }
                }
            }
            v
        };
        // rank of d_j : F^j_e → F^{j-1}_e (j = 0: the augmentation onto A_e)
        let rank_at = |j: usize, e: i64| -> usize {
            let src = by_degree(e - self.generator_degree(j));
            if src.is_empty() {
                return 0;
            }
            let rows: Vec<SparseVec<F>> = if j == 0 {
                src.iter().map(|&(u, w)| alg.mul_basis(u, w).clone()).collect()
            } else {
                let tgt = by_degree(e - self.generator_degree(j - 1));
                let index: HashMap<(usize, usize), usize> = tgt.iter().enumerate().map(|(i, k)| (*k, i)).collect();
                src.iter()
                    .map(|&(u, w)| {
                        normalize_sparse(
                            self.apply(alg, j, u, w)
                                .into_iter()
                                .map(|(k, c)| (index[&k], c))
                                .collect(),
                        )
                    })
                    .collect()
            };
            let ncols = if j == 0 { alg.dim() } else { by_degree(e - self.generator_degree(j - 1)).len() };
            sparse_rank(ncols, &rows)
        };
        for j in 0..self.len() {
            let g = self.generator_degree(j);
            for e in g + 2 * amin..=g + 2 * amax {
                let dim = by_degree(e - g).len();
                if rank_at(j + 1, e) + rank_at(j, e) != dim {
                    return Err(Error::NotExact { position: j, degree: e });
                }
            }
        }
        for e in amin..=amax {
            let have = (0..alg.dim()).filter(|&i| alg.degree(i) == e).count();
            if rank_at(0, e) != have {
                return Err(Error::NotExact { position: 0, degree: e });
            }
        }
        Ok(())
    }
}

/// `dim HH^{p,q}(A, M)` from `Hom^q_{A^e}(F^•, M)`, where the cochains on
/// `F^j` are `M` in degree `deg g_j + q`.
pub fn hh_resolution<F: Field>(
    alg: &GradedAlgebra<F>,
    res: &PeriodicResolutionSpec<F>,
    module: &GradedBimodule<F>,
    p: usize,
    q: i64,
) -> Result<usize> {
    if p + 1 > res.len() {
        return Err(Error::invalid(format!(
            "HH^{p} needs the resolution through F^{}, but it stops at F^{}",
            p + 1,
            res.len()
        )));
    }
    res.validate(alg)?;
    let basis_in = |j: usize| -> Vec<usize> {
        let d = res.generator_degree(j) + q;
        (0..module.dim()).filter(|&x| module.degree(x) == d).collect()
    };
    // δ^j: Hom(F^j) → Hom(F^{j+1}), y ↦ Σ c · a y b over x_{j+1}
    let rank = |j: usize| -> usize {
        let src = basis_in(j);
        let tgt = basis_in(j + 1);
        if src.is_empty() || tgt.is_empty() {
            return 0;
        }
        let index: HashMap<usize, usize> = tgt.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let rows: Vec<SparseVec<F>> = src
            .iter()
            .map(|&y| {
                let mut acc = Vec::new();
                for (a, b, c) in &res.multipliers[j] {
                    for (ay, c1) in module.act_left(*a, y) {
                        for (ayb, c2) in module.act_right(*ay, *b) {
                            acc.push((index[ayb], c.mul_ref(c1).mul_ref(c2)));
                        }
                    }
                }
                normalize_sparse(acc)
            })
            .collect();
        sparse_rank(tgt.len(), &rows)
    };
    let dim = basis_in(p).len();
    let out = rank(p);
    let inc = if p > 0 { rank(p - 1) } else { 0 };
    Ok(dim - out - inc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub q: usize,
    pub internal_degree: i64,
    pub dim: usize,
}

/// `dim HH^{q, 2-q}(A, A)` for `3 ≤ q ≤ q_max`, slices computed in parallel.
pub fn kadeishvili_scan<F: Field>(alg: &GradedAlgebra<F>, q_max: usize, mode: BarMode, max_words: usize) -> Result<Vec<ScanRow>> {
    let module = GradedBimodule::regular(alg);
    let opts = HhOptions {
        max_words,
        cocycles: false,
    };
    (3..=q_max)
        .into_par_iter()
        .map(|q| {
            let internal = 2 - q as i64;
            hh_bar(alg, &module, q, internal, mode, opts).map(|r| ScanRow {
                q,
                internal_degree: internal,
                dim: r.dim,
            })
        })
        .collect()
}
