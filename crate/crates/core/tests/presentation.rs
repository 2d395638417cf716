mod common;

use std::collections::{BTreeMap, HashMap};

use formalitykit_core::config::ConfigGraph;
use formalitykit_core::linalg::sparse_rank;
use formalitykit_core::presentation::{mindeg_bound_at, Generator, PresentationDoc, TensorPresentation};
use formalitykit_core::{ErrorKind, Field, GradedAlgebra, Preset, Rational, F5};
use proptest::prelude::*;

type Q = Rational;

/// `Tor^A_q(R, R)` per internal degree from the normalized bar complex
/// `Ā ⊗_R ... ⊗_R Ā` with `d(a_1|...|a_q) = Σ (-1)^j a_1|...|a_j a_{j+1}|...|a_q`.
fn bar_tor<F: Field>(alg: &GradedAlgebra<F>, q: usize, max_degree: i64) -> BTreeMap<i64, usize> {
    let ends = alg.split_base().unwrap().ends;
    let letters: Vec<usize> = (0..alg.dim()).filter(|&i| alg.degree(i) > 0).collect();
    let words = |len: usize| -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &out {
                for &l in &letters {
                    let fits = w.last().is_none_or(|&prev| ends[prev].1 == ends[l].0);
                    let deg: i64 = w.iter().map(|&x| alg.degree(x)).sum::<i64>() + alg.degree(l);
                    if fits && deg <= max_degree {
                        let mut v = w.clone();
                        v.push(l);
                        next.push(v);
                    }
                }
            }
            out = next;
        }
        out
    };
    let degree = |w: &[usize]| w.iter().map(|&x| alg.degree(x)).sum::<i64>();
    // Rank of d: C_len → C_{len-1} restricted to internal degree `deg`.
    let rank = |len: usize, deg: i64| -> usize {
        if len == 0 {
            return 0;
        }
        let src: Vec<Vec<usize>> = words(len).into_iter().filter(|w| degree(w) == deg).collect();
        let tgt: Vec<Vec<usize>> = words(len - 1).into_iter().filter(|w| degree(w) == deg).collect();
        let index: HashMap<&Vec<usize>, usize> = tgt.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let rows = src.iter().map(|w| {
            let mut acc = Vec::new();
            for j in 0..len - 1 {
                let sign = if j % 2 == 0 { F::one() } else { -F::one() };
                for (z, c) in alg.mul_basis(w[j], w[j + 1]) {
                    let mut v = w[..j].to_vec();
                    v.push(*z);
                    v.extend_from_slice(&w[j + 2..]);
                    acc.push((index[&v], sign.mul_ref(c)));
                }
            }
            formalitykit_core::linalg::normalize_sparse(acc)
        });
        sparse_rank(tgt.len(), rows.collect::<Vec<_>>())
    };
    if q == 0 {
        return BTreeMap::from([(0, alg.split_base().unwrap().idempotents)]);
    }
    let mut out = BTreeMap::new();
    let mut by_degree: BTreeMap<i64, usize> = BTreeMap::new();
    for w in words(q) {
        *by_degree.entry(degree(&w)).or_default() += 1;
    }
    for (deg, count) in by_degree {
        let d = count - rank(q, deg) - rank(q + 1, deg);
        if d > 0 {
            out.insert(deg, d);
        }
    }
    out
}

fn exterior_doc() -> PresentationDoc {
    serde_json::from_str(
        r#"{
            "vertices": 1,
            "generators": [
                {"label": "x", "src": 1, "tgt": 1, "deg": 1},
                {"label": "y", "src": 1, "tgt": 1, "deg": 1}
            ],
            "relations": [
                [{"word": ["x", "x"], "coeff": 1}],
                [{"word": ["y", "y"], "coeff": 1}],
                [{"word": ["x", "y"], "coeff": 1}, {"word": ["y", "x"], "coeff": 1}]
            ],
            "truncation": 8
        }"#,
    )
    .unwrap()
}

fn compare_with_bar<F: Field>(name: &str, pres: &TensorPresentation<F>, q_max: usize) {
    let alg = pres.quotient_algebra().unwrap();
    assert!(alg.validate().passes(), "{name}");
    for q in 0..=q_max {
        let tor = pres.tor_term(q).unwrap().dims();
        let top = tor.keys().copied().max().unwrap_or(0).max(pres.truncation());
        assert_eq!(tor, bar_tor(&alg, q, top), "{name} q={q}");
    }
}

#[test]
fn tor_matches_bar_homology() {
    for (n, k) in [(1u32, 1i64), (2, 1), (1, 2), (3, 1), (2, 2)] {
        let pres = TensorPresentation::<Q>::truncated_poly(n, k, 4 * i64::from(n) * k).unwrap();
        compare_with_bar(&format!("k[t]/t^{}", n + 1), &pres, 4);
    }
    let ext = TensorPresentation::<Q>::from_doc(&exterior_doc()).unwrap();
    compare_with_bar("exterior", &ext, 4);

    for preset in [Preset::Orthogonal, Preset::Zigzag] {
        let pres = TensorPresentation::<Q>::configuration(&ConfigGraph::path(2), 1, 2, 1, &preset, 8).unwrap();
        compare_with_bar(&format!("A2 {preset:?}"), &pres, 3);
    }
    let pres = TensorPresentation::<Q>::configuration(&ConfigGraph::path(2), 2, 2, 2, &Preset::Orthogonal, 12).unwrap();
    compare_with_bar("A2 (2,2,2)", &pres, 3);
    let pres = TensorPresentation::<Q>::configuration(&ConfigGraph::path(3), 1, 2, 1, &Preset::Zigzag, 8).unwrap();
    compare_with_bar("A3 zigzag", &pres, 3);
}

#[test]
fn exterior_tor_is_the_symmetric_coalgebra() {
    // Tor_q of an exterior algebra on two degree-1 generators has dimension q + 1, in degree q.
    let pres = TensorPresentation::<Q>::from_doc(&exterior_doc()).unwrap();
    for q in 0..=4usize {
        assert_eq!(pres.tor_term(q).unwrap().dims(), BTreeMap::from([(q as i64, q + 1)]), "q={q}");
    }
}

#[test]
fn quotient_matches_configuration_algebra() {
    let g = ConfigGraph::star(3);
    let pres = TensorPresentation::<Q>::configuration(&g, 2, 2, 2, &Preset::Zigzag, 10).unwrap();
    let alg = formalitykit_core::build_configuration_algebra::<Q>(&g, 2, 2, 2, &Preset::Zigzag).unwrap();
    assert_eq!(pres.quotient_dims(), alg.underlying_space().dims());
    let nil = pres.nilpotence(&pres.relation_ideal());
    assert!(nil.verified);
    assert_eq!(nil.maxdeg_quotient, Some(4));
}

#[test]
fn doc_roundtrip() {
    let pres = TensorPresentation::<Q>::configuration(&ConfigGraph::path(3), 2, 2, 2, &Preset::Zigzag, 12).unwrap();
    let doc = pres.to_doc();
    let text = serde_json::to_string(&doc).unwrap();
    let back = TensorPresentation::<Q>::from_doc(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.to_doc(), doc);
    for q in 0..=3 {
        assert_eq!(back.tor_blocks(q).unwrap(), pres.tor_blocks(q).unwrap());
    }
}

#[test]
fn malformed_docs_are_rejected() {
    let mut doc = exterior_doc();
    doc.generators[0].src = 2;
    assert!(TensorPresentation::<Q>::from_doc(&doc).is_err());
    let mut doc = exterior_doc();
    doc.relations[0][0].word = vec!["z".into()];
    assert!(TensorPresentation::<Q>::from_doc(&doc).is_err());
    let mut doc = exterior_doc();
    // x*x + y is not homogeneous.
    doc.relations[0].push(serde_json::from_str(r#"{"word": ["y"], "coeff": 1}"#).unwrap());
    assert!(TensorPresentation::<Q>::from_doc(&doc).is_err());
}

#[test]
fn insufficient_truncation_is_reported() {
    let pres = TensorPresentation::<Q>::truncated_poly(2, 1, 6).unwrap();
    assert!(pres.tor_term(3).is_ok());
    let err = pres.tor_term(4).unwrap_err();
    assert_eq!(err.kind(), ErrorKind::Resource);
}

#[test]
fn word_cap_is_a_resource_error() {
    let gens = ["x", "y"].map(|l| Generator { label: l.into(), src: 0, tgt: 0, deg: 1 }).to_vec();
    // 2^13 - 1 words through degree 12 exceed a cap of 1000.
    let err = TensorPresentation::<Q>::with_cap(1, gens.clone(), Vec::new(), 12, 1000).err().unwrap();
    assert_eq!(err.kind(), ErrorKind::Resource);
    assert!(TensorPresentation::<Q>::with_cap(1, gens, Vec::new(), 8, 1000).is_ok());
}

#[test]
fn unverified_nilpotence_is_inconclusive() {
    // A free generator has no nilpotence exponent.
    let doc: PresentationDoc = serde_json::from_str(
        r#"{"vertices": 1, "generators": [{"label": "x", "src": 1, "tgt": 1, "deg": 1}], "relations": [], "truncation": 6}"#,
    )
    .unwrap();
    let pres = TensorPresentation::<Q>::from_doc(&doc).unwrap();
    assert!(!pres.nilpotence(&pres.relation_ideal()).verified);
}

#[test]
fn ideal_laws() {
    let pres = TensorPresentation::<Q>::configuration(&ConfigGraph::path(2), 2, 2, 2, &Preset::Zigzag, 10).unwrap();
    let i = pres.relation_ideal();
    let j = pres.augmentation();
    assert!(pres.is_two_sided(&i));
    let ij = pres.product(&i, &j);
    // I J ⊆ I ∩ J^2, and J I J ⊆ I^2 is false in general but J I J ⊆ I holds.
    let meet = pres.meet(&ij, &i);
    assert_eq!(meet.dim(), ij.dim());
    let jij = pres.right_by_generators(&pres.left_by_generators(&i));
    assert_eq!(pres.meet(&jij, &i).dim(), jij.dim());
    assert_eq!(pres.sum(&i, &pres.zero_ideal()).dim(), i.dim());
    assert_eq!(pres.meet(&i, &pres.whole()).dim(), i.dim());
    let powers = pres.relation_powers(3);
    for w in powers.windows(2) {
        assert_eq!(pres.meet(&w[0], &w[1]).dim(), w[1].dim(), "powers decrease");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tor_is_independent_of_truncation(n in 1u32..=3, k in 1i64..=3, extra in 1i64..=6) {
        let nk = i64::from(n) * k;
        let base = TensorPresentation::<Q>::truncated_poly(n, k, 5 * nk).unwrap();
        let wider = base.retruncate(5 * nk + extra).unwrap();
        for q in 0..=5 {
            prop_assert_eq!(base.tor_term(q).unwrap().dims(), wider.tor_term(q).unwrap().dims());
        }
    }

    #[test]
    fn mindeg_respects_the_bound(n in 1u32..=3, k in 1i64..=3) {
        let nk = i64::from(n) * k;
        let pres = TensorPresentation::<F5>::truncated_poly(n, k, 6 * nk).unwrap();
        let mu = pres.mindeg(&pres.relation_ideal()).unwrap();
        let nu = pres.mindeg(&pres.augmentation()).unwrap();
        for q in 1..=6usize {
            let tor = pres.tor_term(q).unwrap().dims();
            let low = *tor.keys().next().unwrap();
            prop_assert!(low >= mindeg_bound_at(mu, nu, q).unwrap(), "q={} mindeg {} bound {}", q, low, mindeg_bound_at(mu, nu, q).unwrap());
        }
    }

    #[test]
    fn configuration_mindeg_respects_the_bound(m in 2usize..=3, zig in any::<bool>()) {
        let preset = if zig { Preset::Zigzag } else { Preset::Orthogonal };
        let pres = TensorPresentation::<Q>::configuration(&ConfigGraph::path(m), 2, 2, 2, &preset, 12).unwrap();
        let mu = pres.mindeg(&pres.relation_ideal()).unwrap();
        let nu = pres.mindeg(&pres.augmentation()).unwrap();
        for q in 1..=3usize {
            if let Some(&low) = pres.tor_term(q).unwrap().dims().keys().next() {
                prop_assert!(low >= mindeg_bound_at(mu, nu, q).unwrap());
            }
        }
    }
}

#[test]
fn bound_requires_mu_at_least_twice_nu() {
    assert!(mindeg_bound_at(3, 2, 2).is_err());
    assert_eq!(mindeg_bound_at(4, 2, 2).unwrap(), 4);
    assert_eq!(mindeg_bound_at(6, 2, 4).unwrap(), 12);
    assert_eq!(mindeg_bound_at(6, 2, 5).unwrap(), 14);
}
