//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so that every criterion reports even when
//! an earlier one fails. The process exits non-zero on any failure other than
//! a documented gap (see the README).

mod common;

use std::time::{Duration, Instant};

use formalitykit_core::config::{
    kunneth_hom, normalize_shifts, sign_assignment, ConfigGraph, PoincarePolynomial, ShiftOutcome,
    SignOutcome,
};
use formalitykit_core::formality::{
    certify_config_pn, certify_config_spherical, certify_single, recheck, FormalityCertificate, Parity, Verdict,
};
use formalitykit_core::hochschild::{
    bar_slice, hh_bar, hh_resolution, kadeishvili_scan, BarMode, HhOptions, PeriodicResolutionSpec,
    DEFAULT_MAX_WORDS,
};
use formalitykit_core::linalg::{kernel_basis, rank, subspace_meet, subspace_sum, ExactMatrix};
use formalitykit_core::presentation::TensorPresentation;
use formalitykit_core::{
    build_configuration_algebra, truncated_poly, Field, GradedBimodule, Preset, Rational, F5, F7,
};
use rand::Rng;

type Q = Rational;

struct Outcome {
    ok: bool,
    /// The failure is the documented gap and nothing else.
    known_gap: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        known_gap: false,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        known_gap: false,
        detail: detail.into(),
    }
}

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    let start = Instant::now();
    for n in 1..=6 {
        for k in 1..=6 {
            let cert = certify_single(n, k).expect("parameters in range");
            let re = recheck(&cert);
            if cert.verdict != Verdict::CertifiedFormal || !re.ok {
                bad.push(format!("(n={n}, k={k}): {} {:?}", cert.verdict, re.problems));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(10) {
        bad.push(format!("runtime {elapsed:?} ≥ 10 s"));
    }
    if bad.is_empty() {
        pass("36 certificates CertifiedFormal and rechecked")
    } else {
        fail(bad.join("; "))
    }
}

fn criterion_2() -> Outcome {
    let mut compared = 0;
    let mut bad = Vec::new();
    for (n, k) in [(1u32, 2i64), (2, 2), (1, 3), (2, 3)] {
        let alg = truncated_poly::<Q>(n, k);
        let module = GradedBimodule::regular(&alg);
        let res = PeriodicResolutionSpec::truncated_poly(&alg, n, k, 6).expect("resolution");
        let nk = i64::from(n) * k;
        for p in 0..=4usize {
            let pk = p as i64;
            for q in (-pk * nk - 1)..=(nk - pk * k + 1) {
                let bar = hh_bar(&alg, &module, p, q, BarMode::RelativeNormalized, HhOptions::default())
                    .expect("bar slice");
                if bar.slice_dims[1] == 0 {
                    continue;
                }
                compared += 1;
                let other = hh_resolution(&alg, &res, &module, p, q).expect("resolution slice");
                if other != bar.dim {
                    bad.push(format!("n={n} k={k} HH^({p},{q}): bar {} vs resolution {other}", bar.dim));
                }
            }
        }
    }
    if bad.is_empty() {
        pass(format!("{compared} nonempty slices agree"))
    } else {
        fail(bad.join("; "))
    }
}

fn criterion_3() -> Outcome {
    let mut bad = Vec::new();
    for (n, k) in [(1u32, 2i64), (1, 4), (2, 2), (2, 3), (3, 2)] {
        let rows = kadeishvili_scan(&truncated_poly::<Q>(n, k), 5, BarMode::RelativeNormalized, DEFAULT_MAX_WORDS)
            .expect("scan");
        for r in rows.iter().filter(|r| r.dim != 0) {
            bad.push(format!("n={n} k={k} HH^({},{}) = {}", r.q, r.internal_degree, r.dim));
        }
    }
    if bad.is_empty() {
        pass("HH^{q,2-q} = 0 for 3 ≤ q ≤ 5 on all five algebras")
    } else {
        fail(bad.join("; "))
    }
}

fn criterion_4() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=3u32 {
        for k in 1..=3i64 {
            let nk = i64::from(n) * k;
            let pres = TensorPresentation::<Q>::truncated_poly(n, k, 6 * nk).expect("presentation");
            for q in 0..=6usize {
                let p = (q / 2) as i64;
                let deg = if q % 2 == 0 {
                    p * (i64::from(n) + 1) * k
                } else {
                    (p * (i64::from(n) + 1) + 1) * k
                };
                let dims = pres.tor_term(q).expect("tor").dims();
                let expected = std::collections::BTreeMap::from([(deg, 1usize)]);
                if dims != expected {
                    bad.push(format!("n={n} k={k} q={q}: {dims:?}, expected {expected:?}"));
                }
            }
        }
    }
    if bad.is_empty() {
        pass("Tor_q is one-dimensional in the periodic degree for q ≤ 6, 9 algebras")
    } else {
        fail(bad.join("; "))
    }
}

fn chain_values(cert: &FormalityCertificate, parity: Parity, p: i64) -> Option<Vec<i64>> {
    let ev = cert.evidence.iter().find(|e| e.q_range.parity == Some(parity) && e.p_min.is_some_and(|m| m <= p))?;
    Some(ev.chain.iter().map(|t| t.value.at(p)).collect())
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    // The degree criterion cannot reach q = 3 for k = 5, h = 2: both sides are 6.
    let mut gap = false;

    let c = certify_config_pn(2, 2, 2).expect("pn");
    if c.verdict != Verdict::CertifiedFormal || !recheck(&c).ok {
        bad.push(format!("pn(2,2,2): {}", c.verdict));
    }
    // Even chain 2h+2p-2 < ph+2p ≤ ph+pk at p = 2 is 6 < 8 ≤ 8; odd chain
    // 2h+2p-1 < ph+2p < ph+pk+k at p = 2 is 7 < 8 < 10.
    match (chain_values(&c, Parity::Even, 2), chain_values(&c, Parity::Odd, 2)) {
        (Some(even), Some(odd)) => {
            if even != [6, 6, 8, 8, 8] || odd != [7, 7, 8, 10, 10] {
                bad.push(format!("pn(2,2,2) chains at p=2: even {even:?}, odd {odd:?}"));
            } else {
                notes.push("pn(2,2,2) even 6<8≤8, odd 7<8<10".to_string());
            }
        }
        _ => bad.push("pn(2,2,2) lacks a parity chain at p = 2".into()),
    }

    for k in [4, 5, 6] {
        let c = certify_config_spherical(k, k / 2, k).expect("spherical");
        let re = recheck(&c);
        if !re.ok {
            bad.push(format!("spherical k={k}: recheck {:?}", re.problems));
        }
        if c.verdict == Verdict::CertifiedFormal {
            notes.push(format!("spherical k={k} certified"));
        } else {
            let failed: Vec<String> = c
                .evidence
                .iter()
                .filter(|e| !e.holds)
                .map(|e| {
                    let vals: Vec<String> = e.instances.first().map(|i| i.values.iter().map(|v| v.to_string()).collect()).unwrap_or_default();
                    format!("{} [{}]", e.q_range, vals.join(", "))
                })
                .collect();
            let msg = format!("spherical k={k}: {} (failing: {})", c.verdict, failed.join("; "));
            if k == 5 && c.verdict == Verdict::Inconclusive && re.ok {
                gap = true;
                notes.push(msg);
            } else {
                bad.push(msg);
            }
        }
    }

    let c = certify_config_pn(3, 2, 3).expect("pn");
    if c.verdict != Verdict::CriterionInapplicable || !c.failed_hypotheses.iter().any(|f| f.contains("gcd")) {
        bad.push(format!("pn(3,2,3): {} {:?}", c.verdict, c.failed_hypotheses));
    } else {
        notes.push("pn(3,2,3) inapplicable (gcd)".into());
    }

    if !bad.is_empty() {
        fail(format!("{}; other: {}", bad.join("; "), notes.join("; ")))
    } else if gap {
        Outcome {
            known_gap: true,
            ..fail(notes.join("; "))
        }
    } else {
        pass(notes.join("; "))
    }
}

fn criterion_6() -> Outcome {
    let g = ConfigGraph::path(2);
    let alg = build_configuration_algebra::<Q>(&g, 2, 2, 2, &Preset::Orthogonal).expect("A2 algebra");
    let start = Instant::now();
    let rows = kadeishvili_scan(&alg, 4, BarMode::RelativeNormalized, DEFAULT_MAX_WORDS).expect("scan");
    let elapsed = start.elapsed();
    let nonzero: Vec<String> = rows.iter().filter(|r| r.dim != 0).map(|r| format!("q={} dim={}", r.q, r.dim)).collect();
    if nonzero.is_empty() && elapsed < Duration::from_secs(600) {
        pass(format!("HH^(3,-1) = HH^(4,-2) = 0 (dim A = {})", alg.dim()))
    } else {
        fail(format!("{nonzero:?}, {elapsed:?}"))
    }
}

fn criterion_7() -> Outcome {
    let mut bad = Vec::new();
    let mut cases = 0;
    for m in 0..=4i64 {
        for n in 2..=4u32 {
            let p = PoincarePolynomial::shift_of_unit(m);
            let nm = i64::from(n) * m;
            for same in [true, false] {
                let got = kunneth_hom(&p, n, same).expect("kunneth");
                let nonzero = (m % 2 == 0) == same;
                let expected = if nonzero {
                    PoincarePolynomial::shift_of_unit(nm)
                } else {
                    PoincarePolynomial::new([])
                };
                cases += 1;
                if got != expected {
                    bad.push(format!("m={m} n={n} same={same}: {:?}", got.0));
                }
            }
        }
    }
    if bad.is_empty() {
        pass(format!("{cases} table entries match k[-nm] / 0"))
    } else {
        fail(bad.join("; "))
    }
}

fn with_degrees(mut g: ConfigGraph, rng: &mut impl Rng, nk: i64) -> ConfigGraph {
    for e in g.edges_mut() {
        let a = rng.gen_range(-nk..=2 * nk);
        e.a_uv = Some(a);
        e.a_vu = Some(nk - a);
        e.d = Some(rng.gen_range(0..4));
    }
    g
}

fn criterion_8() -> Outcome {
    let mut bad = Vec::new();
    let mut rng = common::rng(8);

    for m in [4usize, 6, 8, 10] {
        let mut g = ConfigGraph::cycle(m);
        for e in g.edges_mut() {
            e.d = Some(1);
        }
        if !matches!(sign_assignment(&g), Ok(SignOutcome::Feasible { .. })) {
            bad.push(format!("all-odd C{m} infeasible"));
        }
        // Any degrees of even total on the same cycle.
        let mut total = 0;
        for (i, e) in g.edges_mut().iter_mut().enumerate() {
            let d = if i + 1 == m { total % 2 } else { rng.gen_range(0..3) };
            e.d = Some(d);
            total += d;
        }
        if !matches!(sign_assignment(&g), Ok(SignOutcome::Feasible { .. })) {
            bad.push(format!("even-total C{m} infeasible"));
        }
    }
    let mut tri = ConfigGraph::cycle(3);
    for e in tri.edges_mut() {
        e.d = Some(1);
    }
    match sign_assignment(&tri) {
        Ok(SignOutcome::Infeasible { cycle }) if cycle.len() == 3 => {}
        other => bad.push(format!("odd 3-cycle: {other:?}")),
    }

    for i in 0..20 {
        let m = rng.gen_range(1..=10);
        let nk = [4, 6, 8][rng.gen_range(0..3)];
        let g = with_degrees(common::random_tree(&mut rng, m), &mut rng, nk);
        if !matches!(sign_assignment(&g), Ok(SignOutcome::Feasible { .. })) {
            bad.push(format!("tree #{i}: signs infeasible"));
        }
        match normalize_shifts(&g, nk) {
            Ok(ShiftOutcome::Consistent { h, normalized, .. }) => {
                if h != nk / 2 || normalized.iter().any(|(_, _, x, y)| *x != h || *y != h) {
                    bad.push(format!("tree #{i}: {normalized:?}"));
                }
            }
            other => bad.push(format!("tree #{i}: {other:?}")),
        }
    }
    if bad.is_empty() {
        pass(format!("cycles, 3-cycle witness and 20 random trees (seed {:#x})", common::SEED))
    } else {
        fail(format!("seed {:#x}: {}", common::SEED, bad.join("; ")))
    }
}

fn structural_checks<F: Field>(bad: &mut Vec<String>) -> usize {
    let mut checks = 0;
    for (name, alg) in common::small_fixtures::<F>() {
        let module = GradedBimodule::regular(&alg);
        for p in 0..=3usize {
            for q in common::q_window(&alg, p) {
                let rel = hh_bar(&alg, &module, p, q, BarMode::RelativeNormalized, HhOptions::default());
                let abs = hh_bar(&alg, &module, p, q, BarMode::Absolute, HhOptions::default());
                checks += 1;
                match (rel, abs) {
                    (Ok(r), Ok(a)) if r.dim == a.dim => {}
                    (r, a) => bad.push(format!("{name} HH^({p},{q}): relative {r:?} vs absolute {a:?}")),
                }
            }
        }
        for mode in [BarMode::RelativeNormalized, BarMode::Absolute] {
            let degs: Vec<i64> = alg.basis().iter().map(|b| b.degree).collect();
            let top = degs.iter().copied().max().unwrap_or(0) * 4;
            for p in 1..=3usize {
                for q in -2..=top + 2 {
                    let upper = bar_slice(&alg, p, q, mode, DEFAULT_MAX_WORDS).expect("slice");
                    let lower = bar_slice(&alg, p - 1, q, mode, DEFAULT_MAX_WORDS).expect("slice");
                    checks += 1;
                    if !upper.composes_to_zero(&lower) {
                        bad.push(format!("{name} {mode:?}: d² ≠ 0 at B_{p}, degree {q}"));
                    }
                }
            }
        }
    }
    checks
}

fn random_matrix<F: Field>(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<F>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| F::from_i64(if rng.gen_bool(0.4) { rng.gen_range(-3..=3) } else { 0 })).collect())
        .collect()
}

fn linalg_checks<F: Field>(rng: &mut impl Rng, bad: &mut Vec<String>, tag: &str) -> usize {
    let mut checks = 0;
    for _ in 0..40 {
        let (r, c) = (rng.gen_range(1..6), rng.gen_range(1..7));
        let m = ExactMatrix::from_rows(random_matrix::<F>(rng, r, c)).unwrap();
        if rank(&m) + kernel_basis(&m).len() != c {
            bad.push(format!("{tag}: rank–nullity fails"));
        }
        let u_rows = rng.gen_range(0..4);
        let u = random_matrix::<F>(rng, u_rows, c);
        let w_rows = rng.gen_range(0..4);
        let w = random_matrix::<F>(rng, w_rows, c);
        let v_rows = rng.gen_range(0..4);
        let v = random_matrix::<F>(rng, v_rows, c);
        let dim = |rows: &[Vec<F>]| {
            if rows.is_empty() {
                0
            } else {
                rank(&ExactMatrix::from_rows(rows.to_vec()).unwrap())
            }
        };
        let sum = subspace_sum(&u, &w).unwrap();
        let meet = subspace_meet(&u, &w).unwrap();
        if dim(&sum) + dim(&meet) != dim(&u) + dim(&w) {
            bad.push(format!("{tag}: dim(U+W) + dim(U∩W) ≠ dim U + dim W"));
        }
        // Modular law with U ⊆ V: U + (W ∩ V) = (U + W) ∩ V.
        let uv: Vec<Vec<F>> = u.iter().chain(&v).cloned().collect();
        let lhs = subspace_sum(&u, &subspace_meet(&w, &uv).unwrap()).unwrap();
        let rhs = subspace_meet(&subspace_sum(&u, &w).unwrap(), &uv).unwrap();
        let both = subspace_sum(&lhs, &rhs).unwrap();
        if dim(&lhs) != dim(&rhs) || dim(&both) != dim(&lhs) {
            bad.push(format!("{tag}: modular law fails"));
        }
        checks += 3;
    }
    checks
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut checks = structural_checks::<Q>(&mut bad);
    checks += structural_checks::<F5>(&mut bad);

    let mut rng = common::rng(9);
    checks += linalg_checks::<Q>(&mut rng, &mut bad, "Q");
    checks += linalg_checks::<F5>(&mut rng, &mut bad, "F5");
    checks += linalg_checks::<F7>(&mut rng, &mut bad, "F7");

    for (n, k) in [(1u32, 2i64), (2, 1), (2, 2), (3, 1)] {
        let nk = i64::from(n) * k;
        let base = TensorPresentation::<Q>::truncated_poly(n, k, 5 * nk).unwrap();
        let wider = base.retruncate(5 * nk + 3 * k).unwrap();
        for q in 0..=5 {
            checks += 1;
            let (a, b) = (base.tor_term(q).unwrap().dims(), wider.tor_term(q).unwrap().dims());
            if a != b {
                bad.push(format!("tor n={n} k={k} q={q}: {a:?} vs {b:?}"));
            }
        }
    }
    let a2 = build_configuration_algebra::<Q>(&ConfigGraph::path(2), 2, 2, 2, &Preset::Orthogonal).unwrap();
    let pres = TensorPresentation::<Q>::configuration(&ConfigGraph::path(2), 2, 2, 2, &Preset::Orthogonal, 12).unwrap();
    let wider = pres.retruncate(16).unwrap();
    for q in 0..=3 {
        checks += 1;
        if pres.tor_blocks(q).unwrap().blocks != wider.tor_blocks(q).unwrap().blocks {
            bad.push(format!("tor A2 q={q} depends on the truncation"));
        }
    }
    checks += 1;
    let algebra_dims = a2.underlying_space().dims();
    if pres.quotient_dims() != algebra_dims {
        bad.push(format!("A2 presentation quotient {:?} vs algebra {algebra_dims:?}", pres.quotient_dims()));
    }

    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(300) {
        bad.push(format!("runtime {elapsed:?} ≥ 5 min"));
    }
    if bad.is_empty() {
        pass(format!("{checks} checks"))
    } else {
        fail(bad.join("; "))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (id, run) in criteria {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let status = match (out.ok, out.known_gap) {
            (true, _) => "PASS",
            (false, true) => "FAIL (documented gap)",
            (false, false) => "FAIL",
        };
        println!("criterion {id}: {status} [{secs:.2}s] {}", out.detail);
        if !out.ok && !out.known_gap {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
