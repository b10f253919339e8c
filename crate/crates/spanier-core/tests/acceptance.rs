//! Acceptance suite: every criterion runs at its stated budget and
//! tolerance and prints one pass/fail line.
//!
//! Criteria that produce three-valued verdicts return their outcome labels
//! so the budget-doubling criterion can check that certified answers never
//! flip; `unknown` outcomes are allowed to resolve either way.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spanier_core::complex::{intersect_covers, Cover};
use spanier_core::covering::{
    build_covering, evenly_covered_cover, image_subgroup, universal_covering, verify_covering,
};
use spanier_core::fpgroup::Budgets;
use spanier_core::sample;
use spanier_core::shapes;
use spanier_core::spanier::{
    change_basepoint, normal_contains, pi1, spanier_contains, spanier_generators,
};
use spanier_core::tower::{
    builtin_tower, classify_basepoint, coverability_report, LimitVerdict, PointClass, TowerKind,
};
use spanier_core::wedge::{piece_factor, t3_check, wedge_decompose_loop, WedgeComplex};
use spanier_core::{Verdict, Word};

/// Budgets pinned for the acceptance runs.
const ACCEPT: Budgets = Budgets { max_cosets: 1200, max_word_len: 64, max_search_nodes: 1024 };
/// Star-cover subdivision depth for π^sp approximations.
const DEPTH: usize = 3;
/// Ball radius for infinite-sheet coverings.
const RADIUS: usize = 3;

fn label(v: &Verdict) -> String {
    match v {
        Verdict::Yes(_) => "yes".into(),
        Verdict::No(_) => "no".into(),
        Verdict::Unknown(_) => "unknown".into(),
    }
}

fn finish(name: &str, limit: Duration, started: Instant) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < limit,
        "{name}: runtime {elapsed:?} exceeded the {limit:?} budget"
    );
    println!("{name}: PASS in {elapsed:.2?}");
}

/// Criterion 1: 200 random (complex, cover, refinement) triples; the
/// containment verdict along the refinement direction is never a certified
/// No.
fn criterion_1(budgets: Budgets) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC_0001);
    let mut outcomes = Vec::new();
    for case in 0..200 {
        let c = sample::complex(&mut rng, 12);
        let u = sample::cover(&mut rng, &c, 3);
        let v = sample::refinement(&mut rng, &c, &u);
        let verdict = spanier_contains(&c, &u, &v, budgets).expect("valid inputs");
        assert!(
            !verdict.is_no(),
            "case {case}: refinement monotonicity violated: {verdict}"
        );
        outcomes.push(label(&verdict));
    }
    outcomes
}

#[test]
fn criterion_1_refinement_monotonicity() {
    let started = Instant::now();
    criterion_1(ACCEPT);
    finish("criterion 1 (refinement monotonicity, 200 triples)", Duration::from_secs(30), started);
}

/// Criterion 2: for 100 random cover pairs the intersection's Spanier
/// group sits inside both factors (never a certified No).
fn criterion_2(budgets: Budgets) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC_0002);
    let mut outcomes = Vec::new();
    let mut successes = 0;
    while successes < 100 {
        let c = sample::complex(&mut rng, 12);
        let u = sample::cover(&mut rng, &c, 3);
        let v = sample::cover(&mut rng, &c, 3);
        let Ok(w) = intersect_covers(&c, &u, &v) else { continue };
        successes += 1;
        for side in [&u, &v] {
            let verdict = spanier_contains(&c, side, &w, budgets).expect("valid inputs");
            assert!(!verdict.is_no(), "intersection containment violated: {verdict}");
            outcomes.push(label(&verdict));
        }
    }
    outcomes
}

#[test]
fn criterion_2_intersection_containment() {
    let started = Instant::now();
    criterion_2(ACCEPT);
    finish("criterion 2 (intersection containment, 100 pairs)", Duration::from_secs(30), started);
}

/// Breadth-first enumeration of coset keys under generator steps: the
/// independent index oracle. Each instance supplies the canonical-key
/// transition derived by hand from the subgroup's normal form.
fn oracle_index(n_gens: usize, step: impl Fn(i64, i32) -> i64) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(0i64);
    let mut queue = std::collections::VecDeque::from([0i64]);
    while let Some(at) = queue.pop_front() {
        for g in 1..=n_gens as i32 {
            for letter in [g, -g] {
                let next = step(at, letter);
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }
    seen.len()
}

struct RoundTrip {
    name: &'static str,
    complex: spanier_core::Complex,
    subgroup: Vec<Word>,
    expected_index: usize,
}

fn round_trip_instances() -> Vec<RoundTrip> {
    let mut out = Vec::new();
    // circle: subgroups <a^k> of Z; cosets are residues modulo k
    for k in 1..=4usize {
        out.push(RoundTrip {
            name: Box::leak(format!("circle <a^{k}>").into_boxed_str()),
            complex: shapes::circle(),
            subgroup: vec![Word::from_letters(std::iter::repeat(1).take(k))],
            expected_index: oracle_index(1, move |r, l| (r + l.signum() as i64).rem_euclid(k as i64)),
        });
    }
    // wedge of two circles: the three index-2 subgroups of the free group
    // of rank 2, each the kernel of an exponent-sum-mod-2 map; cosets
    // biject with the image bit
    let kernels: [(&'static str, Vec<Word>, [i64; 2]); 3] = [
        // a ↦ 1, b ↦ 0
        ("wedge kernel(a)", vec![
            Word::from_letters([2]),
            Word::from_letters([1, 1]),
            Word::from_letters([1, 2, -1]),
        ], [1, 0]),
        // a ↦ 0, b ↦ 1
        ("wedge kernel(b)", vec![
            Word::from_letters([1]),
            Word::from_letters([2, 2]),
            Word::from_letters([2, 1, -2]),
        ], [0, 1]),
        // a ↦ 1, b ↦ 1
        ("wedge kernel(ab)", vec![
            Word::from_letters([1, -2]),
            Word::from_letters([1, 1]),
            Word::from_letters([1, 2]),
        ], [1, 1]),
    ];
    for (name, subgroup, weights) in kernels {
        out.push(RoundTrip {
            name,
            complex: shapes::wedge_two_circles(),
            subgroup,
            expected_index: oracle_index(2, move |r, l| {
                let g = (l.unsigned_abs() as usize) - 1;
                (r + weights[g] * l.signum() as i64).rem_euclid(2)
            }),
        });
    }
    // the Z/3 complex with the trivial subgroup; cosets are residues mod 3
    out.push(RoundTrip {
        name: "cyclic(3) trivial subgroup",
        complex: shapes::cyclic(3),
        subgroup: vec![],
        expected_index: oracle_index(1, |r, l| (r + l.signum() as i64).rem_euclid(3)),
    });
    out
}

/// Criterion 3: the classification round-trip on the fixed stock: build,
/// verify, image = intended subgroup (Yes), sheet count = the independent
/// oracle's index.
fn criterion_3(budgets: Budgets) -> Vec<String> {
    let mut outcomes = Vec::new();
    for inst in round_trip_instances() {
        let m = build_covering(&inst.complex, &inst.subgroup, budgets.max_cosets)
            .unwrap_or_else(|e| panic!("{}: build failed: {e}", inst.name));
        verify_covering(&m).unwrap_or_else(|e| panic!("{}: verify failed: {e}", inst.name));
        assert_eq!(
            m.sheets,
            Some(inst.expected_index),
            "{}: sheet count disagrees with the enumeration oracle",
            inst.name
        );
        let img = image_subgroup(&m, &inst.subgroup, budgets).expect("untruncated");
        assert!(
            img.matches_intended.is_yes(),
            "{}: image subgroup mismatch: {}",
            inst.name,
            img.matches_intended
        );
        outcomes.push(label(&img.matches_intended));
    }
    outcomes
}

#[test]
fn criterion_3_classification_round_trip() {
    let started = Instant::now();
    criterion_3(ACCEPT);
    finish("criterion 3 (classification round-trip, 8 coverings)", Duration::from_secs(10), started);
}

/// Criterion 4: for every covering of criterion 3, the evenly covered
/// cover's Spanier group sits inside the image subgroup (never No).
fn criterion_4(budgets: Budgets) -> Vec<String> {
    let mut outcomes = Vec::new();
    for inst in round_trip_instances() {
        let m = build_covering(&inst.complex, &inst.subgroup, budgets.max_cosets).expect("fixed stock");
        let even = evenly_covered_cover(&m).expect("untruncated");
        let base_pi1 = Arc::new(pi1(&inst.complex).expect("valid"));
        let data = even.spanier_data(&base_pi1).expect("translates");
        let img = image_subgroup(&m, &inst.subgroup, budgets).expect("untruncated");
        let verdict = normal_contains(&base_pi1, &img.generators, &data.generators, budgets);
        assert!(!verdict.is_no(), "{}: evenly covered containment violated", inst.name);
        outcomes.push(label(&verdict));
    }
    outcomes
}

#[test]
fn criterion_4_evenly_covered_lemma() {
    let started = Instant::now();
    criterion_4(ACCEPT);
    finish("criterion 4 (evenly covered containment)", Duration::from_secs(10), started);
}

/// Criterion 5: universal coverings of 20 random complexes succeed with a
/// stability witness whose Spanier group equals the stabilized
/// approximation.
fn criterion_5(budgets: Budgets) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC_0005);
    let mut outcomes = Vec::new();
    for case in 0..20 {
        let c = sample::complex(&mut rng, 12);
        let u = universal_covering(&c, DEPTH, RADIUS, budgets)
            .unwrap_or_else(|e| panic!("case {case}: universal covering failed: {e}"));
        assert!(
            u.certificate.witness_matches_sp.is_yes(),
            "case {case}: witness does not match the approximation: {}",
            u.certificate.witness_matches_sp
        );
        outcomes.push(label(&u.certificate.witness_matches_sp));
    }
    outcomes
}

#[test]
fn criterion_5_universal_covering_coherence() {
    let started = Instant::now();
    criterion_5(ACCEPT);
    finish("criterion 5 (universal coverings, 20 random complexes)", Duration::from_secs(60), started);
}

/// Criterion 6: wedge decomposition soundness, exact: concatenation
/// reproduces the loop and every piece is single-factor.
fn criterion_6(_budgets: Budgets) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC_0006);
    let mut checked = 0usize;
    for _ in 0..10 {
        let c1 = sample::complex(&mut rng, 6);
        let c2 = sample::complex(&mut rng, 6);
        let w = WedgeComplex::new(&c1, &c2).expect("valid factors");
        for _ in 0..50 {
            let l = sample::edge_loop(&mut rng, &w.complex, 12);
            let pieces = wedge_decompose_loop(&w, &l).expect("based loop");
            let concat: Vec<_> = pieces.iter().flat_map(|p| p.edges.iter().cloned()).collect();
            assert_eq!(concat, l.edges, "decomposition must concatenate to the loop");
            for p in &pieces {
                piece_factor(&w, p).expect("single-factor piece");
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 500);
    Vec::new()
}

#[test]
fn criterion_6_wedge_decomposition() {
    let started = Instant::now();
    criterion_6(ACCEPT);
    finish("criterion 6 (wedge decomposition, 500 loops)", Duration::from_secs(10), started);
}

/// Criterion 7: the existence biconditional on all pairs from the fixed
/// stock, with the wedge witness produced by transfer from the factors.
fn criterion_7(budgets: Budgets) -> Vec<String> {
    let stock = [shapes::circle(), shapes::disc(), shapes::wedge_two_circles(), shapes::cyclic(3)];
    let mut outcomes = Vec::new();
    for i in 0..stock.len() {
        for j in i..stock.len() {
            let report = t3_check(&stock[i], &stock[j], DEPTH, RADIUS, budgets).expect("finite stock");
            assert!(report.biconditional_holds, "pair ({i}, {j}): biconditional violated");
            assert!(
                report.transfer_matches_wedge_sp.is_yes(),
                "pair ({i}, {j}): transferred witness mismatch: {}",
                report.transfer_matches_wedge_sp
            );
            outcomes.push(label(&report.transfer_matches_wedge_sp));
        }
    }
    outcomes
}

#[test]
fn criterion_7_wedge_biconditional() {
    let started = Instant::now();
    criterion_7(ACCEPT);
    finish("criterion 7 (wedge biconditional, 10 pairs)", Duration::from_secs(30), started);
}

/// Criterion 8: tower classifications reproduce the qualitative stock:
/// wild wedges of circles (with abelianization certificates and no
/// unknowns), tame archipelagos, regular cones, and the not-coverable
/// limit verdict for the wild tower.
fn criterion_8(budgets: Budgets) -> Vec<String> {
    let mut outcomes = Vec::new();
    for n in 2..=6 {
        let t = builtin_tower(TowerKind::Hawaiian, n);
        let c = classify_basepoint(&t, n, budgets).expect("stage");
        assert_eq!(c.class, PointClass::Wild, "hawaiian({n})");
        let mut saw_abelian_no = false;
        for level in &c.evidence {
            for l in &level.loops {
                for (_, v) in &l.spanier_membership {
                    assert!(!v.is_unknown(), "hawaiian({n}): unknown membership verdict");
                    if matches!(
                        v,
                        Verdict::No(spanier_core::Certificate::AbelianObstruction { .. })
                    ) {
                        saw_abelian_no = true;
                    }
                }
            }
        }
        assert!(saw_abelian_no, "hawaiian({n}): wildness must carry an abelian certificate");
        outcomes.push(format!("hawaiian({n})={}", c.class));
    }
    for n in 2..=6 {
        let t = builtin_tower(TowerKind::Archipelago, n);
        let c = classify_basepoint(&t, n, budgets).expect("stage");
        assert_eq!(c.class, PointClass::Tame, "archipelago({n})");
        for level in &c.evidence {
            for l in &level.loops {
                for (_, v) in &l.spanier_membership {
                    assert!(!v.is_unknown(), "archipelago({n}): unknown membership verdict");
                }
            }
        }
        outcomes.push(format!("archipelago({n})={}", c.class));
    }
    for n in 2..=6 {
        let t = builtin_tower(TowerKind::Cone, n);
        let c = classify_basepoint(&t, n, budgets).expect("stage");
        assert_eq!(c.class, PointClass::Regular, "cone({n})");
        outcomes.push(format!("cone({n})={}", c.class));
    }
    let report = coverability_report(&builtin_tower(TowerKind::Hawaiian, 4), 4, budgets).expect("stage");
    assert_eq!(report.limit, LimitVerdict::NotCoverable);
    outcomes.push(format!("hawaiian(4) limit={}", report.limit));
    outcomes
}

#[test]
fn criterion_8_tower_classifications() {
    let started = Instant::now();
    criterion_8(ACCEPT);
    finish("criterion 8 (tower classifications, scales 2..=6)", Duration::from_secs(60), started);
}

/// Criterion 9: basepoint transport preserves the abelianized quotient,
/// exactly, on 50 random triples.
#[test]
fn criterion_9_basepoint_invariance() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC_0009);
    for case in 0..50 {
        let c = sample::complex(&mut rng, 12);
        let u = sample::cover(&mut rng, &c, 3);
        let d = spanier_generators(&c, &u).expect("valid cover");
        let path = sample::edge_path(&mut rng, &c, 6);
        let moved = change_basepoint(&d, &path).expect("valid path");
        assert_eq!(
            d.quotient_invariants(),
            moved.quotient_invariants(),
            "case {case}: abelianized quotient changed under basepoint transport"
        );
    }
    finish("criterion 9 (basepoint invariance, 50 triples)", Duration::from_secs(15), started);
}

/// Criterion 10: doubling every budget never flips a certified outcome of
/// criteria 1-8.
#[test]
fn criterion_10_budget_monotonicity() {
    let started = Instant::now();
    let doubled = ACCEPT.doubled();
    let runs: [(&str, fn(Budgets) -> Vec<String>); 8] = [
        ("criterion 1", criterion_1),
        ("criterion 2", criterion_2),
        ("criterion 3", criterion_3),
        ("criterion 4", criterion_4),
        ("criterion 5", criterion_5),
        ("criterion 6", criterion_6),
        ("criterion 7", criterion_7),
        ("criterion 8", criterion_8),
    ];
    for (name, run) in runs {
        let before = run(ACCEPT);
        let after = run(doubled);
        assert_eq!(before.len(), after.len(), "{name}: outcome counts diverged");
        for (i, (b, a)) in before.iter().zip(after.iter()).enumerate() {
            if b != "unknown" {
                assert_eq!(b, a, "{name}: certified outcome {i} flipped under doubled budgets");
            }
        }
    }
    finish("criterion 10 (budget monotonicity over criteria 1-8)", Duration::from_secs(300), started);
}
