//! Finite tower stages standing in for wild spaces.
//!
//! A tower provides, for each scale n, a finite stage complex, a nested
//! neighborhood filtration around the basepoint and bonding maps collapsing
//! the extra cells of stage n+1. The built-in kinds model the shrinking
//! circle spaces: `Hawaiian` (bare wedges of circles), `Archipelago`
//! (consecutive circles identified through faces), `Cone` (every circle
//! killed by a face) and `DoubleCone` (a wedge of two cones).
//!
//! Classification of the basepoint is the finite shadow of the usual
//! trichotomy: regular when some neighborhood has trivial image, wild when
//! every tested scale carries a loop certified outside a stage Spanier
//! group, tame when all neighborhood loops are certified inside every
//! stage Spanier group.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::complex::{Cell, Complex, Cover, PathMap, SignedEdge, Subcomplex, VertexId};
use crate::error::Result;
use crate::fpgroup::{Budgets, NclContext, Verdict, Word};
use crate::spanier::{component_loops, pi1, spanier_generators, NormalSubgroupData};
use crate::wedge::WedgeComplex;

/// Built-in tower families.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TowerKind {
    Hawaiian,
    Archipelago,
    Cone,
    DoubleCone,
}

impl core::fmt::Display for TowerKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TowerKind::Hawaiian => write!(f, "hawaiian"),
            TowerKind::Archipelago => write!(f, "archipelago"),
            TowerKind::Cone => write!(f, "cone"),
            TowerKind::DoubleCone => write!(f, "double_cone"),
        }
    }
}

/// A built-in tower, truncated at scale `n`.
#[derive(Clone, Debug)]
pub struct Tower {
    pub kind: TowerKind,
    pub n: usize,
}

/// Builds the tower of the given kind with stages 1..=n.
pub fn builtin_tower(kind: TowerKind, n: usize) -> Tower {
    assert!(n >= 1, "towers start at scale 1");
    Tower { kind, n }
}

/// The wedge-of-subdivided-circles skeleton shared by all kinds: circles
/// a1..am, each split at a midpoint so that arcs can cover it.
fn circles_stage(m: usize) -> Complex {
    let mut c = Complex::new("o");
    for i in 1..=m {
        let mid = format!("a{i}.mid");
        c.add_vertex(mid.clone());
        c.add_edge(format!("a{i}.0"), "o".to_string(), mid.clone());
        c.add_edge(format!("a{i}.1"), mid, "o".to_string());
    }
    c
}

fn circle_loop(i: usize) -> Vec<SignedEdge> {
    alloc::vec![
        SignedEdge::forward(format!("a{i}.0")),
        SignedEdge::forward(format!("a{i}.1")),
    ]
}

fn cone_stage(m: usize) -> Complex {
    let mut c = circles_stage(m);
    for i in 1..=m {
        c.add_face(format!("f{i}"), circle_loop(i));
    }
    c
}

impl Tower {
    /// The stage complex at scale `m` (1 ≤ m ≤ n).
    pub fn stage(&self, m: usize) -> Complex {
        assert!((1..=self.n).contains(&m));
        match self.kind {
            TowerKind::Hawaiian => circles_stage(m),
            TowerKind::Archipelago => {
                let mut c = circles_stage(m);
                for i in 1..m {
                    let mut boundary = circle_loop(i);
                    boundary.extend(circle_loop(i + 1).into_iter().rev().map(|s| s.inverse()));
                    c.add_face(format!("f{i}"), boundary);
                }
                c
            }
            TowerKind::Cone => cone_stage(m),
            TowerKind::DoubleCone => crate::complex::wedge(&cone_stage(m), &cone_stage(m)),
        }
    }

    /// The wedge bookkeeping for double cones.
    pub fn stage_wedge(&self, m: usize) -> Option<WedgeComplex> {
        match self.kind {
            TowerKind::DoubleCone => WedgeComplex::new(&cone_stage(m), &cone_stage(m)).ok(),
            _ => None,
        }
    }

    /// The neighborhood filtration N_k(m): the subwedge of circles k..=m
    /// together with the faces supported there (1 ≤ k ≤ m). N_1 is the
    /// whole stage and the filtration is nested.
    pub fn filtration(&self, m: usize, k: usize) -> Subcomplex {
        assert!((1..=m).contains(&k));
        let stage = self.stage(m);
        match self.kind {
            TowerKind::DoubleCone => {
                let inner = single_cone_filtration(m, k);
                let w = self.stage_wedge(m).expect("double cone");
                let mut s = w
                    .embed_subcomplex(crate::wedge::Factor::One, &inner)
                    .union(&w.embed_subcomplex(crate::wedge::Factor::Two, &inner));
                s.close(&stage);
                s
            }
            _ => {
                let mut s = Subcomplex::empty();
                s.vertices.insert(VertexId::from("o"));
                for i in k..=m {
                    s.edges.insert(format!("a{i}.0").into());
                    s.edges.insert(format!("a{i}.1").into());
                }
                for (f, _) in stage.faces() {
                    let idx: usize = f.as_str()[1..].parse().expect("face index");
                    if idx >= k {
                        s.faces.insert(f.clone());
                    }
                }
                s.close(&stage);
                s
            }
        }
    }

    /// The bonding map from stage m+1 down to stage m, at the level of
    /// edge paths: the extra circle collapses to the basepoint (for the
    /// archipelago it retracts onto circle m instead, so that the extra
    /// face becomes degenerate).
    pub fn bonding(&self, m: usize) -> PathMap {
        assert!(m + 1 <= self.n);
        match self.kind {
            TowerKind::DoubleCone => {
                let upper = self.stage_wedge(m + 1).expect("double cone");
                let lower = self.stage_wedge(m).expect("double cone");
                let inner = single_cone_bonding(m, CollapseStyle::ToBasepoint);
                let mut map = PathMap::default();
                for factor in [crate::wedge::Factor::One, crate::wedge::Factor::Two] {
                    for (v, image) in &inner.vertices {
                        map.vertices
                            .insert(upper.embed_vertex(factor, v), lower.embed_vertex(factor, image));
                    }
                    for (e, path) in &inner.edges {
                        let moved: Vec<SignedEdge> = path
                            .iter()
                            .map(|s| SignedEdge {
                                edge: lower.embed_edge(factor, &s.edge),
                                inverted: s.inverted,
                            })
                            .collect();
                        map.edges.insert(upper.embed_edge(factor, e), moved);
                    }
                }
                map
            }
            TowerKind::Archipelago => single_cone_bonding(m, CollapseStyle::OntoLastCircle),
            _ => single_cone_bonding(m, CollapseStyle::ToBasepoint),
        }
    }

    /// The stage cover 𝒰_{m,k}: the neighborhood N_k(m) plus closures of
    /// the remaining faces and arcs covering the remaining circle halves.
    pub fn neighborhood_cover(&self, m: usize, k: usize) -> Cover {
        let stage = self.stage(m);
        let nk = self.filtration(m, k);
        let mut elements = alloc::vec![nk.clone()];
        let mut covered_edges: BTreeSet<crate::complex::EdgeId> = nk.edges.clone();
        let mut covered_faces: BTreeSet<crate::complex::FaceId> = nk.faces.clone();
        for (f, _) in stage.faces() {
            if covered_faces.contains(f) {
                continue;
            }
            let closure = Subcomplex::closure_of(&stage, &Cell::Face(f.clone()));
            covered_edges.extend(closure.edges.iter().cloned());
            covered_faces.insert(f.clone());
            elements.push(closure);
        }
        for (e, _) in stage.edges() {
            if covered_edges.contains(e) {
                continue;
            }
            elements.push(Subcomplex::closure_of(&stage, &Cell::Edge(e.clone())));
        }
        let out = Cover { elements };
        debug_assert!(out.check_covers(&stage).is_ok());
        out
    }
}

fn single_cone_filtration(m: usize, k: usize) -> Subcomplex {
    // filtration of the one-factor cone stage, in factor-local ids
    let stage = cone_stage(m);
    let mut s = Subcomplex::empty();
    s.vertices.insert(VertexId::from("o"));
    for i in k..=m {
        s.edges.insert(format!("a{i}.0").into());
        s.edges.insert(format!("a{i}.1").into());
        s.faces.insert(format!("f{i}").into());
    }
    s.close(&stage);
    s
}

enum CollapseStyle {
    ToBasepoint,
    OntoLastCircle,
}

fn single_cone_bonding(m: usize, style: CollapseStyle) -> PathMap {
    let mut map = PathMap::default();
    map.vertices.insert(VertexId::from("o"), VertexId::from("o"));
    for i in 1..=m {
        let mid: VertexId = format!("a{i}.mid").into();
        map.vertices.insert(mid.clone(), mid);
        for half in 0..2 {
            let e: crate::complex::EdgeId = format!("a{i}.{half}").into();
            map.edges.insert(e.clone(), alloc::vec![SignedEdge::forward(e)]);
        }
    }
    let extra_mid: VertexId = format!("a{}.mid", m + 1).into();
    match style {
        CollapseStyle::ToBasepoint => {
            map.vertices.insert(extra_mid, VertexId::from("o"));
            for half in 0..2 {
                map.edges.insert(format!("a{}.{half}", m + 1).into(), Vec::new());
            }
        }
        CollapseStyle::OntoLastCircle => {
            map.vertices.insert(extra_mid, format!("a{m}.mid").into());
            for half in 0..2 {
                map.edges.insert(
                    format!("a{}.{half}", m + 1).into(),
                    alloc::vec![SignedEdge::forward(format!("a{m}.{half}"))],
                );
            }
        }
    }
    map
}

/// The Spanier group of the stage cover 𝒰_{n,k} over the stage complex.
pub fn stage_spanier(t: &Tower, n: usize, k: usize) -> Result<NormalSubgroupData> {
    let stage = t.stage(n);
    let cover = t.neighborhood_cover(n, k);
    spanier_generators(&stage, &cover)
}

/// Basepoint classification at a tower scale.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PointClass {
    Regular,
    Tame,
    Wild,
    Unknown,
}

impl core::fmt::Display for PointClass {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PointClass::Regular => write!(f, "REGULAR"),
            PointClass::Tame => write!(f, "TAME"),
            PointClass::Wild => write!(f, "WILD"),
            PointClass::Unknown => write!(f, "UNKNOWN"),
        }
    }
}

/// Evidence for one essential neighborhood loop.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LoopEvidence {
    pub rendered: String,
    /// Is the loop nullhomotopic in the whole stage?
    pub trivial_in_stage: Verdict,
    /// Membership in the stage Spanier group per filtration level m.
    pub spanier_membership: Vec<(usize, Verdict)>,
}

/// Evidence collected at one filtration level k.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelEvidence {
    pub k: usize,
    pub regular: bool,
    pub loops: Vec<LoopEvidence>,
}

/// The classification with its per-level evidence.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Classification {
    pub class: PointClass,
    pub scale: usize,
    pub evidence: Vec<LevelEvidence>,
}

/// Classifies the basepoint at scale `n`.
///
/// For each k the essential generator loops of N_k(n) are tested for
/// triviality in the stage; a level with none left is regular evidence.
/// Failing regularity everywhere, each surviving loop is tested for
/// membership in every stage Spanier group 𝒰_{n,m}: a certified
/// non-membership makes the point wild at this scale, a full sweep of
/// certified memberships makes it tame, and exhausted budgets leave the
/// class unknown.
pub fn classify_basepoint(t: &Tower, n: usize, budgets: Budgets) -> Result<Classification> {
    assert!(n >= 2, "classification needs at least two filtration levels");
    let stage = t.stage(n);
    let stage_pi1 = Arc::new(pi1(&stage)?);
    let mut trivial_ctx = NclContext::new(&stage_pi1.presentation, &[], budgets);
    let mut spanier_ctxs: Vec<(usize, NclContext)> = Vec::new();
    for m in 1..=n {
        let data = stage_spanier(t, n, m)?;
        spanier_ctxs.push((m, NclContext::new(&stage_pi1.presentation, &data.generators, budgets)));
    }

    let mut evidence = Vec::new();
    let mut any_regular = false;
    let mut wild_witness = false;
    let mut all_memberships_yes = true;
    let mut tested_any = false;
    for k in 1..=n {
        let nk = t.filtration(n, k);
        let loops = component_loops(&stage, &nk, stage.basepoint());
        let mut level = LevelEvidence { k, regular: true, loops: Vec::new() };
        for l in loops {
            let word = stage_pi1.word_of_loop(&l)?;
            let trivial = trivial_ctx.verdict(&word);
            let mut memberships = Vec::new();
            if !trivial.is_yes() {
                level.regular = false;
                tested_any = true;
                for (m, ctx) in spanier_ctxs.iter_mut() {
                    let v = ctx.verdict(&word);
                    if v.is_no() {
                        wild_witness = true;
                    }
                    if !v.is_yes() {
                        all_memberships_yes = false;
                    }
                    memberships.push((*m, v));
                }
            }
            level.loops.push(LoopEvidence {
                rendered: stage_pi1.presentation.render(&word),
                trivial_in_stage: trivial,
                spanier_membership: memberships,
            });
        }
        any_regular |= level.regular;
        evidence.push(level);
    }

    let class = if any_regular {
        PointClass::Regular
    } else if wild_witness {
        PointClass::Wild
    } else if tested_any && all_memberships_yes {
        PointClass::Tame
    } else {
        PointClass::Unknown
    };
    Ok(Classification { class, scale: n, evidence })
}

/// Coverability verdict for the limit object, inferred at tower scale.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LimitVerdict {
    NotCoverable,
    CoverableEvidence,
    Unknown,
}

impl core::fmt::Display for LimitVerdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LimitVerdict::NotCoverable => write!(f, "LIMIT-NOT-COVERABLE"),
            LimitVerdict::CoverableEvidence => write!(f, "LIMIT-COVERABLE-EVIDENCE"),
            LimitVerdict::Unknown => write!(f, "LIMIT-UNKNOWN"),
        }
    }
}

/// The coverability report for a tower at a scale.
#[derive(Clone, Debug)]
pub struct CoverabilityReport {
    pub kind: TowerKind,
    pub scale: usize,
    pub classification: Classification,
    pub limit: LimitVerdict,
    /// The finite stage itself is always coverable; this records the
    /// universal covering built for it.
    pub stage_sheets: Option<usize>,
    pub stage_truncation: Option<usize>,
    pub stage_sp_stabilized: bool,
    pub caveats: Vec<String>,
    pub notes: Vec<String>,
}

/// Subdivision depth used for the stage's own coverability certificate
/// (the stages are already bisected, so two levels stabilize them).
const STAGE_SP_DEPTH: usize = 2;
const STAGE_BALL_RADIUS: usize = 3;

/// Classifies the basepoint and converts the class into a coverability
/// verdict for the limit object, together with the stage's own certificate
/// and the honesty caveats.
pub fn coverability_report(t: &Tower, n: usize, budgets: Budgets) -> Result<CoverabilityReport> {
    let classification = classify_basepoint(t, n, budgets)?;
    let limit = match classification.class {
        PointClass::Wild => LimitVerdict::NotCoverable,
        PointClass::Tame | PointClass::Regular => LimitVerdict::CoverableEvidence,
        PointClass::Unknown => LimitVerdict::Unknown,
    };
    let stage = t.stage(n);
    let universal =
        crate::covering::universal_covering(&stage, STAGE_SP_DEPTH, STAGE_BALL_RADIUS, budgets)?;
    let mut caveats = alloc::vec![
        format!(
            "classification is at tower scale {n}; a finite stage only provides evidence about the limit"
        ),
        "covers are families of closed subcomplexes; the subcomplex-cover universe is the ground truth here".to_string(),
    ];
    if matches!(limit, LimitVerdict::CoverableEvidence) {
        caveats.push("limit coverability is evidence, not a certificate".to_string());
    }
    let mut notes = Vec::new();
    if t.kind == TowerKind::DoubleCone {
        notes.push(
            "the limit of the double cone (the Griffiths twin cone) is known to admit a \
             categorical universal covering while lacking a simply connected one; recorded as a \
             known result, not computed here"
                .to_string(),
        );
    }
    Ok(CoverabilityReport {
        kind: t.kind,
        scale: n,
        classification,
        limit,
        stage_sheets: universal.covering.sheets,
        stage_truncation: universal.covering.truncation,
        stage_sp_stabilized: universal.certificate.sp_stabilized,
        caveats,
        notes,
    })
}
