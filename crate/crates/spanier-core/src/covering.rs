//! Covering complexes built from coset actions, and the universal-covering
//! pipeline.
//!
//! A covering of a base complex is realized as a total complex plus
//! cell-wise projections. Finite-sheeted coverings come out of a completed
//! Todd-Coxeter table: vertices are (coset, base vertex) pairs, non-tree
//! edges permute cosets by their generator's column, tree edges act
//! trivially, and faces lift by tracing their boundary words. When the
//! subgroup has infinite index the covering exists only as a ball-truncated
//! window around the basepoint lift, cut from the partial table.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::complex::{
    cell_closure_cover, star_cover, subcomplex_components, subdivide, Complex, Cover, EdgeId,
    EdgeLoop, FaceId, SignedEdge, Subcomplex, SubdivisionTower, VertexId,
};
use crate::error::{Error, Result};
use crate::fpgroup::{
    fold, todd_coxeter, Budgets, Certificate, CosetTable, NclContext, Verdict, Word,
};
use crate::spanier::{
    normal_equal, pi1, pi_stable, spanier_loops, spanier_sp_approx, NormalSubgroupData, Pi1Data,
    RootedTree, SpApproximation,
};

/// A combinatorial covering projection with explicit cell maps.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoveringMap {
    pub total: Complex,
    pub base: Complex,
    pub vertex_proj: BTreeMap<VertexId, VertexId>,
    pub edge_proj: BTreeMap<EdgeId, EdgeId>,
    pub face_proj: BTreeMap<FaceId, FaceId>,
    /// Fiber cardinality, present exactly when the covering is complete.
    pub sheets: Option<usize>,
    /// Truncation radius, present exactly when the covering is a ball.
    pub truncation: Option<usize>,
}

impl CoveringMap {
    pub fn is_truncated(&self) -> bool {
        self.truncation.is_some()
    }

    pub fn basepoint_lift(&self) -> &VertexId {
        self.total.basepoint()
    }

    fn project_signed(&self, s: &SignedEdge) -> Option<SignedEdge> {
        self.edge_proj.get(&s.edge).map(|e| SignedEdge { edge: e.clone(), inverted: s.inverted })
    }
}

fn lift_vertex(v: &VertexId, i: usize) -> VertexId {
    VertexId(format!("{v}@{i}"))
}

fn lift_edge(e: &EdgeId, i: usize) -> EdgeId {
    EdgeId(format!("{e}@{i}"))
}

fn lift_face(f: &FaceId, i: usize) -> FaceId {
    FaceId(format!("{f}@{i}"))
}

/// How the subgroup handed to the enumerator is meant: as a plain subgroup
/// generated by the words, or as their normal closure (enumerated through
/// the quotient's regular action).
enum SubgroupSpec<'a> {
    Generated(&'a [Word]),
    NormalClosure(&'a [Word]),
}

fn enumerate_subgroup(pi1: &Pi1Data, spec: &SubgroupSpec<'_>, budget: usize) -> CosetTable {
    match spec {
        SubgroupSpec::Generated(gens) => todd_coxeter(&pi1.presentation, gens, budget),
        SubgroupSpec::NormalClosure(gens) => {
            let mut quotient = pi1.presentation.clone();
            quotient.relators.extend(gens.iter().cloned());
            todd_coxeter(&quotient, &[], budget)
        }
    }
}

/// Coset reached from `i` along edge `e` (forwards), `None` where the
/// partial table is undefined.
fn edge_action(pi1: &Pi1Data, table: &CosetTable, i: usize, e: &EdgeId, inverted: bool) -> Option<usize> {
    match pi1.generator_letter(e) {
        None => Some(i),
        Some(l) => table.step(i, if inverted { -l } else { l }),
    }
}

/// Builds the full covering from a completed table.
fn covering_from_table(pi1: &Pi1Data, table: &CosetTable) -> CoveringMap {
    debug_assert!(table.is_complete());
    let base = pi1.complex();
    let n = table.cosets();
    let mut total = Complex::new(lift_vertex(base.basepoint(), 0));
    let mut vertex_proj = BTreeMap::new();
    let mut edge_proj = BTreeMap::new();
    let mut face_proj = BTreeMap::new();

    for i in 0..n {
        for v in base.vertices() {
            let lv = lift_vertex(v, i);
            total.add_vertex(lv.clone());
            vertex_proj.insert(lv, v.clone());
        }
        for (e, (src, dst)) in base.edges() {
            let j = edge_action(pi1, table, i, e, false).expect("complete table");
            let le = lift_edge(e, i);
            total.add_edge(le.clone(), lift_vertex(src, i), lift_vertex(dst, j));
            edge_proj.insert(le, e.clone());
        }
    }
    for i in 0..n {
        for (f, boundary) in base.faces() {
            let mut cur = i;
            let mut lifted = Vec::with_capacity(boundary.len());
            for s in boundary {
                if !s.inverted {
                    lifted.push(SignedEdge::forward(lift_edge(&s.edge, cur)));
                    cur = edge_action(pi1, table, cur, &s.edge, false).expect("complete table");
                } else {
                    let p = edge_action(pi1, table, cur, &s.edge, true).expect("complete table");
                    lifted.push(SignedEdge::backward(lift_edge(&s.edge, p)));
                    cur = p;
                }
            }
            debug_assert_eq!(cur, i, "face boundary closes over a completed table");
            let lf = lift_face(f, i);
            total.add_face(lf.clone(), lifted);
            face_proj.insert(lf, f.clone());
        }
    }
    debug_assert!(total.validate().is_ok());
    CoveringMap {
        total,
        base: base.clone(),
        vertex_proj,
        edge_proj,
        face_proj,
        sheets: Some(n),
        truncation: None,
    }
}

/// Cuts the ball of the given radius around the basepoint lift out of a
/// (possibly partial) table. Falls back to the full covering when the
/// table is complete and already fits inside the radius.
fn ball_from_table(pi1: &Pi1Data, table: &CosetTable, radius: usize) -> CoveringMap {
    let base = pi1.complex();
    let mut adjacency: BTreeMap<VertexId, Vec<(EdgeId, bool)>> = BTreeMap::new();
    for v in base.vertices() {
        adjacency.insert(v.clone(), Vec::new());
    }
    for (e, (src, dst)) in base.edges() {
        adjacency.get_mut(src).expect("valid").push((e.clone(), false));
        adjacency.get_mut(dst).expect("valid").push((e.clone(), true));
    }

    // breadth-first distances over (coset, vertex) pairs along defined lifts
    let start = (0usize, base.basepoint().clone());
    let mut dist: BTreeMap<(usize, VertexId), usize> = BTreeMap::new();
    dist.insert(start.clone(), 0);
    let mut queue = VecDeque::new();
    queue.push_back(start);
    while let Some((i, v)) = queue.pop_front() {
        let d = dist[&(i, v.clone())];
        for (e, backwards) in &adjacency[&v] {
            let step = edge_action(pi1, table, i, e, *backwards);
            let Some(j) = step else { continue };
            let (src, dst) = base.endpoints(e).expect("valid");
            let w = if *backwards { src.clone() } else { dst.clone() };
            let key = (j, w.clone());
            if !dist.contains_key(&key) {
                dist.insert(key.clone(), d + 1);
                queue.push_back(key);
            }
        }
    }

    // a pair is complete when every incident edge lift is defined
    let is_complete_pair = |i: usize, v: &VertexId| -> bool {
        adjacency[v].iter().all(|(e, backwards)| edge_action(pi1, table, i, e, *backwards).is_some())
    };

    if table.is_complete() {
        let all_reached = table.cosets() * base.vertex_count() == dist.len();
        let max_dist = dist.values().copied().max().unwrap_or(0);
        if all_reached && max_dist <= radius {
            return covering_from_table(pi1, table);
        }
    }

    let mut effective = radius;
    for ((i, v), d) in &dist {
        if !is_complete_pair(*i, v) && *d < effective {
            effective = *d;
        }
    }

    let keep: BTreeSet<(usize, VertexId)> = dist
        .iter()
        .filter(|(_, &d)| d <= effective)
        .map(|(k, _)| k.clone())
        .collect();
    let mut total = Complex::new(lift_vertex(base.basepoint(), 0));
    let mut vertex_proj = BTreeMap::new();
    let mut edge_proj = BTreeMap::new();
    let mut face_proj = BTreeMap::new();
    for (i, v) in &keep {
        let lv = lift_vertex(v, *i);
        total.add_vertex(lv.clone());
        vertex_proj.insert(lv, v.clone());
    }
    let mut kept_edges: BTreeSet<(EdgeId, usize)> = BTreeSet::new();
    for (e, (src, dst)) in base.edges() {
        for (i, v) in &keep {
            if v != src {
                continue;
            }
            let Some(j) = edge_action(pi1, table, *i, e, false) else { continue };
            let dst_key = (j, dst.clone());
            if !keep.contains(&dst_key) {
                continue;
            }
            let d_src = dist[&(*i, src.clone())];
            let d_dst = dist[&dst_key];
            if d_src.min(d_dst) >= effective {
                continue;
            }
            let le = lift_edge(e, *i);
            total.add_edge(le.clone(), lift_vertex(src, *i), lift_vertex(dst, j));
            edge_proj.insert(le, e.clone());
            kept_edges.insert((e.clone(), *i));
        }
    }
    let cosets: BTreeSet<usize> = keep.iter().map(|(i, _)| *i).collect();
    for (f, boundary) in base.faces() {
        for &i in &cosets {
            let mut cur = i;
            let mut lifted = Vec::with_capacity(boundary.len());
            let mut ok = true;
            for s in boundary {
                let pair = if !s.inverted {
                    let at = cur;
                    match edge_action(pi1, table, cur, &s.edge, false) {
                        Some(j) => {
                            cur = j;
                            Some((at, false))
                        }
                        None => None,
                    }
                } else {
                    match edge_action(pi1, table, cur, &s.edge, true) {
                        Some(p) => {
                            cur = p;
                            Some((p, true))
                        }
                        None => None,
                    }
                };
                match pair {
                    Some((at, inverted)) if kept_edges.contains(&(s.edge.clone(), at)) => {
                        lifted.push(SignedEdge { edge: lift_edge(&s.edge, at), inverted });
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && cur == i {
                let lf = lift_face(f, i);
                total.add_face(lf.clone(), lifted);
                face_proj.insert(lf, f.clone());
            }
        }
    }
    debug_assert!(total.validate().is_ok());
    CoveringMap {
        total,
        base: base.clone(),
        vertex_proj,
        edge_proj,
        face_proj,
        sheets: None,
        truncation: Some(effective),
    }
}

/// Builds the covering with image the subgroup generated by `h_gens`
/// (words over the base presentation). Fails with `Budget` when the coset
/// enumeration does not complete; callers may fall back to
/// [`ball_covering`].
pub fn build_covering(c: &Complex, h_gens: &[Word], budget: usize) -> Result<CoveringMap> {
    let pi1 = pi1(c)?;
    let table = enumerate_subgroup(&pi1, &SubgroupSpec::Generated(h_gens), budget);
    if !table.is_complete() {
        return Err(Error::Budget { live_cosets: table.cosets() });
    }
    Ok(covering_from_table(&pi1, &table))
}

/// A window of the given combinatorial radius on the covering for the
/// subgroup generated by `h_gens`. Complete enumerations that fit in the
/// radius come back untruncated; otherwise the ball is cut from the
/// partial enumeration, shrinking the radius if the table has gaps closer
/// to the basepoint lift.
pub fn ball_covering(c: &Complex, h_gens: &[Word], radius: usize, budget: usize) -> Result<CoveringMap> {
    let pi1 = pi1(c)?;
    let table = enumerate_subgroup(&pi1, &SubgroupSpec::Generated(h_gens), budget);
    Ok(ball_from_table(&pi1, &table, radius))
}

/// Checks every covering-map invariant. Untruncated maps must have
/// constant fibers, unique edge lifting everywhere, face fibers of full
/// size and total path lifting from the basepoint; truncated maps are
/// checked strictly inside their radius.
pub fn verify_covering(m: &CoveringMap) -> Result<()> {
    m.base.validate()?;
    m.total.validate()?;

    for v in m.total.vertices() {
        let bv = m.vertex_proj.get(v).ok_or_else(|| Error::Projection { cell: v.0.clone() })?;
        if !m.base.has_vertex(bv) {
            return Err(Error::Projection { cell: v.0.clone() });
        }
    }
    if m.vertex_proj.get(m.total.basepoint()) != Some(m.base.basepoint()) {
        return Err(Error::Projection { cell: m.total.basepoint().0.clone() });
    }
    for (e, (src, dst)) in m.total.edges() {
        let be = m.edge_proj.get(e).ok_or_else(|| Error::Projection { cell: e.0.clone() })?;
        let (bsrc, bdst) = m
            .base
            .endpoints(be)
            .ok_or_else(|| Error::Projection { cell: e.0.clone() })?;
        if m.vertex_proj.get(src) != Some(bsrc) || m.vertex_proj.get(dst) != Some(bdst) {
            return Err(Error::Projection { cell: e.0.clone() });
        }
    }
    for (f, boundary) in m.total.faces() {
        let bf = m.face_proj.get(f).ok_or_else(|| Error::Projection { cell: f.0.clone() })?;
        let base_boundary =
            m.base.boundary(bf).ok_or_else(|| Error::Projection { cell: f.0.clone() })?;
        let projected: Option<Vec<SignedEdge>> =
            boundary.iter().map(|s| m.project_signed(s)).collect();
        let projected = projected.ok_or_else(|| Error::FaceLift { face: f.0.clone() })?;
        if rotation_offset(&projected, base_boundary).is_none() {
            return Err(Error::FaceLift { face: f.0.clone() });
        }
    }

    // unique edge lifting, per direction
    let mut out_lifts: BTreeMap<(VertexId, EdgeId), usize> = BTreeMap::new();
    let mut in_lifts: BTreeMap<(VertexId, EdgeId), usize> = BTreeMap::new();
    for (e, (src, dst)) in m.total.edges() {
        let be = m.edge_proj[e].clone();
        *out_lifts.entry((src.clone(), be.clone())).or_insert(0) += 1;
        *in_lifts.entry((dst.clone(), be)).or_insert(0) += 1;
    }
    let interior: BTreeSet<VertexId> = match m.truncation {
        None => m.total.vertices().cloned().collect(),
        Some(r) => {
            let dist = total_distances(&m.total);
            m.total
                .vertices()
                .filter(|v| dist.get(*v).map_or(false, |&d| d < r))
                .cloned()
                .collect()
        }
    };
    for tv in &interior {
        let bv = &m.vertex_proj[tv];
        for (e, (src, dst)) in m.base.edges() {
            if src == bv && out_lifts.get(&(tv.clone(), e.clone())).copied().unwrap_or(0) != 1 {
                return Err(Error::EdgeLift { vertex: tv.0.clone(), edge: e.0.clone() });
            }
            if dst == bv && in_lifts.get(&(tv.clone(), e.clone())).copied().unwrap_or(0) != 1 {
                return Err(Error::EdgeLift { vertex: tv.0.clone(), edge: e.0.clone() });
            }
        }
    }

    if let Some(sheets) = m.sheets {
        let mut vertex_fibers: BTreeMap<VertexId, usize> = BTreeMap::new();
        for bv in m.vertex_proj.values() {
            *vertex_fibers.entry(bv.clone()).or_insert(0) += 1;
        }
        for bv in m.base.vertices() {
            if vertex_fibers.get(bv).copied().unwrap_or(0) != sheets {
                return Err(Error::Fiber { vertex: bv.0.clone() });
            }
        }
        let mut face_fibers: BTreeMap<FaceId, usize> = BTreeMap::new();
        for bf in m.face_proj.values() {
            *face_fibers.entry(bf.clone()).or_insert(0) += 1;
        }
        for (bf, _) in m.base.faces() {
            if face_fibers.get(bf).copied().unwrap_or(0) != sheets {
                return Err(Error::FaceLift { face: bf.0.clone() });
            }
        }
        // sample path lifting: generator loops and face boundaries lift to
        // paths from the basepoint lift
        let base_pi1 = pi1(&m.base)?;
        let mut samples: Vec<EdgeLoop> = Vec::new();
        for g in 0..base_pi1.presentation.rank() {
            samples.push(base_pi1.loop_of_word(&Word::generator(g)));
        }
        for r in &base_pi1.presentation.relators {
            samples.push(base_pi1.loop_of_word(r));
        }
        for l in samples {
            trace_lift(m, &l)?;
        }
    }
    Ok(())
}

fn total_distances(total: &Complex) -> BTreeMap<VertexId, usize> {
    let adjacency = total.adjacency();
    let mut dist = BTreeMap::new();
    dist.insert(total.basepoint().clone(), 0usize);
    let mut queue = VecDeque::new();
    queue.push_back(total.basepoint().clone());
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if let Some(nb) = adjacency.get(&v) {
            for (_, w) in nb {
                if !dist.contains_key(w) {
                    dist.insert(w.clone(), d + 1);
                    queue.push_back(w.clone());
                }
            }
        }
    }
    dist
}

/// The rotation aligning `projected` with `base` (no reflections), if any.
fn rotation_offset(projected: &[SignedEdge], base: &[SignedEdge]) -> Option<usize> {
    if projected.len() != base.len() {
        return None;
    }
    let n = base.len();
    (0..n).find(|&rho| (0..n).all(|j| projected[j] == base[(j + rho) % n]))
}

/// Lifts a base loop edge-by-edge from the basepoint lift; unique by edge
/// lifting, and an error if the track leaves the total space.
fn trace_lift(m: &CoveringMap, l: &EdgeLoop) -> Result<VertexId> {
    let mut out_index: BTreeMap<(VertexId, EdgeId), (EdgeId, VertexId)> = BTreeMap::new();
    let mut in_index: BTreeMap<(VertexId, EdgeId), (EdgeId, VertexId)> = BTreeMap::new();
    for (e, (src, dst)) in m.total.edges() {
        let be = m.edge_proj[e].clone();
        out_index.insert((src.clone(), be.clone()), (e.clone(), dst.clone()));
        in_index.insert((dst.clone(), be), (e.clone(), src.clone()));
    }
    let mut at = m.basepoint_lift().clone();
    for s in &l.edges {
        let next = if s.inverted {
            in_index.get(&(at.clone(), s.edge.clone()))
        } else {
            out_index.get(&(at.clone(), s.edge.clone()))
        };
        match next {
            Some((_, to)) => at = to.clone(),
            None => {
                return Err(Error::EdgeLift { vertex: at.0.clone(), edge: s.edge.0.clone() })
            }
        }
    }
    Ok(at)
}

/// The image subgroup of a covering and its comparison with an intended
/// subgroup.
#[derive(Clone, Debug)]
pub struct ImageSubgroup {
    /// Generator words of p_*π1(total, basepoint lift) over the base
    /// presentation, one per non-tree edge of the total space.
    pub generators: Vec<Word>,
    /// Does the image equal the intended subgroup? Exact (via folding)
    /// when the base has free fundamental group; otherwise mutual
    /// normal-closure containment.
    pub matches_intended: Verdict,
}

/// Reads p_*π1 off a spanning tree of the total space and compares it with
/// the subgroup generated by `intended`.
pub fn image_subgroup(m: &CoveringMap, intended: &[Word], budgets: Budgets) -> Result<ImageSubgroup> {
    if m.is_truncated() {
        return Err(Error::Truncated);
    }
    let base_pi1 = pi1(&m.base)?;
    let tree = RootedTree::new(&m.total, None, m.total.basepoint());
    let mut generators: Vec<Word> = Vec::new();
    let mut seen = BTreeSet::new();
    for (e, (src, dst)) in m.total.edges() {
        if tree.edges.contains(e) {
            continue;
        }
        let mut edges = tree.path_to(src).edges;
        edges.push(SignedEdge::forward(e.clone()));
        edges.extend(tree.path_to(dst).edges.iter().rev().map(SignedEdge::inverse));
        let projected: Option<Vec<SignedEdge>> = edges.iter().map(|s| m.project_signed(s)).collect();
        let projected = projected.ok_or_else(|| Error::Projection { cell: e.0.clone() })?;
        let base_loop = EdgeLoop { base: m.base.basepoint().clone(), edges: projected };
        let w = base_pi1.word_of_loop(&base_loop)?;
        if !w.is_empty() && seen.insert(w.clone()) {
            generators.push(w);
        }
    }

    let matches_intended = if m.base.face_count() == 0 {
        let rank = base_pi1.presentation.rank();
        let intended_graph = fold(rank, intended);
        let image_graph = fold(rank, &generators);
        let forwards = generators.iter().all(|w| intended_graph.contains(w));
        let backwards = intended.iter().all(|w| image_graph.contains(w));
        let states = intended_graph.states();
        if forwards && backwards {
            Verdict::Yes(Certificate::Folding { states })
        } else {
            Verdict::No(Certificate::Folding { states })
        }
    } else {
        let into_intended = {
            let mut ctx = NclContext::new(&base_pi1.presentation, intended, budgets);
            Verdict::all(generators.iter().map(|w| ctx.verdict(w)))
        };
        let into_image = {
            let mut ctx = NclContext::new(&base_pi1.presentation, &generators, budgets);
            Verdict::all(intended.iter().map(|w| ctx.verdict(w)))
        };
        Verdict::all([into_intended, into_image])
    };
    Ok(ImageSubgroup { generators, matches_intended })
}

/// Subdivides base and total compatibly; the projection extends cell-wise
/// (midpoints over midpoints, centres over centres, radials and triangles
/// by boundary position). Untruncated maps only.
pub fn subdivide_covering(m: &CoveringMap) -> Result<CoveringMap> {
    if m.is_truncated() {
        return Err(Error::Truncated);
    }
    let sb = subdivide(&m.base);
    let st = subdivide(&m.total);
    let mut vertex_proj = BTreeMap::new();
    let mut edge_proj = BTreeMap::new();
    let mut face_proj = BTreeMap::new();

    for (tv, bv) in &m.vertex_proj {
        vertex_proj.insert(tv.clone(), bv.clone());
    }
    for (te, be) in &m.edge_proj {
        vertex_proj.insert(st.midpoint(te).clone(), sb.midpoint(be).clone());
        let (t0, t1) = st.halves(te).clone();
        let (b0, b1) = sb.halves(be).clone();
        edge_proj.insert(t0, b0);
        edge_proj.insert(t1, b1);
    }
    for (tf, bf) in &m.face_proj {
        vertex_proj.insert(st.centre(tf).clone(), sb.centre(bf).clone());
        let t_boundary = m.total.boundary(tf).expect("face").clone();
        let projected: Vec<SignedEdge> =
            t_boundary.iter().map(|s| m.project_signed(s).expect("projected")).collect();
        let b_boundary = m.base.boundary(bf).expect("face");
        let rho = rotation_offset(&projected, b_boundary)
            .ok_or_else(|| Error::FaceLift { face: tf.0.clone() })?;
        let len = 2 * b_boundary.len();
        for i in 0..len {
            let bi = (i + 2 * rho) % len;
            edge_proj.insert(st.radials(tf)[i].clone(), sb.radials(bf)[bi].clone());
            face_proj.insert(st.triangles(tf)[i].clone(), sb.triangles(bf)[bi].clone());
        }
    }
    Ok(CoveringMap {
        total: st.complex,
        base: sb.complex,
        vertex_proj,
        edge_proj,
        face_proj,
        sheets: m.sheets,
        truncation: None,
    })
}

/// A cover of (a subdivision of) the base over which the covering
/// restricts to disjoint homeomorphic copies.
#[derive(Clone, Debug)]
pub struct EvenCover {
    /// How many compatible subdivisions were taken before every element
    /// lifted evenly.
    pub depth: usize,
    /// The base complex at that depth.
    pub base: Complex,
    pub cover: Cover,
    /// Subdivision chain of the original base, for translating loops.
    pub tower: SubdivisionTower,
}

fn element_evenly_covered(m: &CoveringMap, s: &Subcomplex) -> bool {
    let mut preimage = Subcomplex::empty();
    for (tv, bv) in &m.vertex_proj {
        if s.vertices.contains(bv) {
            preimage.vertices.insert(tv.clone());
        }
    }
    for (te, be) in &m.edge_proj {
        if s.edges.contains(be) {
            preimage.edges.insert(te.clone());
        }
    }
    for (tf, bf) in &m.face_proj {
        if s.faces.contains(bf) {
            preimage.faces.insert(tf.clone());
        }
    }
    for component in subcomplex_components(&m.total, &preimage) {
        let vs: BTreeSet<VertexId> =
            component.vertices.iter().map(|v| m.vertex_proj[v].clone()).collect();
        let es: BTreeSet<EdgeId> = component.edges.iter().map(|e| m.edge_proj[e].clone()).collect();
        let fs: BTreeSet<FaceId> = component.faces.iter().map(|f| m.face_proj[f].clone()).collect();
        let injective = vs.len() == component.vertices.len()
            && es.len() == component.edges.len()
            && fs.len() == component.faces.len();
        if !injective || vs != s.vertices || es != s.edges || fs != s.faces {
            return false;
        }
    }
    true
}

/// Greedily produces a cover of the base by evenly covered subcomplexes:
/// the whole complex, then closed stars, then closures of single cells,
/// subdividing base and total compatibly until one family works (closures
/// of cells are embedded discs and arcs after one subdivision, so genuine
/// coverings always terminate by then).
pub fn evenly_covered_cover(m: &CoveringMap) -> Result<EvenCover> {
    if m.is_truncated() {
        return Err(Error::Truncated);
    }
    let mut current = m.clone();
    for depth in 0..=3usize {
        for cover in [Cover::whole(&current.base), star_cover(&current.base), cell_closure_cover(&current.base)] {
            if cover.elements.iter().all(|s| element_evenly_covered(&current, s)) {
                return Ok(EvenCover {
                    depth,
                    base: current.base.clone(),
                    cover,
                    tower: SubdivisionTower::new(&m.base, depth),
                });
            }
        }
        if depth < 3 {
            current = subdivide_covering(&current)?;
        }
    }
    Err(Error::Projection { cell: "no evenly covered cover within 3 subdivisions".to_string() })
}

impl EvenCover {
    /// The Spanier group of the evenly covered cover, translated down to
    /// the original base complex.
    pub fn spanier_data(&self, pi1_base: &Arc<Pi1Data>) -> Result<NormalSubgroupData> {
        let loops = spanier_loops(&self.base, &self.cover)?;
        let mut words = Vec::new();
        for l in &loops {
            let pushed = self.tower.push_loop_to_base(self.depth, l)?;
            words.push(pi1_base.word_of_loop(&pushed)?);
        }
        Ok(NormalSubgroupData::new(
            pi1_base.clone(),
            words,
            format!("evenly covered cover at depth {}", self.depth),
        ))
    }
}

/// Outcome of searching for a cover witnessing Spanier's criterion
/// π(𝒰) ≤ H.
#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found {
        /// Subdivision level of the witness (0 = a member of the supplied
        /// universe).
        level: usize,
        cover: Cover,
        origin: String,
    },
    NotFound {
        searched: usize,
    },
}

/// Scans the supplied covers and the star covers of subdivisions up to
/// `depth` for one whose Spanier group is certified inside the subgroup
/// generated by `h_gens` (exactly, via folding, when the base is free;
/// through normal-closure verdicts otherwise).
pub fn exists_covering_for(
    c: &Complex,
    h_gens: &[Word],
    universe: &[Cover],
    depth: usize,
    budgets: Budgets,
) -> Result<SearchOutcome> {
    let base_pi1 = Arc::new(pi1(c)?);
    let tower = SubdivisionTower::new(c, depth);
    let free = c.face_count() == 0;
    let graph = if free { Some(fold(base_pi1.presentation.rank(), h_gens)) } else { None };
    let mut searched = 0usize;

    let mut candidates: Vec<(usize, Cover, String)> = Vec::new();
    for (idx, u) in universe.iter().enumerate() {
        candidates.push((0, u.clone(), format!("universe[{idx}]")));
    }
    for level in 0..=depth {
        candidates.push((
            level,
            star_cover(tower.complex(level)),
            format!("star cover at subdivision depth {level}"),
        ));
    }

    for (level, cover, origin) in candidates {
        searched += 1;
        let loops = spanier_loops(tower.complex(level), &cover)?;
        let mut words = Vec::new();
        for l in &loops {
            let pushed = tower.push_loop_to_base(level, l)?;
            words.push(base_pi1.word_of_loop(&pushed)?);
        }
        let qualified = if let Some(graph) = &graph {
            words.iter().all(|w| graph.contains(w))
        } else {
            let mut ctx = NclContext::new(&base_pi1.presentation, h_gens, budgets);
            words.iter().all(|w| ctx.verdict(w).is_yes())
        };
        if qualified {
            return Ok(SearchOutcome::Found { level, cover, origin });
        }
    }
    Ok(SearchOutcome::NotFound { searched })
}

/// One checked line of the universal-covering certificate.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateItem {
    pub name: String,
    pub status: String,
}

/// Evidence attached to a universal covering: the π^sp approximation, the
/// stabilized star-cover witness, and the checklist of equivalent
/// conditions verified at finite scale.
#[derive(Clone, Debug)]
pub struct UniversalCertificate {
    pub sp_depth: usize,
    pub sp_stabilized: bool,
    pub sp_generators: Vec<String>,
    pub witness_level: usize,
    pub witness_elements: usize,
    /// spanier_equal between the witness cover's Spanier group and the
    /// π^sp approximation.
    pub witness_matches_sp: Verdict,
    /// π-stability verdict for the witness cover on its own complex.
    pub witness_stable: Verdict,
    pub sheets: Option<usize>,
    pub truncation: Option<usize>,
    pub items: Vec<CertificateItem>,
}

/// A universal covering together with its certificate.
pub struct UniversalCovering {
    pub covering: CoveringMap,
    pub certificate: UniversalCertificate,
    pub approximation: SpApproximation,
}

/// Builds the covering over the approximated Spanier group π^sp: the full
/// simply-connected-like cover when the quotient enumeration completes, a
/// ball window otherwise. The certificate records the π-stable witness
/// (the stabilized star cover) and what was checked of the equivalent
/// existence conditions.
pub fn universal_covering(
    c: &Complex,
    depth: usize,
    radius: usize,
    budgets: Budgets,
) -> Result<UniversalCovering> {
    let approx = spanier_sp_approx(c, depth, budgets)?;
    let base_pi1 = approx.data.pi1.clone();
    let table =
        enumerate_subgroup(&base_pi1, &SubgroupSpec::NormalClosure(&approx.data.generators), budgets.max_cosets);
    let covering = if table.is_complete() {
        covering_from_table(&base_pi1, &table)
    } else {
        ball_from_table(&base_pi1, &table, radius)
    };

    let witness = approx.witness_cover();
    let witness_matches_sp = normal_equal(
        &base_pi1,
        &approx.level_generators[approx.depth],
        &approx.data.generators,
        budgets,
    );
    let witness_stable =
        pi_stable(approx.tower.complex(approx.depth), &witness, &[], false, budgets)?;

    let scale_checked = approx.stabilized;
    let mut items = Vec::new();
    items.push(CertificateItem {
        name: "coverable".to_string(),
        status: match covering.sheets {
            Some(n) => format!("checked: covering over the approximated Spanier group built with {n} sheets"),
            None => format!(
                "checked at radius {}: infinite-sheet covering represented as a truncated ball",
                covering.truncation.unwrap_or(0)
            ),
        },
    });
    items.push(CertificateItem {
        name: "universal covering".to_string(),
        status: "constructed over the approximated Spanier group".to_string(),
    });
    items.push(CertificateItem {
        name: "pi-stable cover".to_string(),
        status: format!(
            "witness: star cover at subdivision depth {} ({} elements); stability {}",
            approx.depth,
            witness.len(),
            witness_stable
        ),
    });
    items.push(CertificateItem {
        name: "semi-locally spanier".to_string(),
        status: if scale_checked {
            format!(
                "checked at depth {}: star neighborhoods have image inside the approximation",
                approx.depth
            )
        } else {
            format!("unknown: approximation not stabilized at depth {}", approx.depth)
        },
    });
    items.push(CertificateItem {
        name: "no wild point".to_string(),
        status: if scale_checked && approx.data.generators.is_empty() {
            format!("checked at depth {}: every vertex has a star with trivial image", approx.depth)
        } else {
            "unknown at this scale".to_string()
        },
    });
    items.push(CertificateItem {
        name: "open subgroup of the topologized fundamental group".to_string(),
        status: "not checked (out of scope)".to_string(),
    });

    let certificate = UniversalCertificate {
        sp_depth: approx.depth,
        sp_stabilized: approx.stabilized,
        sp_generators: approx
            .data
            .generators
            .iter()
            .map(|w| base_pi1.presentation.render(w))
            .collect(),
        witness_level: approx.depth,
        witness_elements: witness.len(),
        witness_matches_sp,
        witness_stable,
        sheets: covering.sheets,
        truncation: covering.truncation,
        items,
    };
    Ok(UniversalCovering { covering, certificate, approximation: approx })
}

/// A cell map between the total spaces of two coverings of the same base,
/// commuting with the projections.
#[derive(Clone, Debug)]
pub struct CoveringMorphism {
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
    pub face_map: BTreeMap<FaceId, FaceId>,
}

/// Basepoint-led lifting of `fine`'s total space into `coarse`'s: the
/// basepoint lift maps to the basepoint lift and edges follow unique edge
/// lifting over the common base. `None` when no consistent map exists
/// (i.e. the fine image subgroup is not contained in the coarse one).
pub fn factor_through(fine: &CoveringMap, coarse: &CoveringMap) -> Option<CoveringMorphism> {
    if fine.is_truncated() || coarse.is_truncated() || fine.base != coarse.base {
        return None;
    }
    let mut out_index: BTreeMap<(VertexId, EdgeId), (EdgeId, VertexId)> = BTreeMap::new();
    let mut in_index: BTreeMap<(VertexId, EdgeId), (EdgeId, VertexId)> = BTreeMap::new();
    for (e, (src, dst)) in coarse.total.edges() {
        let be = coarse.edge_proj[e].clone();
        out_index.insert((src.clone(), be.clone()), (e.clone(), dst.clone()));
        in_index.insert((dst.clone(), be), (e.clone(), src.clone()));
    }

    let mut vertex_map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut edge_map: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    vertex_map.insert(fine.basepoint_lift().clone(), coarse.basepoint_lift().clone());
    let mut queue = VecDeque::new();
    queue.push_back(fine.basepoint_lift().clone());
    let fine_adjacency = fine.total.adjacency();
    while let Some(v) = queue.pop_front() {
        let image = vertex_map[&v].clone();
        for (s, w) in &fine_adjacency[&v] {
            let be = fine.edge_proj[&s.edge].clone();
            let (ce, cw) = if s.inverted {
                in_index.get(&(image.clone(), be))?.clone()
            } else {
                out_index.get(&(image.clone(), be))?.clone()
            };
            if let Some(existing) = edge_map.get(&s.edge) {
                if *existing != ce {
                    return None;
                }
            } else {
                edge_map.insert(s.edge.clone(), ce);
            }
            match vertex_map.get(w) {
                Some(existing) => {
                    if *existing != cw {
                        return None;
                    }
                }
                None => {
                    vertex_map.insert(w.clone(), cw);
                    queue.push_back(w.clone());
                }
            }
        }
    }
    if vertex_map.len() != fine.total.vertex_count() || edge_map.len() != fine.total.edge_count() {
        return None;
    }

    let mut face_map: BTreeMap<FaceId, FaceId> = BTreeMap::new();
    for (tf, boundary) in fine.total.faces() {
        let mapped: Vec<SignedEdge> = boundary
            .iter()
            .map(|s| SignedEdge { edge: edge_map[&s.edge].clone(), inverted: s.inverted })
            .collect();
        let bf = fine.face_proj[tf].clone();
        let mut found = None;
        for (cf, cb) in coarse.total.faces() {
            if coarse.face_proj[cf] == bf && rotation_offset(&mapped, cb).is_some() {
                found = Some(cf.clone());
                break;
            }
        }
        face_map.insert(tf.clone(), found?);
    }
    Some(CoveringMorphism { vertex_map, edge_map, face_map })
}

/// Basepoint-preserving equivalence of coverings: factorizations both ways
/// with matching cell counts.
pub fn equivalent(a: &CoveringMap, b: &CoveringMap) -> bool {
    a.total.vertex_count() == b.total.vertex_count()
        && a.total.edge_count() == b.total.edge_count()
        && a.total.face_count() == b.total.face_count()
        && factor_through(a, b).is_some()
        && factor_through(b, a).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn w(letters: &[i32]) -> Word {
        Word::from_letters(letters.iter().copied())
    }

    #[test]
    fn double_cover_of_the_circle() {
        let c = shapes::circle();
        let m = build_covering(&c, &[w(&[1, 1])], 100).unwrap();
        assert_eq!(m.sheets, Some(2));
        assert_eq!(m.total.vertex_count(), 2);
        assert_eq!(m.total.edge_count(), 2);
        verify_covering(&m).unwrap();
        let img = image_subgroup(&m, &[w(&[1, 1])], Budgets::default()).unwrap();
        assert!(img.matches_intended.is_yes());
    }

    #[test]
    fn identity_covering_of_the_disc() {
        let c = shapes::disc();
        let m = build_covering(&c, &[], 100).unwrap();
        assert_eq!(m.sheets, Some(1));
        assert_eq!(m.total.vertex_count(), 1);
        assert_eq!(m.total.face_count(), 1);
        verify_covering(&m).unwrap();
        let img = image_subgroup(&m, &[], Budgets::default()).unwrap();
        assert!(img.matches_intended.is_yes());
    }

    #[test]
    fn index_two_cover_of_the_wedge() {
        let c = shapes::wedge_two_circles();
        let h = [w(&[1]), w(&[2, 2]), w(&[2, 1, -2])];
        let m = build_covering(&c, &h, 100).unwrap();
        assert_eq!(m.sheets, Some(2));
        assert_eq!(m.total.vertex_count(), 2);
        assert_eq!(m.total.edge_count(), 4);
        verify_covering(&m).unwrap();
        let img = image_subgroup(&m, &h, Budgets::default()).unwrap();
        assert!(img.matches_intended.is_yes());
    }

    #[test]
    fn simply_connected_cover_of_the_cyclic_complex() {
        let c = shapes::cyclic(3);
        let m = build_covering(&c, &[], 100).unwrap();
        assert_eq!(m.sheets, Some(3));
        assert_eq!(m.total.vertex_count(), 3);
        assert_eq!(m.total.edge_count(), 3);
        assert_eq!(m.total.face_count(), 3);
        verify_covering(&m).unwrap();
        let img = image_subgroup(&m, &[], Budgets::default()).unwrap();
        assert!(img.matches_intended.is_yes());
    }

    #[test]
    fn infinite_cover_exceeds_any_budget() {
        let c = shapes::circle();
        assert!(matches!(build_covering(&c, &[], 50), Err(Error::Budget { .. })));
    }

    #[test]
    fn ball_on_the_line() {
        // universal cover of the circle, radius 2: five vertices on a path
        let c = shapes::circle();
        let m = ball_covering(&c, &[], 2, 100).unwrap();
        assert!(m.is_truncated());
        assert_eq!(m.truncation, Some(2));
        assert_eq!(m.total.vertex_count(), 5);
        assert_eq!(m.total.edge_count(), 4);
        verify_covering(&m).unwrap();
    }

    #[test]
    fn ball_on_the_rank_two_tree() {
        let c = shapes::wedge_two_circles();
        let m = ball_covering(&c, &[], 1, 200).unwrap();
        assert!(m.is_truncated());
        assert_eq!(m.total.vertex_count(), 5);
        assert_eq!(m.total.edge_count(), 4);
        verify_covering(&m).unwrap();
    }

    #[test]
    fn whole_group_ball_is_the_base_itself() {
        let c = shapes::wedge_two_circles();
        let m = ball_covering(&c, &[w(&[1]), w(&[2])], 4, 100).unwrap();
        assert!(!m.is_truncated());
        assert_eq!(m.sheets, Some(1));
        assert_eq!(m.total.vertex_count(), 1);
        verify_covering(&m).unwrap();
    }

    #[test]
    fn corrupted_covering_is_rejected() {
        let c = shapes::circle();
        let mut m = build_covering(&c, &[w(&[1, 1])], 100).unwrap();
        // retarget one lifted edge so both lifts start at the same vertex
        let (e, (src, _)) = m.total.edges().next().map(|(e, p)| (e.clone(), p.clone())).unwrap();
        m.total.add_edge(e.clone(), src.clone(), src);
        assert!(verify_covering(&m).is_err());
    }

    #[test]
    fn identity_covering_is_evenly_covered_by_the_whole() {
        let c = shapes::disc();
        let m = build_covering(&c, &[], 100).unwrap();
        let even = evenly_covered_cover(&m).unwrap();
        assert_eq!(even.depth, 0);
        assert_eq!(even.cover.len(), 1);
    }

    #[test]
    fn double_cover_needs_one_subdivision() {
        let c = shapes::circle();
        let m = build_covering(&c, &[w(&[1, 1])], 100).unwrap();
        let even = evenly_covered_cover(&m).unwrap();
        assert_eq!(even.depth, 1);
        // the two closed arcs of the bisected circle
        assert_eq!(even.cover.len(), 2);
        let base_pi1 = Arc::new(pi1(&c).unwrap());
        let data = even.spanier_data(&base_pi1).unwrap();
        // arcs are trees: trivial Spanier group, inside any image subgroup
        assert!(data.generators.is_empty());
    }

    #[test]
    fn spanier_criterion_search_on_the_circle() {
        let c = shapes::circle();
        // H = <a^2>: the arc cover of the twice subdivided circle qualifies
        let out = exists_covering_for(&c, &[w(&[1, 1])], &[], 3, Budgets::default()).unwrap();
        match out {
            SearchOutcome::Found { level, .. } => assert!(level >= 2),
            SearchOutcome::NotFound { .. } => panic!("expected a witness"),
        }
        // H = whole group: the whole cover qualifies immediately
        let whole = Cover::whole(&c);
        let out = exists_covering_for(&c, &[w(&[1])], &[whole], 0, Budgets::default()).unwrap();
        assert!(matches!(out, SearchOutcome::Found { level: 0, .. }));
    }

    #[test]
    fn universal_covering_of_the_disc_is_the_identity() {
        let u = universal_covering(&shapes::disc(), 2, 3, Budgets::default()).unwrap();
        assert_eq!(u.covering.sheets, Some(1));
        assert!(u.certificate.sp_stabilized);
        assert!(u.certificate.witness_matches_sp.is_yes());
        assert!(u.certificate.witness_stable.is_yes());
        verify_covering(&u.covering).unwrap();
    }

    #[test]
    fn universal_covering_of_the_cyclic_complex_has_three_sheets() {
        let u = universal_covering(&shapes::cyclic(3), 3, 3, Budgets::default()).unwrap();
        assert_eq!(u.covering.sheets, Some(3));
        assert!(u.certificate.witness_matches_sp.is_yes());
        verify_covering(&u.covering).unwrap();
    }

    #[test]
    fn universal_covering_of_the_circle_is_a_truncated_line() {
        let budgets = Budgets { max_cosets: 64, ..Budgets::default() };
        let u = universal_covering(&shapes::circle(), 3, 3, budgets).unwrap();
        assert!(u.covering.is_truncated());
        assert!(u.certificate.sheets.is_none());
        assert!(u.certificate.witness_matches_sp.is_yes());
        verify_covering(&u.covering).unwrap();
    }

    #[test]
    fn finer_coverings_factor_through_coarser_ones() {
        let c = shapes::circle();
        let four = build_covering(&c, &[w(&[1, 1, 1, 1])], 100).unwrap();
        let two = build_covering(&c, &[w(&[1, 1])], 100).unwrap();
        let morphism = factor_through(&four, &two).unwrap();
        assert_eq!(morphism.vertex_map.len(), 4);
        // and not the other way around
        assert!(factor_through(&two, &four).is_none());
    }

    #[test]
    fn rebuilt_coverings_are_equivalent() {
        let c = shapes::wedge_two_circles();
        let h = [w(&[1]), w(&[2, 2]), w(&[2, 1, -2])];
        let a = build_covering(&c, &h, 100).unwrap();
        let b = build_covering(&c, &h, 200).unwrap();
        assert!(equivalent(&a, &b));
    }

    #[test]
    fn intersection_of_two_index_two_subgroups() {
        // kernels of a↦1,b↦0 and a↦0,b↦1 in F2; their intersection has
        // index at most 4
        let c = shapes::wedge_two_circles();
        let k1 = [w(&[2]), w(&[1, 1]), w(&[1, 2, -1])];
        let k2 = [w(&[1]), w(&[2, 2]), w(&[2, 1, -2])];
        let m1 = build_covering(&c, &k1, 100).unwrap();
        let m2 = build_covering(&c, &k2, 100).unwrap();
        let g1 = fold(2, &k1);
        let g2 = fold(2, &k2);
        let meet = crate::fpgroup::intersect_subgroups(2, &g1, &g2);
        let m = build_covering(&c, &meet.generators(), 100).unwrap();
        verify_covering(&m).unwrap();
        let product = m1.sheets.unwrap() * m2.sheets.unwrap();
        assert!(m.sheets.unwrap() <= product);
        assert_eq!(m.sheets, Some(4));
    }

    #[test]
    fn evenly_covered_lemma_holds_on_the_finite_stock() {
        // π(evenly covered cover) ≤ image subgroup, never certified out
        let cases: Vec<(Complex, Vec<Word>)> = alloc::vec![
            (shapes::circle(), alloc::vec![w(&[1, 1])]),
            (shapes::disc(), alloc::vec![]),
            (shapes::cyclic(3), alloc::vec![]),
        ];
        for (c, h) in cases {
            let m = build_covering(&c, &h, 100).unwrap();
            let even = evenly_covered_cover(&m).unwrap();
            let base_pi1 = Arc::new(pi1(&c).unwrap());
            let data = even.spanier_data(&base_pi1).unwrap();
            let img = image_subgroup(&m, &h, Budgets::default()).unwrap();
            let v = crate::spanier::normal_contains(
                &base_pi1,
                &img.generators,
                &data.generators,
                Budgets::default(),
            );
            assert!(!v.is_no());
        }
    }
}
