//! Spanier groups of covers as normal-closure data.
//!
//! For a cover 𝒰 of a complex X, the Spanier group π(𝒰, x) is the subgroup
//! of π1(X, x) generated by all conjugates of loops lying inside single
//! cover elements. It is computed here as a normal generating set: one
//! conjugated generator loop per essential generator of each connected
//! component of each element. Containment and equality between Spanier
//! groups reduce to normal-closure membership and come back as three-valued
//! verdicts; the Spanier group of the space, π^sp, is approximated down a
//! tower of star covers of iterated subdivisions.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::complex::{
    star_cover, Cell, Complex, Cover, EdgeId, EdgeLoop, EdgePath, SignedEdge, Subcomplex,
    Subdivision, SubdivisionTower, VertexId,
};
use crate::error::{Error, Result};
use crate::fpgroup::{
    simplify_presentation, todd_coxeter, Budgets, Certificate, NclContext, Presentation, Verdict,
    Word,
};

/// Live-coset allowance for the internal triviality probe run on component
/// presentations. Deliberately independent of user budgets so that the
/// emitted generating sets are reproducible.
const COMPONENT_ENUM_BUDGET: usize = 512;

/// Length cap for Tietze substitutions when trimming component
/// presentations.
const SIMPLIFY_LEN_CAP: usize = 128;

#[derive(Clone, Debug)]
pub(crate) struct RootedTree {
    pub(crate) root: VertexId,
    /// vertex -> (signed edge from parent, parent vertex)
    pub(crate) parent: BTreeMap<VertexId, (SignedEdge, VertexId)>,
    pub(crate) edges: BTreeSet<EdgeId>,
    pub(crate) visited: BTreeSet<VertexId>,
}

impl RootedTree {
    /// BFS tree over the 1-skeleton restricted to `sub` (or the whole
    /// complex), rooted at `root`, lexicographic tie-breaking.
    pub(crate) fn new(c: &Complex, sub: Option<&Subcomplex>, root: &VertexId) -> Self {
        let adjacency = c.adjacency();
        let in_sub_edge = |e: &EdgeId| sub.map_or(true, |s| s.edges.contains(e));
        let mut parent = BTreeMap::new();
        let mut edges = BTreeSet::new();
        let mut visited = BTreeSet::new();
        visited.insert(root.clone());
        let mut queue = VecDeque::new();
        queue.push_back(root.clone());
        while let Some(v) = queue.pop_front() {
            if let Some(nb) = adjacency.get(&v) {
                for (s, w) in nb {
                    if !in_sub_edge(&s.edge) {
                        continue;
                    }
                    if visited.insert(w.clone()) {
                        parent.insert(w.clone(), (s.clone(), v.clone()));
                        edges.insert(s.edge.clone());
                        queue.push_back(w.clone());
                    }
                }
            }
        }
        RootedTree { root: root.clone(), parent, edges, visited }
    }

    pub(crate) fn path_to(&self, v: &VertexId) -> EdgePath {
        let mut up = Vec::new();
        let mut at = v.clone();
        while at != self.root {
            let (step, par) = self.parent.get(&at).expect("vertex in tree").clone();
            up.push(step);
            at = par;
        }
        up.reverse();
        EdgePath { start: self.root.clone(), edges: up }
    }
}

/// Edge-path presentation of π1 of a complex at its basepoint: one
/// generator per non-tree edge, one relator per face, plus the translation
/// between edge loops and words.
#[derive(Clone, Debug)]
pub struct Pi1Data {
    complex: Complex,
    pub presentation: Presentation,
    tree: RootedTree,
    gen_edges: Vec<(EdgeId, VertexId, VertexId)>,
    gen_index: BTreeMap<EdgeId, usize>,
}

impl Pi1Data {
    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn basepoint(&self) -> &VertexId {
        self.complex.basepoint()
    }

    /// Rewrites a closed edge path (not necessarily based at the
    /// basepoint) through the spanning tree: tree edges vanish, non-tree
    /// edges map to their generators. For based loops this is the
    /// edge-path morphism onto the presentation; for unbased closed paths
    /// it yields the relator up to conjugacy.
    fn word_of_edges(&self, edges: &[SignedEdge]) -> Result<Word> {
        let mut letters = Vec::new();
        for s in edges {
            if self.tree.edges.contains(&s.edge) {
                continue;
            }
            let idx = *self.gen_index.get(&s.edge).ok_or_else(|| Error::Dangling {
                cell: "loop".into(),
                missing: s.edge.0.clone(),
            })?;
            let letter = idx as i32 + 1;
            letters.push(if s.inverted { -letter } else { letter });
        }
        Ok(Word::from_letters(letters))
    }

    /// The word of a loop at the basepoint.
    pub fn word_of_loop(&self, l: &EdgeLoop) -> Result<Word> {
        if l.base != *self.basepoint() {
            return Err(Error::NotBased {
                expected: self.basepoint().0.clone(),
                found: l.base.0.clone(),
            });
        }
        self.word_of_edges(&l.edges)
    }

    /// The generator letter carried by an edge: `None` for spanning-tree
    /// edges, the positive letter for generator edges.
    pub fn generator_letter(&self, e: &EdgeId) -> Option<i32> {
        self.gen_index.get(e).map(|&i| i as i32 + 1)
    }

    /// A canonical loop representing a word: each generator letter expands
    /// to tree path, edge, tree path back.
    pub fn loop_of_word(&self, w: &Word) -> EdgeLoop {
        let mut edges = Vec::new();
        for &l in w.letters() {
            let (e, src, dst) = &self.gen_edges[(l.unsigned_abs() as usize) - 1];
            if l > 0 {
                edges.extend(self.tree.path_to(src).edges);
                edges.push(SignedEdge::forward(e.clone()));
                edges.extend(reverse_edges(&self.tree.path_to(dst).edges));
            } else {
                edges.extend(self.tree.path_to(dst).edges);
                edges.push(SignedEdge::backward(e.clone()));
                edges.extend(reverse_edges(&self.tree.path_to(src).edges));
            }
        }
        EdgeLoop { base: self.basepoint().clone(), edges }
    }
}

fn reverse_edges(edges: &[SignedEdge]) -> Vec<SignedEdge> {
    edges.iter().rev().map(SignedEdge::inverse).collect()
}

/// Edge-path presentation of the fundamental group at the basepoint.
pub fn pi1(c: &Complex) -> Result<Pi1Data> {
    c.validate()?;
    let tree = RootedTree::new(c, None, c.basepoint());
    let mut gen_edges = Vec::new();
    let mut gen_index = BTreeMap::new();
    for (e, (src, dst)) in c.edges() {
        if tree.edges.contains(e) {
            continue;
        }
        gen_index.insert(e.clone(), gen_edges.len());
        gen_edges.push((e.clone(), src.clone(), dst.clone()));
    }
    let generators: Vec<String> = gen_edges.iter().map(|(e, _, _)| e.0.clone()).collect();
    let mut data = Pi1Data {
        complex: c.clone(),
        presentation: Presentation::free(generators),
        tree,
        gen_edges,
        gen_index,
    };
    let mut relators = Vec::new();
    for (_, boundary) in c.faces() {
        let w = data.word_of_edges(boundary)?;
        if !w.is_empty() {
            relators.push(w);
        }
    }
    data.presentation.relators = relators;
    Ok(data)
}

/// Essential generator loops of the component of `root` inside `sub`,
/// based at `root`.
///
/// Generators of the component's edge-path group are trimmed by Tietze
/// simplification against the component's own faces, and dropped entirely
/// when a small enumeration certifies the component is simply connected;
/// what remains still generates the image of the component's fundamental
/// group, which is all the normal closure ever sees.
pub(crate) fn component_loops(c: &Complex, sub: &Subcomplex, root: &VertexId) -> Vec<EdgeLoop> {
    let tree = RootedTree::new(c, Some(sub), root);

    let mut gen_edges: Vec<(EdgeId, VertexId, VertexId)> = Vec::new();
    let mut gen_index: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for e in &sub.edges {
        if tree.edges.contains(e) {
            continue;
        }
        let (src, dst) = c.endpoints(e).expect("subcomplex edge").clone();
        if !tree.visited.contains(&src) {
            continue; // different component
        }
        gen_index.insert(e.clone(), gen_edges.len());
        gen_edges.push((e.clone(), src, dst));
    }
    if gen_edges.is_empty() {
        return Vec::new();
    }

    // relators from faces living in this component
    let mut relators = Vec::new();
    for f in &sub.faces {
        let visits = c.boundary_vertices(f).expect("subcomplex face");
        if !tree.visited.contains(&visits[0]) {
            continue;
        }
        let boundary = c.boundary(f).expect("subcomplex face");
        let mut letters = Vec::new();
        for s in boundary {
            if tree.edges.contains(&s.edge) {
                continue;
            }
            let idx = gen_index[&s.edge];
            let letter = idx as i32 + 1;
            letters.push(if s.inverted { -letter } else { letter });
        }
        let w = Word::from_letters(letters);
        if !w.is_empty() {
            relators.push(w);
        }
    }

    let presentation = Presentation {
        generators: gen_edges.iter().map(|(e, _, _)| e.0.clone()).collect(),
        relators,
    };
    let simplified = simplify_presentation(&presentation, SIMPLIFY_LEN_CAP);
    if simplified.kept.is_empty() {
        return Vec::new();
    }
    // a small enumeration can still certify the whole component trivial
    let probe = todd_coxeter(&simplified.presentation, &[], COMPONENT_ENUM_BUDGET);
    if probe.is_complete() && probe.cosets() == 1 {
        return Vec::new();
    }

    simplified
        .kept
        .iter()
        .map(|&i| {
            let (e, src, dst) = &gen_edges[i];
            let mut edges = tree.path_to(src).edges;
            edges.push(SignedEdge::forward(e.clone()));
            edges.extend(reverse_edges(&tree.path_to(dst).edges));
            EdgeLoop { base: root.clone(), edges }
        })
        .collect()
}

/// Component roots of a subcomplex: the lexicographically least vertex of
/// each connected piece.
fn components_of(c: &Complex, sub: &Subcomplex) -> Vec<VertexId> {
    let mut roots = Vec::new();
    let mut assigned: BTreeSet<VertexId> = BTreeSet::new();
    for v in &sub.vertices {
        if assigned.contains(v) {
            continue;
        }
        let tree = RootedTree::new(c, Some(sub), v);
        assigned.extend(tree.visited.iter().cloned());
        roots.push(v.clone());
    }
    roots
}

/// Canonical generating loops of the Spanier group π(𝒰, x): for each
/// connected component of each cover element, its essential generator
/// loops conjugated to the basepoint along spanning-tree paths.
pub fn spanier_loops(c: &Complex, u: &Cover) -> Result<Vec<EdgeLoop>> {
    u.check_covers(c)?;
    let global = RootedTree::new(c, None, c.basepoint());
    let mut out = Vec::new();
    for element in &u.elements {
        for root in components_of(c, element) {
            let connect = global.path_to(&root);
            for l in component_loops(c, element, &root) {
                let mut edges = connect.edges.clone();
                edges.extend(l.edges);
                edges.extend(reverse_edges(&connect.edges));
                out.push(EdgeLoop { base: c.basepoint().clone(), edges });
            }
        }
    }
    Ok(out)
}

/// A normal subgroup of π1 given by a normal generating set.
#[derive(Clone, Debug)]
pub struct NormalSubgroupData {
    pub pi1: Arc<Pi1Data>,
    pub generators: Vec<Word>,
    pub provenance: String,
}

impl NormalSubgroupData {
    pub fn new(pi1: Arc<Pi1Data>, generators: Vec<Word>, provenance: impl Into<String>) -> Self {
        let mut seen = BTreeSet::new();
        let generators = generators
            .into_iter()
            .filter(|w| !w.is_empty())
            .filter(|w| seen.insert(w.clone()))
            .collect();
        NormalSubgroupData { pi1, generators, provenance: provenance.into() }
    }

    pub fn trivial(pi1: Arc<Pi1Data>, provenance: impl Into<String>) -> Self {
        NormalSubgroupData { pi1, generators: Vec::new(), provenance: provenance.into() }
    }

    /// Abelian invariants of π1 / this subgroup.
    pub fn quotient_invariants(&self) -> crate::fpgroup::AbelianInvariants {
        let mut relators = self.pi1.presentation.relators.clone();
        relators.extend(self.generators.iter().cloned());
        crate::fpgroup::AbelianContext::new(self.pi1.presentation.rank(), &relators).invariants()
    }
}

pub(crate) fn loops_to_data(
    pi1: &Arc<Pi1Data>,
    loops: &[EdgeLoop],
    provenance: impl Into<String>,
) -> Result<NormalSubgroupData> {
    let mut words = Vec::new();
    for l in loops {
        words.push(pi1.word_of_loop(l)?);
    }
    Ok(NormalSubgroupData::new(pi1.clone(), words, provenance))
}

/// The Spanier group of a cover as normal-closure data over π1 of `c`.
pub fn spanier_generators(c: &Complex, u: &Cover) -> Result<NormalSubgroupData> {
    let pi1 = Arc::new(pi1(c)?);
    spanier_generators_with(&pi1, c, u)
}

pub(crate) fn spanier_generators_with(
    pi1: &Arc<Pi1Data>,
    c: &Complex,
    u: &Cover,
) -> Result<NormalSubgroupData> {
    let loops = spanier_loops(c, u)?;
    loops_to_data(pi1, &loops, format!("spanier({} elements)", u.len()))
}

/// Is ncl(`contained`) ≤ ncl(`container`) in π1? Three-valued: every
/// generator of the smaller side must be certified trivial in the quotient
/// by the larger side.
pub fn normal_contains(
    pi1: &Pi1Data,
    container: &[Word],
    contained: &[Word],
    budgets: Budgets,
) -> Verdict {
    if contained.is_empty() {
        return Verdict::Yes(Certificate::FreeReduction);
    }
    let mut ctx = NclContext::new(&pi1.presentation, container, budgets);
    Verdict::all(contained.iter().map(|w| ctx.verdict(w)))
}

/// Mutual containment of two normal subgroups, as a three-valued
/// conjunction.
pub fn normal_equal(pi1: &Pi1Data, a: &[Word], b: &[Word], budgets: Budgets) -> Verdict {
    Verdict::all([normal_contains(pi1, a, b, budgets), normal_contains(pi1, b, a, budgets)])
}

/// Does π(𝒱) ≤ π(𝒰) hold? (`u` is the candidate container.)
pub fn spanier_contains(c: &Complex, u: &Cover, v: &Cover, budgets: Budgets) -> Result<Verdict> {
    let pi1 = Arc::new(pi1(c)?);
    let du = spanier_generators_with(&pi1, c, u)?;
    let dv = spanier_generators_with(&pi1, c, v)?;
    Ok(normal_contains(&pi1, &du.generators, &dv.generators, budgets))
}

/// π(𝒰) = π(𝒱), three-valued.
pub fn spanier_equal(c: &Complex, u: &Cover, v: &Cover, budgets: Budgets) -> Result<Verdict> {
    let pi1 = Arc::new(pi1(c)?);
    let du = spanier_generators_with(&pi1, c, u)?;
    let dv = spanier_generators_with(&pi1, c, v)?;
    Ok(normal_equal(&pi1, &du.generators, &dv.generators, budgets))
}

/// A cover of the `level`-fold subdivision of a base complex, used as a
/// universe member for stability questions. Level 0 is the base itself.
#[derive(Clone, Debug)]
pub struct UniverseCover {
    pub level: usize,
    pub cover: Cover,
}

/// The standard refinement universe: star covers of the iterated
/// subdivisions up to `depth`.
pub fn subdivision_universe(c: &Complex, depth: usize) -> Vec<UniverseCover> {
    let tower = SubdivisionTower::new(c, depth);
    (0..=depth)
        .map(|level| UniverseCover { level, cover: star_cover(tower.complex(level)) })
        .collect()
}

/// Projects a subcomplex of a subdivision level down to the base complex
/// through carrier cells.
fn project_subcomplex(tower: &SubdivisionTower, level: usize, s: &Subcomplex) -> Subcomplex {
    let mut cells: Vec<Cell> = Vec::new();
    cells.extend(s.vertices.iter().cloned().map(Cell::Vertex));
    cells.extend(s.edges.iter().cloned().map(Cell::Edge));
    cells.extend(s.faces.iter().cloned().map(Cell::Face));
    let mut out = Subcomplex::empty();
    for mut cell in cells {
        for k in (1..=level).rev() {
            let step: &Subdivision = tower.step(k);
            cell = step.carrier(&cell).expect("carrier defined").clone();
        }
        match cell {
            Cell::Vertex(v) => {
                out.vertices.insert(v);
            }
            Cell::Edge(e) => {
                out.edges.insert(e);
            }
            Cell::Face(f) => {
                out.faces.insert(f);
            }
        }
    }
    out.close(tower.complex(0));
    out
}

/// π-stability of `u` against an explicit universe of candidate
/// refinements (each a cover of some subdivision level of `c`).
///
/// A certified-trivial Spanier group short-circuits to `Yes`: refinement
/// monotonicity means it cannot shrink further. Otherwise every refining
/// universe member is compared; a certified drop is `No`, and a clean sweep
/// is `Yes` only when the caller vouches that the universe is exhaustive,
/// else it is downgraded to `Unknown(IncompleteUniverse)`.
pub fn pi_stable(
    c: &Complex,
    u: &Cover,
    universe: &[UniverseCover],
    exhaustive: bool,
    budgets: Budgets,
) -> Result<Verdict> {
    let pi1 = Arc::new(pi1(c)?);
    let du = spanier_generators_with(&pi1, c, u)?;
    if du.generators.is_empty() {
        return Ok(Verdict::Yes(Certificate::FreeReduction));
    }
    let max_level = universe.iter().map(|m| m.level).max().unwrap_or(0);
    let tower = SubdivisionTower::new(c, max_level);
    let mut verdicts = Vec::new();
    for member in universe {
        member.cover.check_covers(tower.complex(member.level))?;
        // refinement across levels: every element, projected to the base
        // through carriers, must land inside some element of u
        let refines_u = member.cover.elements.iter().all(|s| {
            let projected = project_subcomplex(&tower, member.level, s);
            u.elements.iter().any(|t| projected.is_subset_of(t))
        });
        if !refines_u {
            continue;
        }
        let loops = spanier_loops(tower.complex(member.level), &member.cover)?;
        let mut words = Vec::new();
        for l in &loops {
            let base_loop = tower.push_loop_to_base(member.level, l)?;
            words.push(pi1.word_of_loop(&base_loop)?);
        }
        verdicts.push(normal_equal(&pi1, &du.generators, &words, budgets));
    }
    let combined = Verdict::all(verdicts);
    Ok(match combined {
        Verdict::Yes(cert) if exhaustive => Verdict::Yes(cert),
        Verdict::Yes(_) => Verdict::Unknown(crate::fpgroup::Blocker::IncompleteUniverse),
        other => other,
    })
}

/// Result of approximating π^sp by star covers of iterated subdivisions.
#[derive(Clone, Debug)]
pub struct SpApproximation {
    /// The deepest level's Spanier group, translated to the base complex.
    pub data: NormalSubgroupData,
    /// Whether the last two levels agree (three-valued Yes).
    pub stabilized: bool,
    pub depth: usize,
    /// Translated generator words per level 0..=depth.
    pub level_generators: Vec<Vec<Word>>,
    pub tower: SubdivisionTower,
}

impl SpApproximation {
    /// The witness cover: the star cover of the deepest subdivision level.
    pub fn witness_cover(&self) -> Cover {
        star_cover(self.tower.complex(self.depth))
    }
}

/// Computes π(star cover of subdivide^k(c)) for k = 0..=depth, translated
/// to the base complex; the approximation to π^sp is the deepest value, and
/// `stabilized` records whether the last two levels agree.
pub fn spanier_sp_approx(c: &Complex, depth: usize, budgets: Budgets) -> Result<SpApproximation> {
    let pi1 = Arc::new(pi1(c)?);
    let tower = SubdivisionTower::new(c, depth);
    let mut level_generators: Vec<Vec<Word>> = Vec::new();
    for k in 0..=depth {
        let level_complex = tower.complex(k);
        let cover = star_cover(level_complex);
        let loops = spanier_loops(level_complex, &cover)?;
        let mut words = Vec::new();
        let mut seen = BTreeSet::new();
        for l in &loops {
            let base_loop = tower.push_loop_to_base(k, l)?;
            let w = pi1.word_of_loop(&base_loop)?;
            if !w.is_empty() && seen.insert(w.clone()) {
                words.push(w);
            }
        }
        level_generators.push(words);
    }
    let stabilized = depth >= 1
        && normal_equal(&pi1, &level_generators[depth - 1], &level_generators[depth], budgets)
            .is_yes();
    let data = NormalSubgroupData::new(
        pi1,
        level_generators[depth].clone(),
        format!("star cover at subdivision depth {depth}"),
    );
    Ok(SpApproximation { data, stabilized, depth, level_generators, tower })
}

/// Transports normal subgroup data along a path to a new basepoint: the
/// presentation is rebuilt at the path's endpoint and every normal
/// generator is conjugated through the path.
pub fn change_basepoint(d: &NormalSubgroupData, path: &EdgePath) -> Result<NormalSubgroupData> {
    let c = d.pi1.complex();
    if path.start != *d.pi1.basepoint() {
        return Err(Error::PathEndpoints {
            expected: d.pi1.basepoint().0.clone(),
            found: path.start.0.clone(),
        });
    }
    let new_base = path.end(c)?;
    let mut moved = c.clone();
    moved.set_basepoint(new_base.clone());
    let new_pi1 = Arc::new(pi1(&moved)?);
    let back = path.reversed(c)?;
    let mut generators = Vec::new();
    for w in &d.generators {
        let l = d.pi1.loop_of_word(w);
        let mut edges = back.edges.clone();
        edges.extend(l.edges);
        edges.extend(path.edges.clone());
        let rebased = EdgeLoop { base: new_base.clone(), edges };
        generators.push(new_pi1.word_of_loop(&rebased)?);
    }
    Ok(NormalSubgroupData::new(
        new_pi1,
        generators,
        format!("{} rebased at {new_base}", d.provenance),
    ))
}
