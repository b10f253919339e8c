//! Finite combinatorial 2-complexes, subcomplexes, covers, subdivision and
//! one-point unions.
//!
//! A complex has named vertices, directed edges (each carrying a formal
//! inverse) and polygonal faces given by cyclic boundary words of signed
//! edges. "Open covers" are modelled by families of incidence-closed
//! subcomplexes; the Spanier-group machinery only consumes fundamental
//! groups of elements and containment between elements, both of which
//! survive this closed translation.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl core::fmt::Display for $name {
            fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl core::fmt::Debug for $name {
            fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
                write!(f, "{}({})", stringify!($name), self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

id_type!(
    /// Opaque vertex identifier.
    VertexId
);
id_type!(
    /// Opaque edge identifier; the formal inverse shares the id.
    EdgeId
);
id_type!(
    /// Opaque face identifier.
    FaceId
);

/// A cell of any dimension, used by carrier maps and factor tagging.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Cell {
    Vertex(VertexId),
    Edge(EdgeId),
    Face(FaceId),
}

impl core::fmt::Display for Cell {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Cell::Vertex(v) => write!(f, "vertex {v}"),
            Cell::Edge(e) => write!(f, "edge {e}"),
            Cell::Face(x) => write!(f, "face {x}"),
        }
    }
}

/// A directed traversal of an edge: the edge itself or its formal inverse.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SignedEdge {
    pub edge: EdgeId,
    pub inverted: bool,
}

impl SignedEdge {
    pub fn forward(edge: impl Into<EdgeId>) -> Self {
        SignedEdge { edge: edge.into(), inverted: false }
    }

    pub fn backward(edge: impl Into<EdgeId>) -> Self {
        SignedEdge { edge: edge.into(), inverted: true }
    }

    pub fn inverse(&self) -> Self {
        SignedEdge { edge: self.edge.clone(), inverted: !self.inverted }
    }
}

impl core::fmt::Display for SignedEdge {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.inverted {
            write!(f, "{}^-1", self.edge)
        } else {
            write!(f, "{}", self.edge)
        }
    }
}

/// A finite combinatorial 2-complex with a basepoint.
#[derive(Clone, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Complex {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, (VertexId, VertexId)>,
    faces: BTreeMap<FaceId, Vec<SignedEdge>>,
    basepoint: VertexId,
}

impl Complex {
    /// Creates a complex containing only the basepoint vertex.
    pub fn new(basepoint: impl Into<VertexId>) -> Self {
        let basepoint = basepoint.into();
        let mut vertices = BTreeSet::new();
        vertices.insert(basepoint.clone());
        Complex { vertices, edges: BTreeMap::new(), faces: BTreeMap::new(), basepoint }
    }

    pub fn add_vertex(&mut self, id: impl Into<VertexId>) {
        self.vertices.insert(id.into());
    }

    pub fn add_edge(&mut self, id: impl Into<EdgeId>, src: impl Into<VertexId>, dst: impl Into<VertexId>) {
        self.edges.insert(id.into(), (src.into(), dst.into()));
    }

    pub fn add_face(&mut self, id: impl Into<FaceId>, boundary: Vec<SignedEdge>) {
        self.faces.insert(id.into(), boundary);
    }

    pub fn basepoint(&self) -> &VertexId {
        &self.basepoint
    }

    pub fn set_basepoint(&mut self, v: impl Into<VertexId>) {
        self.basepoint = v.into();
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&EdgeId, &(VertexId, VertexId))> {
        self.edges.iter()
    }

    pub fn faces(&self) -> impl Iterator<Item = (&FaceId, &Vec<SignedEdge>)> {
        self.faces.iter()
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn endpoints(&self, e: &EdgeId) -> Option<&(VertexId, VertexId)> {
        self.edges.get(e)
    }

    pub fn boundary(&self, f: &FaceId) -> Option<&Vec<SignedEdge>> {
        self.faces.get(f)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn cell_count(&self) -> usize {
        self.vertices.len() + self.edges.len() + self.faces.len()
    }

    /// Source and target of a signed edge.
    pub fn signed_endpoints(&self, s: &SignedEdge) -> Option<(VertexId, VertexId)> {
        let (src, dst) = self.edges.get(&s.edge)?;
        if s.inverted {
            Some((dst.clone(), src.clone()))
        } else {
            Some((src.clone(), dst.clone()))
        }
    }

    /// Checks every structural invariant: declared incidences, closed face
    /// boundaries, a connected 1-skeleton and a declared basepoint.
    pub fn validate(&self) -> Result<()> {
        for (e, (src, dst)) in &self.edges {
            for v in [src, dst] {
                if !self.vertices.contains(v) {
                    return Err(Error::Dangling { cell: format!("edge {e}"), missing: v.0.clone() });
                }
            }
        }
        for (f, boundary) in &self.faces {
            if boundary.is_empty() {
                return Err(Error::OpenBoundary { face: f.0.clone() });
            }
            for s in boundary {
                if !self.edges.contains_key(&s.edge) {
                    return Err(Error::Dangling { cell: format!("face {f}"), missing: s.edge.0.clone() });
                }
            }
            for i in 0..boundary.len() {
                let (_, dst) = self.signed_endpoints(&boundary[i]).expect("edge checked above");
                let next = &boundary[(i + 1) % boundary.len()];
                let (src, _) = self.signed_endpoints(next).expect("edge checked above");
                if dst != src {
                    return Err(Error::OpenBoundary { face: f.0.clone() });
                }
            }
        }
        if !self.vertices.contains(&self.basepoint) {
            return Err(Error::Dangling {
                cell: "basepoint".to_owned(),
                missing: self.basepoint.0.clone(),
            });
        }
        if self.reachable_from(&self.basepoint).len() != self.vertices.len() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    fn reachable_from(&self, start: &VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::new();
        if !self.vertices.contains(start) {
            return seen;
        }
        seen.insert(start.clone());
        let mut queue = VecDeque::new();
        queue.push_back(start.clone());
        let adjacency = self.adjacency();
        while let Some(v) = queue.pop_front() {
            if let Some(nb) = adjacency.get(&v) {
                for (_, w) in nb {
                    if seen.insert(w.clone()) {
                        queue.push_back(w.clone());
                    }
                }
            }
        }
        seen
    }

    /// Undirected adjacency of the 1-skeleton, neighbours listed in
    /// lexicographic edge order.
    pub(crate) fn adjacency(&self) -> BTreeMap<VertexId, Vec<(SignedEdge, VertexId)>> {
        let mut adj: BTreeMap<VertexId, Vec<(SignedEdge, VertexId)>> = BTreeMap::new();
        for v in &self.vertices {
            adj.insert(v.clone(), Vec::new());
        }
        for (e, (src, dst)) in &self.edges {
            adj.get_mut(src)
                .expect("validated")
                .push((SignedEdge::forward(e.clone()), dst.clone()));
            adj.get_mut(dst)
                .expect("validated")
                .push((SignedEdge::backward(e.clone()), src.clone()));
        }
        for nb in adj.values_mut() {
            nb.sort();
        }
        adj
    }

    /// Vertices visited by a face boundary, in traversal order (sources of
    /// the boundary's signed edges).
    pub fn boundary_vertices(&self, f: &FaceId) -> Option<Vec<VertexId>> {
        let boundary = self.faces.get(f)?;
        boundary.iter().map(|s| self.signed_endpoints(s).map(|(src, _)| src)).collect()
    }
}

/// An open path in the 1-skeleton.
#[derive(Clone, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EdgePath {
    pub start: VertexId,
    pub edges: Vec<SignedEdge>,
}

impl EdgePath {
    pub fn empty(start: impl Into<VertexId>) -> Self {
        EdgePath { start: start.into(), edges: Vec::new() }
    }

    /// Validates combinatorial continuity and returns the final vertex.
    pub fn end(&self, c: &Complex) -> Result<VertexId> {
        let mut at = self.start.clone();
        if !c.has_vertex(&at) {
            return Err(Error::Dangling { cell: "path".to_owned(), missing: at.0 });
        }
        for s in &self.edges {
            let (src, dst) = c
                .signed_endpoints(s)
                .ok_or_else(|| Error::Dangling { cell: "path".to_owned(), missing: s.edge.0.clone() })?;
            if src != at {
                return Err(Error::PathEndpoints { expected: at.0.clone(), found: src.0 });
            }
            at = dst;
        }
        Ok(at)
    }

    pub fn reversed(&self, c: &Complex) -> Result<EdgePath> {
        let end = self.end(c)?;
        Ok(EdgePath { start: end, edges: self.edges.iter().rev().map(SignedEdge::inverse).collect() })
    }
}

/// A closed edge path at a base vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EdgeLoop {
    pub base: VertexId,
    pub edges: Vec<SignedEdge>,
}

impl EdgeLoop {
    pub fn new(base: impl Into<VertexId>, edges: Vec<SignedEdge>) -> Self {
        EdgeLoop { base: base.into(), edges }
    }

    pub fn as_path(&self) -> EdgePath {
        EdgePath { start: self.base.clone(), edges: self.edges.clone() }
    }

    /// Validates continuity and closedness.
    pub fn validate(&self, c: &Complex) -> Result<()> {
        let end = self.as_path().end(c)?;
        if end != self.base {
            return Err(Error::PathEndpoints { expected: self.base.0.clone(), found: end.0 });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// A subset of the cells of a parent complex, kept incidence-closed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Subcomplex {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
    pub faces: BTreeSet<FaceId>,
}

impl Subcomplex {
    pub fn empty() -> Self {
        Subcomplex::default()
    }

    /// The whole parent complex as a subcomplex.
    pub fn whole(c: &Complex) -> Self {
        Subcomplex {
            vertices: c.vertices().cloned().collect(),
            edges: c.edges().map(|(e, _)| e.clone()).collect(),
            faces: c.faces().map(|(f, _)| f.clone()).collect(),
        }
    }

    /// Incidence closure of a single cell.
    pub fn closure_of(c: &Complex, cell: &Cell) -> Self {
        let mut s = Subcomplex::empty();
        match cell {
            Cell::Vertex(v) => {
                s.vertices.insert(v.clone());
            }
            Cell::Edge(e) => {
                s.edges.insert(e.clone());
            }
            Cell::Face(f) => {
                s.faces.insert(f.clone());
            }
        }
        s.close(c);
        s
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty() && self.faces.is_empty()
    }

    pub fn cell_count(&self) -> usize {
        self.vertices.len() + self.edges.len() + self.faces.len()
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    /// Adds boundary edges of contained faces and endpoints of contained
    /// edges until the set is incidence-closed.
    pub fn close(&mut self, c: &Complex) {
        for f in self.faces.clone() {
            if let Some(boundary) = c.boundary(&f) {
                for s in boundary {
                    self.edges.insert(s.edge.clone());
                }
            }
        }
        for e in self.edges.clone() {
            if let Some((src, dst)) = c.endpoints(&e) {
                self.vertices.insert(src.clone());
                self.vertices.insert(dst.clone());
            }
        }
    }

    pub fn is_closed(&self, c: &Complex) -> bool {
        let mut copy = self.clone();
        copy.close(c);
        copy == *self
    }

    pub fn union(&self, other: &Subcomplex) -> Subcomplex {
        Subcomplex {
            vertices: self.vertices.union(&other.vertices).cloned().collect(),
            edges: self.edges.union(&other.edges).cloned().collect(),
            faces: self.faces.union(&other.faces).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &Subcomplex) -> Subcomplex {
        Subcomplex {
            vertices: self.vertices.intersection(&other.vertices).cloned().collect(),
            edges: self.edges.intersection(&other.edges).cloned().collect(),
            faces: self.faces.intersection(&other.faces).cloned().collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Subcomplex) -> bool {
        self.vertices.is_subset(&other.vertices)
            && self.edges.is_subset(&other.edges)
            && self.faces.is_subset(&other.faces)
    }

    /// Extracts the subcomplex as a standalone complex rooted at `basepoint`.
    pub fn extract(&self, c: &Complex, basepoint: &VertexId) -> Result<Complex> {
        if !self.vertices.contains(basepoint) {
            return Err(Error::LoopOutside { cell: basepoint.0.clone() });
        }
        let mut out = Complex::new(basepoint.clone());
        for v in &self.vertices {
            out.add_vertex(v.clone());
        }
        for e in &self.edges {
            let (src, dst) = c
                .endpoints(e)
                .ok_or_else(|| Error::Dangling { cell: "subcomplex".to_owned(), missing: e.0.clone() })?;
            out.add_edge(e.clone(), src.clone(), dst.clone());
        }
        for f in &self.faces {
            let boundary = c
                .boundary(f)
                .ok_or_else(|| Error::Dangling { cell: "subcomplex".to_owned(), missing: f.0.clone() })?;
            out.add_face(f.clone(), boundary.clone());
        }
        Ok(out)
    }
}

/// An ordered family of subcomplexes covering the parent complex.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cover {
    pub elements: Vec<Subcomplex>,
}

impl Cover {
    pub fn new(elements: Vec<Subcomplex>) -> Self {
        Cover { elements }
    }

    pub fn whole(c: &Complex) -> Self {
        Cover { elements: alloc::vec![Subcomplex::whole(c)] }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Verifies the covering property: every cell of `c` lies in a member.
    pub fn check_covers(&self, c: &Complex) -> Result<()> {
        for v in c.vertices() {
            if !self.elements.iter().any(|s| s.vertices.contains(v)) {
                return Err(Error::NotCover { missing: format!("vertex {v}") });
            }
        }
        for (e, _) in c.edges() {
            if !self.elements.iter().any(|s| s.edges.contains(e)) {
                return Err(Error::NotCover { missing: format!("edge {e}") });
            }
        }
        for (f, _) in c.faces() {
            if !self.elements.iter().any(|s| s.faces.contains(f)) {
                return Err(Error::NotCover { missing: format!("face {f}") });
            }
        }
        Ok(())
    }
}

/// Splits a subcomplex into its connected components (isolated vertices
/// form singleton components; faces follow their boundary vertices).
pub fn subcomplex_components(c: &Complex, s: &Subcomplex) -> Vec<Subcomplex> {
    let adjacency = c.adjacency();
    let mut remaining: BTreeSet<VertexId> = s.vertices.clone();
    let mut out = Vec::new();
    while let Some(start) = remaining.iter().next().cloned() {
        let mut vertices = BTreeSet::new();
        vertices.insert(start.clone());
        remaining.remove(&start);
        let mut queue = VecDeque::new();
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            if let Some(nb) = adjacency.get(&v) {
                for (se, w) in nb {
                    if !s.edges.contains(&se.edge) {
                        continue;
                    }
                    if remaining.remove(w) {
                        vertices.insert(w.clone());
                        queue.push_back(w.clone());
                    }
                }
            }
        }
        let edges: BTreeSet<EdgeId> = s
            .edges
            .iter()
            .filter(|e| {
                let (src, _) = c.endpoints(e).expect("subcomplex edge");
                vertices.contains(src)
            })
            .cloned()
            .collect();
        let faces: BTreeSet<FaceId> = s
            .faces
            .iter()
            .filter(|f| {
                let visits = c.boundary_vertices(f).expect("subcomplex face");
                vertices.contains(&visits[0])
            })
            .cloned()
            .collect();
        out.push(Subcomplex { vertices, edges, faces });
    }
    out
}

/// The closed-star cover: one element per vertex, the incidence closure of
/// all cells containing that vertex.
pub fn star_cover(c: &Complex) -> Cover {
    let mut elements = Vec::new();
    for v in c.vertices() {
        let mut s = Subcomplex::empty();
        s.vertices.insert(v.clone());
        for (e, (src, dst)) in c.edges() {
            if src == v || dst == v {
                s.edges.insert(e.clone());
            }
        }
        for (f, _) in c.faces() {
            let visits = c.boundary_vertices(f).expect("face edges declared");
            if visits.iter().any(|u| u == v) {
                s.faces.insert(f.clone());
            }
        }
        s.close(c);
        elements.push(s);
    }
    Cover { elements }
}

/// The cover by closures of individual cells, coarsest cells first.
///
/// Elements contained in another element are dropped, so on a complex with
/// at least one edge the isolated vertex closures disappear.
pub fn cell_closure_cover(c: &Complex) -> Cover {
    let mut elements: Vec<Subcomplex> = Vec::new();
    for (f, _) in c.faces() {
        elements.push(Subcomplex::closure_of(c, &Cell::Face(f.clone())));
    }
    for (e, _) in c.edges() {
        elements.push(Subcomplex::closure_of(c, &Cell::Edge(e.clone())));
    }
    for v in c.vertices() {
        elements.push(Subcomplex::closure_of(c, &Cell::Vertex(v.clone())));
    }
    let mut kept: Vec<Subcomplex> = Vec::new();
    for s in elements {
        if kept.iter().any(|t| s.is_subset_of(t)) {
            continue;
        }
        kept.retain(|t| !t.is_subset_of(&s));
        kept.push(s);
    }
    Cover { elements: kept }
}

/// All pairwise intersections of two covers of the same complex, with empty
/// elements dropped and exact duplicates merged. The result refines both
/// inputs.
pub fn intersect_covers(c: &Complex, u: &Cover, v: &Cover) -> Result<Cover> {
    let mut elements: Vec<Subcomplex> = Vec::new();
    for a in &u.elements {
        for b in &v.elements {
            let s = a.intersection(b);
            if s.is_empty() || elements.contains(&s) {
                continue;
            }
            elements.push(s);
        }
    }
    let out = Cover { elements };
    out.check_covers(c)?;
    Ok(out)
}

/// True iff every element of `v` is cell-wise contained in some element of
/// `u`.
pub fn refines(v: &Cover, u: &Cover) -> bool {
    v.elements.iter().all(|s| u.elements.iter().any(|t| s.is_subset_of(t)))
}

/// A combinatorial map of complexes at the level of edge paths: vertices map
/// to vertices and each edge maps to an edge path between the images of its
/// endpoints. Face boundaries are required (by the constructors in this
/// crate) to map to nullhomotopic loops, so pushing loops forward respects
/// homotopy.
#[derive(Clone, Debug, Default)]
pub struct PathMap {
    pub vertices: BTreeMap<VertexId, VertexId>,
    pub edges: BTreeMap<EdgeId, Vec<SignedEdge>>,
}

impl PathMap {
    pub fn vertex_image(&self, v: &VertexId) -> Option<&VertexId> {
        self.vertices.get(v)
    }

    fn signed_image(&self, s: &SignedEdge) -> Option<Vec<SignedEdge>> {
        let image = self.edges.get(&s.edge)?;
        if s.inverted {
            Some(image.iter().rev().map(SignedEdge::inverse).collect())
        } else {
            Some(image.clone())
        }
    }

    pub fn push_path(&self, p: &EdgePath) -> Result<EdgePath> {
        let start = self
            .vertices
            .get(&p.start)
            .ok_or_else(|| Error::Dangling { cell: "path map".to_owned(), missing: p.start.0.clone() })?
            .clone();
        let mut edges = Vec::new();
        for s in &p.edges {
            let mut image = self.signed_image(s).ok_or_else(|| Error::Dangling {
                cell: "path map".to_owned(),
                missing: s.edge.0.clone(),
            })?;
            edges.append(&mut image);
        }
        Ok(EdgePath { start, edges })
    }

    pub fn push_loop(&self, l: &EdgeLoop) -> Result<EdgeLoop> {
        let path = self.push_path(&l.as_path())?;
        Ok(EdgeLoop { base: path.start, edges: path.edges })
    }
}

/// Result of barycentric-style subdivision: the refined complex, the carrier
/// of each new cell in the original, and the collapse map used to translate
/// loops of the subdivision back to the base.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: Complex,
    carrier: BTreeMap<Cell, Cell>,
    map: PathMap,
    midpoints: BTreeMap<EdgeId, VertexId>,
    halves: BTreeMap<EdgeId, (EdgeId, EdgeId)>,
    centres: BTreeMap<FaceId, VertexId>,
    radials: BTreeMap<FaceId, Vec<EdgeId>>,
    triangles: BTreeMap<FaceId, Vec<FaceId>>,
}

impl Subdivision {
    pub fn carrier(&self, cell: &Cell) -> Option<&Cell> {
        self.carrier.get(cell)
    }

    /// Translates a loop of the subdivided complex to a homotopic loop of
    /// the base.
    pub fn push_loop(&self, l: &EdgeLoop) -> Result<EdgeLoop> {
        self.map.push_loop(l)
    }

    pub fn push_path(&self, p: &EdgePath) -> Result<EdgePath> {
        self.map.push_path(p)
    }

    pub fn midpoint(&self, e: &EdgeId) -> &VertexId {
        &self.midpoints[e]
    }

    pub fn halves(&self, e: &EdgeId) -> &(EdgeId, EdgeId) {
        &self.halves[e]
    }

    pub fn centre(&self, f: &FaceId) -> &VertexId {
        &self.centres[f]
    }

    pub fn radials(&self, f: &FaceId) -> &[EdgeId] {
        &self.radials[f]
    }

    pub fn triangles(&self, f: &FaceId) -> &[FaceId] {
        &self.triangles[f]
    }
}

fn fresh(base: String, used: &BTreeSet<String>) -> String {
    let mut id = base;
    while used.contains(&id) {
        id.push('\'');
    }
    id
}

/// Splits each edge at a midpoint and cones each face from a fresh centre
/// onto its subdivided boundary. Every new cell records the original cell
/// carrying it.
pub fn subdivide(c: &Complex) -> Subdivision {
    let mut used: BTreeSet<String> = c.vertices().map(|v| v.0.clone()).collect();
    let mut out = Complex::new(c.basepoint().clone());
    let mut carrier = BTreeMap::new();
    let mut map = PathMap::default();
    let mut centres = BTreeMap::new();
    let mut all_radials = BTreeMap::new();
    let mut all_triangles = BTreeMap::new();

    for v in c.vertices() {
        out.add_vertex(v.clone());
        carrier.insert(Cell::Vertex(v.clone()), Cell::Vertex(v.clone()));
        map.vertices.insert(v.clone(), v.clone());
    }

    // midpoints and edge halves
    let mut midpoint: BTreeMap<EdgeId, VertexId> = BTreeMap::new();
    let mut halves: BTreeMap<EdgeId, (EdgeId, EdgeId)> = BTreeMap::new();
    for (e, (src, dst)) in c.edges() {
        let m = VertexId(fresh(format!("{e}.mid"), &used));
        used.insert(m.0.clone());
        out.add_vertex(m.clone());
        carrier.insert(Cell::Vertex(m.clone()), Cell::Edge(e.clone()));
        map.vertices.insert(m.clone(), src.clone());

        let e0 = EdgeId(format!("{e}.0"));
        let e1 = EdgeId(format!("{e}.1"));
        out.add_edge(e0.clone(), src.clone(), m.clone());
        out.add_edge(e1.clone(), m.clone(), dst.clone());
        carrier.insert(Cell::Edge(e0.clone()), Cell::Edge(e.clone()));
        carrier.insert(Cell::Edge(e1.clone()), Cell::Edge(e.clone()));
        map.edges.insert(e0.clone(), Vec::new());
        map.edges.insert(e1.clone(), alloc::vec![SignedEdge::forward(e.clone())]);
        midpoint.insert(e.clone(), m);
        halves.insert(e.clone(), (e0, e1));
    }

    for (f, boundary) in c.faces() {
        let visits = c.boundary_vertices(f).expect("valid complex");
        let centre = VertexId(fresh(format!("{f}.ctr"), &used));
        used.insert(centre.0.clone());
        out.add_vertex(centre.clone());
        carrier.insert(Cell::Vertex(centre.clone()), Cell::Face(f.clone()));
        map.vertices.insert(centre.clone(), visits[0].clone());
        centres.insert(f.clone(), centre.clone());

        let n = boundary.len();
        // position 2j is the j-th boundary vertex, position 2j+1 the
        // midpoint of the j-th boundary edge
        let position_vertex = |i: usize| -> VertexId {
            if i % 2 == 0 {
                visits[i / 2].clone()
            } else {
                midpoint[&boundary[i / 2].edge].clone()
            }
        };
        // half-edge from position i to position i+1
        let half_step = |i: usize| -> SignedEdge {
            let s = &boundary[i / 2];
            let (e0, e1) = &halves[&s.edge];
            match (i % 2 == 0, s.inverted) {
                (true, false) => SignedEdge::forward(e0.clone()),
                (true, true) => SignedEdge::backward(e1.clone()),
                (false, false) => SignedEdge::forward(e1.clone()),
                (false, true) => SignedEdge::backward(e0.clone()),
            }
        };
        // image in the base of the half-step at position i
        let half_image = |i: usize| -> Vec<SignedEdge> {
            let s = &boundary[i / 2];
            match (i % 2 == 0, s.inverted) {
                (true, false) | (false, true) => Vec::new(),
                (true, true) => alloc::vec![SignedEdge::backward(s.edge.clone())],
                (false, false) => alloc::vec![SignedEdge::forward(s.edge.clone())],
            }
        };

        let mut radials: Vec<EdgeId> = Vec::new();
        let mut prefix: Vec<SignedEdge> = Vec::new();
        for i in 0..2 * n {
            let r = EdgeId(format!("{f}.r{i}"));
            out.add_edge(r.clone(), centre.clone(), position_vertex(i));
            carrier.insert(Cell::Edge(r.clone()), Cell::Face(f.clone()));
            map.edges.insert(r.clone(), prefix.clone());
            radials.push(r);
            prefix.extend(half_image(i));
        }
        let mut triangles = Vec::new();
        for i in 0..2 * n {
            let t = FaceId(format!("{f}.t{i}"));
            let boundary = alloc::vec![
                SignedEdge::forward(radials[i].clone()),
                half_step(i),
                SignedEdge::backward(radials[(i + 1) % (2 * n)].clone()),
            ];
            out.add_face(t.clone(), boundary);
            carrier.insert(Cell::Face(t.clone()), Cell::Face(f.clone()));
            triangles.push(t);
        }
        all_radials.insert(f.clone(), radials);
        all_triangles.insert(f.clone(), triangles);
    }

    debug_assert!(out.validate().is_ok());
    Subdivision {
        complex: out,
        carrier,
        map,
        midpoints: midpoint,
        halves,
        centres,
        radials: all_radials,
        triangles: all_triangles,
    }
}

/// An iterated subdivision chain rooted at a base complex, with loop
/// translation from any level back to the base.
#[derive(Clone, Debug)]
pub struct SubdivisionTower {
    base: Complex,
    steps: Vec<Subdivision>,
}

impl SubdivisionTower {
    pub fn new(base: &Complex, depth: usize) -> Self {
        let mut steps = Vec::new();
        let mut current = base.clone();
        for _ in 0..depth {
            let step = subdivide(&current);
            current = step.complex.clone();
            steps.push(step);
        }
        SubdivisionTower { base: base.clone(), steps }
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// The complex at subdivision level `k` (level 0 is the base).
    pub fn complex(&self, k: usize) -> &Complex {
        if k == 0 {
            &self.base
        } else {
            &self.steps[k - 1].complex
        }
    }

    /// The subdivision step from level `k - 1` up to level `k`.
    pub fn step(&self, k: usize) -> &Subdivision {
        &self.steps[k - 1]
    }

    /// Translates a loop living at level `k` down to the base complex.
    pub fn push_loop_to_base(&self, k: usize, l: &EdgeLoop) -> Result<EdgeLoop> {
        let mut l = l.clone();
        for step in self.steps[..k].iter().rev() {
            l = step.push_loop(&l)?;
        }
        Ok(l)
    }
}

/// One-point union: disjoint copies with the two basepoints identified.
///
/// Cells of the factors are prefixed with `1:` and `2:`; the identified
/// basepoint is the fresh vertex `*`, which is the only untagged cell.
pub fn wedge(c1: &Complex, c2: &Complex) -> Complex {
    let mut out = Complex::new("*");
    for (tag, c) in [("1", c1), ("2", c2)] {
        let embed_v = |v: &VertexId| -> VertexId {
            if v == c.basepoint() {
                VertexId::from("*")
            } else {
                VertexId(format!("{tag}:{v}"))
            }
        };
        for v in c.vertices() {
            out.add_vertex(embed_v(v));
        }
        for (e, (src, dst)) in c.edges() {
            out.add_edge(EdgeId(format!("{tag}:{e}")), embed_v(src), embed_v(dst));
        }
        for (f, boundary) in c.faces() {
            let moved = boundary
                .iter()
                .map(|s| SignedEdge { edge: EdgeId(format!("{tag}:{}", s.edge)), inverted: s.inverted })
                .collect();
            out.add_face(FaceId(format!("{tag}:{f}")), moved);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn circle_is_valid() {
        shapes::circle().validate().unwrap();
    }

    #[test]
    fn disc_is_valid() {
        shapes::disc().validate().unwrap();
    }

    #[test]
    fn dangling_edge_is_rejected() {
        let mut c = Complex::new("v");
        c.add_edge("a", "v", "ghost");
        assert!(matches!(c.validate(), Err(Error::Dangling { .. })));
    }

    #[test]
    fn open_face_boundary_is_rejected() {
        let mut c = Complex::new("v");
        c.add_vertex("w");
        c.add_edge("a", "v", "w");
        c.add_face("f", alloc::vec![SignedEdge::forward("a")]);
        assert!(matches!(c.validate(), Err(Error::OpenBoundary { .. })));
    }

    #[test]
    fn disconnected_skeleton_is_rejected() {
        let mut c = Complex::new("v");
        c.add_vertex("w");
        assert_eq!(c.validate(), Err(Error::Disconnected));
    }

    #[test]
    fn subdividing_circle_bisects_the_loop() {
        let s = subdivide(&shapes::circle());
        assert_eq!(s.complex.vertex_count(), 2);
        assert_eq!(s.complex.edge_count(), 2);
        assert_eq!(s.complex.face_count(), 0);
        s.complex.validate().unwrap();
    }

    #[test]
    fn subdividing_disc_cones_the_face() {
        // one original vertex, the loop midpoint and the face centre; the
        // two halves of the loop plus two radial edges; two triangles
        let s = subdivide(&shapes::disc());
        assert_eq!(s.complex.vertex_count(), 3);
        assert_eq!(s.complex.edge_count(), 4);
        assert_eq!(s.complex.face_count(), 2);
        s.complex.validate().unwrap();
    }

    #[test]
    fn subdividing_wedge_bisects_both_loops() {
        let s = subdivide(&shapes::wedge_two_circles());
        assert_eq!(s.complex.vertex_count(), 3);
        assert_eq!(s.complex.edge_count(), 4);
        assert_eq!(s.complex.face_count(), 0);
    }

    #[test]
    fn subdivision_keeps_basepoint_and_connectivity() {
        for c in [shapes::circle(), shapes::disc(), shapes::theta(), shapes::cyclic(3)] {
            let s = subdivide(&c);
            assert_eq!(s.complex.basepoint(), c.basepoint());
            s.complex.validate().unwrap();
            assert_eq!(
                s.carrier(&Cell::Vertex(c.basepoint().clone())),
                Some(&Cell::Vertex(c.basepoint().clone()))
            );
        }
    }

    #[test]
    fn star_cover_of_circle_is_the_whole_complex() {
        let c = shapes::circle();
        let u = star_cover(&c);
        assert_eq!(u.len(), 1);
        assert_eq!(u.elements[0], Subcomplex::whole(&c));
        u.check_covers(&c).unwrap();
    }

    #[test]
    fn star_cover_of_once_subdivided_circle_is_still_coarse() {
        // both vertices of the bisected circle touch both edges, so each
        // closed star is the whole complex
        let c = subdivide(&shapes::circle()).complex;
        let u = star_cover(&c);
        assert_eq!(u.len(), 2);
        for s in &u.elements {
            assert_eq!(*s, Subcomplex::whole(&c));
        }
    }

    #[test]
    fn star_cover_of_twice_subdivided_circle_is_four_arcs() {
        let c = subdivide(&subdivide(&shapes::circle()).complex).complex;
        let u = star_cover(&c);
        assert_eq!(u.len(), 4);
        for s in &u.elements {
            assert_eq!(s.edges.len(), 2);
            assert_eq!(s.vertices.len(), 3);
            assert!(s.faces.is_empty());
        }
        u.check_covers(&c).unwrap();
    }

    #[test]
    fn star_cover_of_theta_has_two_full_elements() {
        let c = shapes::theta();
        let u = star_cover(&c);
        assert_eq!(u.len(), 2);
        for s in &u.elements {
            assert_eq!(s.edges.len(), 3);
        }
    }

    #[test]
    fn star_cover_always_covers() {
        for c in [shapes::circle(), shapes::disc(), shapes::theta(), shapes::cyclic(3)] {
            star_cover(&c).check_covers(&c).unwrap();
            let s = subdivide(&c).complex;
            star_cover(&s).check_covers(&s).unwrap();
        }
    }

    #[test]
    fn intersecting_with_whole_gives_the_other_cover() {
        let c = subdivide(&subdivide(&shapes::circle()).complex).complex;
        let v = star_cover(&c);
        let u = Cover::whole(&c);
        let w = intersect_covers(&c, &u, &v).unwrap();
        assert_eq!(w.elements.len(), v.elements.len());
        for s in &v.elements {
            assert!(w.elements.contains(s));
        }
    }

    #[test]
    fn intersecting_identical_covers_is_idempotent() {
        let c = subdivide(&subdivide(&shapes::circle()).complex).complex;
        let u = star_cover(&c);
        let w = intersect_covers(&c, &u, &u).unwrap();
        assert!(refines(&w, &u) && refines(&u, &w));
    }

    #[test]
    fn intersection_of_rotated_arc_covers() {
        // Arc covers of the twice subdivided circle, one rotated against
        // the other. Hand expansion of the pairwise intersections gives the
        // two arcs themselves, the four single-edge closures and one
        // two-vertex piece; dropping duplicates leaves 7 elements.
        let c = subdivide(&subdivide(&shapes::circle()).complex).complex;
        let u = star_cover(&c);
        let halves = {
            let mut top = Subcomplex::empty();
            top.edges.insert(EdgeId::from("a.0.0"));
            top.edges.insert(EdgeId::from("a.0.1"));
            top.close(&c);
            let mut bottom = Subcomplex::empty();
            bottom.edges.insert(EdgeId::from("a.1.0"));
            bottom.edges.insert(EdgeId::from("a.1.1"));
            bottom.close(&c);
            Cover::new(alloc::vec![top, bottom])
        };
        let w = intersect_covers(&c, &halves, &u).unwrap();
        assert_eq!(w.len(), 7);
        assert!(refines(&w, &halves));
        assert!(refines(&w, &u));
    }

    #[test]
    fn refines_trivial_cases() {
        let c = subdivide(&subdivide(&shapes::circle()).complex).complex;
        let stars = star_cover(&c);
        let whole = Cover::whole(&c);
        assert!(refines(&stars, &whole));
        assert!(!refines(&whole, &stars));
        assert!(refines(&stars, &stars));
    }

    #[test]
    fn cell_closures_refine_every_cover() {
        let c = shapes::cyclic(3);
        let closures = cell_closure_cover(&c);
        closures.check_covers(&c).unwrap();
        assert!(refines(&closures, &star_cover(&c)));
        assert!(refines(&closures, &Cover::whole(&c)));
    }

    #[test]
    fn wedge_counts_add_with_vertices_merged() {
        let w = wedge(&shapes::circle(), &shapes::circle());
        assert_eq!(w.vertex_count(), 1);
        assert_eq!(w.edge_count(), 2);
        w.validate().unwrap();

        let w = wedge(&shapes::circle(), &shapes::disc());
        assert_eq!(w.vertex_count(), 1);
        assert_eq!(w.edge_count(), 2);
        assert_eq!(w.face_count(), 1);
        w.validate().unwrap();
    }

    #[test]
    fn wedge_commutes_with_subdivision() {
        let c1 = shapes::circle();
        let c2 = shapes::cyclic(3);
        let a = subdivide(&wedge(&c1, &c2)).complex;
        let b = wedge(&subdivide(&c1).complex, &subdivide(&c2).complex);
        assert_eq!(a, b);
    }

    #[test]
    fn subdivision_push_translates_the_full_loop() {
        let c = shapes::circle();
        let s = subdivide(&c);
        let l = EdgeLoop::new(
            "v",
            alloc::vec![SignedEdge::forward("a.0"), SignedEdge::forward("a.1")],
        );
        l.validate(&s.complex).unwrap();
        let pushed = s.push_loop(&l).unwrap();
        pushed.validate(&c).unwrap();
        assert_eq!(pushed.edges, alloc::vec![SignedEdge::forward("a")]);
    }
}
