//! Seeded random generation of small complexes, covers, loops and paths.
//!
//! Everything is driven by a caller-supplied RNG so that property suites
//! and CLI sampling commands are reproducible from a single seed.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::complex::{
    cell_closure_cover, intersect_covers, Complex, Cover, EdgeLoop, EdgePath, SignedEdge,
    Subcomplex, VertexId,
};
use crate::spanier::RootedTree;

/// A random connected 2-complex with at most `max_cells` cells: a spanning
/// tree on up to three vertices, a few extra edges (loops and parallels
/// allowed) and faces glued along short closed walks.
pub fn complex(rng: &mut impl Rng, max_cells: usize) -> Complex {
    let max_cells = max_cells.max(3);
    let nv = rng.gen_range(1..=3usize);
    let mut c = Complex::new("v0");
    for i in 1..nv {
        c.add_vertex(format!("v{i}"));
    }
    let mut edge_n = 0usize;
    for i in 1..nv {
        let p = rng.gen_range(0..i);
        c.add_edge(format!("e{edge_n}"), format!("v{p}"), format!("v{i}"));
        edge_n += 1;
    }
    let extra = rng.gen_range(1..=3usize);
    for _ in 0..extra {
        if c.cell_count() >= max_cells {
            break;
        }
        let a = rng.gen_range(0..nv);
        let b = rng.gen_range(0..nv);
        c.add_edge(format!("e{edge_n}"), format!("v{a}"), format!("v{b}"));
        edge_n += 1;
    }
    let mut face_n = 0usize;
    for _ in 0..rng.gen_range(0..=2usize) {
        if c.cell_count() >= max_cells {
            break;
        }
        if let Some(l) = closed_walk(rng, &c, 4) {
            c.add_face(format!("f{face_n}"), l.edges);
            face_n += 1;
        }
    }
    debug_assert!(c.validate().is_ok());
    c
}

/// A short closed walk from a random vertex, if one shows up within a few
/// attempts.
fn closed_walk(rng: &mut impl Rng, c: &Complex, max_len: usize) -> Option<EdgeLoop> {
    let vertices: Vec<VertexId> = c.vertices().cloned().collect();
    let adjacency = c.adjacency();
    for _ in 0..8 {
        let start = vertices[rng.gen_range(0..vertices.len())].clone();
        let mut at = start.clone();
        let mut edges = Vec::new();
        for _ in 0..rng.gen_range(1..=max_len) {
            let nb = &adjacency[&at];
            if nb.is_empty() {
                break;
            }
            let (s, w) = nb[rng.gen_range(0..nb.len())].clone();
            edges.push(s);
            at = w;
        }
        if at == start && !edges.is_empty() {
            return Some(EdgeLoop { base: start, edges });
        }
    }
    None
}

/// A random loop at the basepoint: a random walk closed up along the
/// spanning tree, total length at most `max_len` plus the closing path.
pub fn edge_loop(rng: &mut impl Rng, c: &Complex, max_len: usize) -> EdgeLoop {
    let adjacency = c.adjacency();
    let tree = RootedTree::new(c, None, c.basepoint());
    let mut at = c.basepoint().clone();
    let mut edges = Vec::new();
    for _ in 0..rng.gen_range(0..=max_len.max(1)) {
        let nb = &adjacency[&at];
        if nb.is_empty() {
            break;
        }
        let (s, w) = nb[rng.gen_range(0..nb.len())].clone();
        edges.push(s);
        at = w;
    }
    let home = tree.path_to(&at);
    edges.extend(home.edges.iter().rev().map(SignedEdge::inverse));
    EdgeLoop { base: c.basepoint().clone(), edges }
}

/// A random walk starting at the basepoint.
pub fn edge_path(rng: &mut impl Rng, c: &Complex, max_len: usize) -> EdgePath {
    let adjacency = c.adjacency();
    let mut at = c.basepoint().clone();
    let mut edges = Vec::new();
    for _ in 0..rng.gen_range(0..=max_len.max(1)) {
        let nb = &adjacency[&at];
        if nb.is_empty() {
            break;
        }
        let (s, w) = nb[rng.gen_range(0..nb.len())].clone();
        edges.push(s);
        at = w;
    }
    EdgePath { start: c.basepoint().clone(), edges }
}

/// A random cover: up to `max_elements` random closed subcomplexes, with
/// every uncovered cell patched into a random element afterwards.
pub fn cover(rng: &mut impl Rng, c: &Complex, max_elements: usize) -> Cover {
    let k = rng.gen_range(1..=max_elements.max(1));
    let mut elements: Vec<Subcomplex> = Vec::new();
    for _ in 0..k {
        let mut s = Subcomplex::empty();
        for v in c.vertices() {
            if rng.gen_bool(0.4) {
                s.vertices.insert(v.clone());
            }
        }
        for (e, _) in c.edges() {
            if rng.gen_bool(0.4) {
                s.edges.insert(e.clone());
            }
        }
        for (f, _) in c.faces() {
            if rng.gen_bool(0.4) {
                s.faces.insert(f.clone());
            }
        }
        s.close(c);
        elements.push(s);
    }
    // patch uncovered cells
    let mut uncovered: Vec<crate::complex::Cell> = Vec::new();
    let covered_v: BTreeSet<_> = elements.iter().flat_map(|s| s.vertices.iter().cloned()).collect();
    let covered_e: BTreeSet<_> = elements.iter().flat_map(|s| s.edges.iter().cloned()).collect();
    let covered_f: BTreeSet<_> = elements.iter().flat_map(|s| s.faces.iter().cloned()).collect();
    for v in c.vertices() {
        if !covered_v.contains(v) {
            uncovered.push(crate::complex::Cell::Vertex(v.clone()));
        }
    }
    for (e, _) in c.edges() {
        if !covered_e.contains(e) {
            uncovered.push(crate::complex::Cell::Edge(e.clone()));
        }
    }
    for (f, _) in c.faces() {
        if !covered_f.contains(f) {
            uncovered.push(crate::complex::Cell::Face(f.clone()));
        }
    }
    for cell in uncovered {
        let idx = rng.gen_range(0..elements.len());
        let patch = Subcomplex::closure_of(c, &cell);
        elements[idx] = elements[idx].union(&patch);
    }
    let out = Cover { elements };
    debug_assert!(out.check_covers(c).is_ok());
    out
}

/// A random refinement of `u`: the cell-closure cover (which refines every
/// cover), an intersection with a fresh random cover, or `u` itself.
pub fn refinement(rng: &mut impl Rng, c: &Complex, u: &Cover) -> Cover {
    match rng.gen_range(0..4u8) {
        0 | 1 => cell_closure_cover(c),
        2 => {
            let other = cover(rng, c, 3);
            intersect_covers(c, u, &other).unwrap_or_else(|_| u.clone())
        }
        _ => u.clone(),
    }
}
