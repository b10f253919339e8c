//! Small built-in complexes used across tests, documentation and the
//! acceptance suite.

use alloc::vec;
use alloc::vec::Vec;

use crate::complex::{Complex, SignedEdge};

/// A single vertex `v` with one loop edge `a`: the circle.
pub fn circle() -> Complex {
    let mut c = Complex::new("v");
    c.add_edge("a", "v", "v");
    c
}

/// The circle with a face glued along `a`: a disc, trivial fundamental
/// group.
pub fn disc() -> Complex {
    let mut c = circle();
    c.add_face("f", vec![SignedEdge::forward("a")]);
    c
}

/// The circle with a face glued along `a^k`: fundamental group Z/k.
pub fn cyclic(k: usize) -> Complex {
    let mut c = circle();
    let boundary: Vec<_> = (0..k).map(|_| SignedEdge::forward("a")).collect();
    c.add_face("f", boundary);
    c
}

/// One vertex with two loop edges `a`, `b`: rank-2 free fundamental group.
pub fn wedge_two_circles() -> Complex {
    let mut c = Complex::new("v");
    c.add_edge("a", "v", "v");
    c.add_edge("b", "v", "v");
    c
}

/// Two vertices joined by three parallel edges.
pub fn theta() -> Complex {
    let mut c = Complex::new("u");
    c.add_vertex("w");
    c.add_edge("e1", "u", "w");
    c.add_edge("e2", "u", "w");
    c.add_edge("e3", "u", "w");
    c
}

/// A single edge between two vertices.
pub fn interval() -> Complex {
    let mut c = Complex::new("u");
    c.add_vertex("w");
    c.add_edge("e", "u", "w");
    c
}
