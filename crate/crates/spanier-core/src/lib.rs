//! Computable covering-space theory over finite combinatorial 2-complexes.
//!
//! The crate models spaces as finite 2-complexes (vertices, directed edges
//! with formal inverses, polygonal faces) and makes the open-cover side of
//! covering-space theory effective on them: Spanier groups of covers as
//! normal-closure data, containment and stability verdicts, covering
//! complexes built from coset actions, one-point-union transfer, and
//! finite tower stages standing in for wild spaces such as the Hawaiian
//! Earring.
//!
//! Group-theoretic questions hiding a word problem are answered with a
//! three-valued [`Verdict`]: `Yes`/`No` always carry a finite certificate
//! (a completed coset enumeration, an abelianization obstruction, a folded
//! subgroup graph, or an explicit conjugate-product rewriting) and
//! `Unknown` records why the budget ran out.
//!
//! The crate is `no_std` (it allocates, but performs no IO); parsing,
//! file formats and the command-line front end live in the companion
//! `spanier-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod complex;
pub mod covering;
pub mod error;
pub mod fpgroup;
pub mod report;
pub mod sample;
pub mod shapes;
pub mod spanier;
pub mod tower;
pub mod wedge;

pub use complex::{Cell, Complex, Cover, EdgeId, EdgeLoop, EdgePath, FaceId, SignedEdge, Subcomplex, VertexId};
pub use error::{Error, Result};
pub use fpgroup::{Blocker, Budgets, Certificate, Presentation, Verdict, Word};
pub use spanier::{NormalSubgroupData, Pi1Data};
