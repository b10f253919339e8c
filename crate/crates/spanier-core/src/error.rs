//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Structural and budget errors shared by all modules.
///
/// Budget exhaustion inside verdict machinery is *not* an error (it surfaces
/// as [`crate::Verdict::Unknown`]); `Budget` is only raised where an
/// operation cannot return a partial result at all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A cell references an id that is not declared in the complex.
    Dangling { cell: String, missing: String },
    /// A face boundary is not a closed edge path.
    OpenBoundary { face: String },
    /// The 1-skeleton is not connected.
    Disconnected,
    /// A family of subcomplexes does not cover the complex.
    NotCover { missing: String },
    /// A path does not run between the expected endpoints.
    PathEndpoints { expected: String, found: String },
    /// Coset enumeration did not complete within the budget.
    Budget { live_cosets: usize },
    /// A vertex fiber has the wrong cardinality.
    Fiber { vertex: String },
    /// Edge lifting fails at a vertex of the total space.
    EdgeLift { vertex: String, edge: String },
    /// A face lift does not project to its base face boundary.
    FaceLift { face: String },
    /// A projection entry is missing or structurally inconsistent.
    Projection { cell: String },
    /// The operation needs an untruncated covering.
    Truncated,
    /// A loop is not based at the required vertex.
    NotBased { expected: String, found: String },
    /// A loop or cell leaves the designated subcomplex.
    LoopOutside { cell: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dangling { cell, missing } => {
                write!(f, "cell `{cell}` references undeclared id `{missing}`")
            }
            Error::OpenBoundary { face } => {
                write!(f, "face `{face}` has a boundary that is not a closed edge path")
            }
            Error::Disconnected => write!(f, "the 1-skeleton is not connected"),
            Error::NotCover { missing } => {
                write!(f, "subcomplex family does not cover: `{missing}` is uncovered")
            }
            Error::PathEndpoints { expected, found } => {
                write!(f, "path endpoint mismatch: expected `{expected}`, found `{found}`")
            }
            Error::Budget { live_cosets } => {
                write!(f, "coset enumeration exceeded its budget ({live_cosets} live cosets)")
            }
            Error::Fiber { vertex } => write!(f, "fiber over `{vertex}` has the wrong size"),
            Error::EdgeLift { vertex, edge } => {
                write!(f, "edge `{edge}` does not lift uniquely at `{vertex}`")
            }
            Error::FaceLift { face } => {
                write!(f, "face `{face}` does not project onto its base boundary")
            }
            Error::Projection { cell } => {
                write!(f, "projection is missing or inconsistent at `{cell}`")
            }
            Error::Truncated => write!(f, "operation requires an untruncated covering"),
            Error::NotBased { expected, found } => {
                write!(f, "loop based at `{found}`, expected `{expected}`")
            }
            Error::LoopOutside { cell } => {
                write!(f, "loop leaves the subcomplex at `{cell}`")
            }
        }
    }
}

impl core::error::Error for Error {}
