//! Finitely presented group engine.
//!
//! Words are freely reduced sequences of signed generator symbols;
//! presentations pair a generator list with relator words. On top of these
//! sit HLT-style Todd-Coxeter coset enumeration with a live-coset budget,
//! abelianization via Smith normal form (the certified NO-oracle), Stallings
//! folding for exact membership in finitely generated subgroups of free
//! groups, and the three-valued membership verdict for normal closures.

mod abelian;
mod coset;
mod fold;
mod membership;
mod presentation;
mod verdict;
mod word;

pub use abelian::{abelianization, AbelianContext, AbelianInvariants};
pub use coset::{todd_coxeter, CosetTable, TableStatus};
pub use fold::{fold, fold_membership, intersect_subgroups, SubgroupGraph};
pub use membership::{word_trivial_in_quotient, NclContext};
pub use presentation::{simplify_presentation, Presentation, SimplifiedPresentation};
pub use verdict::{Blocker, Budgets, Certificate, Verdict};
pub use word::{free_reduce, Word};
