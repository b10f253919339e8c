use alloc::vec::Vec;

/// Finite evidence backing a `Yes` or `No` verdict.
#[derive(Clone, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Certificate {
    /// The word freely reduces to the empty word, or the generating set in
    /// question is empty.
    FreeReduction,
    /// An explicit rewriting of the word into a product of conjugates of
    /// normal generators, found in the stated number of moves.
    ConjugateProduct { moves: usize },
    /// A completed coset enumeration of the quotient with the stated number
    /// of cosets; the word acts trivially (Yes) or non-trivially (No) on
    /// the subgroup coset.
    CosetEnumeration { cosets: usize },
    /// The image of the word in the abelianized quotient is the stated
    /// nonzero vector.
    AbelianObstruction { image: Vec<i64> },
    /// Exact membership decided on a folded subgroup graph with the stated
    /// number of states.
    Folding { states: usize },
    /// All of the stated number of component checks answered Yes.
    Conjunction { checks: usize },
}

/// Why a verdict is `Unknown`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Blocker {
    /// Enumeration and search budgets were exhausted.
    Budget,
    /// The answer quantifies over a universe the caller did not flag as
    /// exhaustive.
    IncompleteUniverse,
}

/// Three-valued answer to a question that hides a word problem.
///
/// `No` is only ever produced together with a finite certificate (an
/// abelianization obstruction or a completed enumeration); `Yes` carries
/// the certificate that exhibits membership. Budget exhaustion is an
/// `Unknown`, never a guess.
#[derive(Clone, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Verdict {
    Yes(Certificate),
    No(Certificate),
    Unknown(Blocker),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    /// Three-valued conjunction over a sequence of verdicts, evaluated
    /// left to right on the already-collected list so the outcome does not
    /// depend on completion order: any No wins, then any Unknown, else Yes.
    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let collected: Vec<Verdict> = verdicts.into_iter().collect();
        if let Some(no) = collected.iter().find(|v| v.is_no()) {
            return no.clone();
        }
        if let Some(Verdict::Unknown(b)) = collected.iter().find(|v| v.is_unknown()) {
            return Verdict::Unknown(*b);
        }
        Verdict::Yes(Certificate::Conjunction { checks: collected.len() })
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Verdict::Yes(c) => write!(f, "YES ({c})"),
            Verdict::No(c) => write!(f, "NO ({c})"),
            Verdict::Unknown(Blocker::Budget) => write!(f, "UNKNOWN (budget)"),
            Verdict::Unknown(Blocker::IncompleteUniverse) => {
                write!(f, "UNKNOWN (incomplete universe)")
            }
        }
    }
}

impl core::fmt::Display for Certificate {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Certificate::FreeReduction => write!(f, "free reduction"),
            Certificate::ConjugateProduct { moves } => {
                write!(f, "conjugate product, {moves} moves")
            }
            Certificate::CosetEnumeration { cosets } => {
                write!(f, "coset enumeration, {cosets} cosets")
            }
            Certificate::AbelianObstruction { image } => {
                write!(f, "abelian obstruction {image:?}")
            }
            Certificate::Folding { states } => write!(f, "folded graph, {states} states"),
            Certificate::Conjunction { checks } => write!(f, "{checks} checks"),
        }
    }
}

/// Resource limits for enumeration and search. Budgets bound work, never
/// correctness: raising any budget can only turn `Unknown` into `Yes`/`No`,
/// never flip a certified answer.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Budgets {
    /// Maximum live cosets in a Todd-Coxeter run.
    pub max_cosets: usize,
    /// Maximum word length in the conjugate-product search.
    pub max_word_len: usize,
    /// Maximum states explored by the conjugate-product search.
    pub max_search_nodes: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { max_cosets: 50_000, max_word_len: 64, max_search_nodes: 2048 }
    }
}

impl Budgets {
    pub fn doubled(&self) -> Budgets {
        Budgets {
            max_cosets: self.max_cosets * 2,
            max_word_len: self.max_word_len * 2,
            max_search_nodes: self.max_search_nodes * 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_precedence() {
        let yes = Verdict::Yes(Certificate::FreeReduction);
        let no = Verdict::No(Certificate::AbelianObstruction { image: alloc::vec![1] });
        let unknown = Verdict::Unknown(Blocker::Budget);

        assert!(Verdict::all([yes.clone(), yes.clone()]).is_yes());
        assert!(Verdict::all([yes.clone(), unknown.clone()]).is_unknown());
        assert!(Verdict::all([unknown.clone(), no.clone()]).is_no());
        assert!(Verdict::all([]).is_yes());
        // order of unknowns and noes does not change the class
        assert!(Verdict::all([no.clone(), unknown]).is_no());
    }
}
