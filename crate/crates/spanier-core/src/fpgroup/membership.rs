use alloc::vec::Vec;

use super::abelian::{AbelianContext, AbelianInvariants};
use super::coset::{todd_coxeter, CosetTable};
use super::presentation::Presentation;
use super::verdict::{Blocker, Budgets, Certificate, Verdict};
use super::word::Word;

/// Reusable state for deciding membership in the normal closure of a fixed
/// set of words inside the group presented by `p`, i.e. triviality in the
/// quotient `<gens | relators ∪ normal_gens>`.
///
/// The decision pipeline, cheapest first:
/// 1. free triviality,
/// 2. greedy deletion of embedded conjugate factors (certified Yes),
/// 3. abelianization obstruction (certified No),
/// 4. a completed coset enumeration of the quotient (certified either way),
/// 5. a bounded insert/delete rewriting search (certified Yes).
///
/// Anything else is an honest `Unknown`: membership in a normal closure of
/// a free group is a general word problem, so a residual three-valued
/// answer is forced.
pub struct NclContext {
    quotient: Presentation,
    budgets: Budgets,
    rotations: Vec<Word>,
    abelian: AbelianContext,
    enumeration: Option<CosetTable>,
    enumeration_ran: bool,
}

impl NclContext {
    pub fn new(p: &Presentation, normal_gens: &[Word], budgets: Budgets) -> Self {
        let mut relators = p.relators.clone();
        relators.extend(normal_gens.iter().cloned());
        relators.retain(|r| !r.is_empty());
        let quotient = Presentation { generators: p.generators.clone(), relators };

        let mut rotations: Vec<Word> = Vec::new();
        for r in &quotient.relators {
            let core = r.cyclically_reduced().0;
            if core.is_empty() {
                continue;
            }
            for w in core.rotations() {
                if !rotations.contains(&w) {
                    rotations.push(w);
                }
            }
            for w in core.inverse().rotations() {
                if !rotations.contains(&w) {
                    rotations.push(w);
                }
            }
        }

        let abelian = AbelianContext::new(quotient.rank(), &quotient.relators);
        NclContext { quotient, budgets, rotations, abelian, enumeration: None, enumeration_ran: false }
    }

    /// Abelian invariants of the quotient, for reports.
    pub fn quotient_invariants(&self) -> AbelianInvariants {
        self.abelian.invariants()
    }

    /// Is `w` trivial in the quotient (equivalently, in the normal closure
    /// of the normal generators together with the relators)?
    pub fn verdict(&mut self, w: &Word) -> Verdict {
        if w.is_empty() {
            return Verdict::Yes(Certificate::FreeReduction);
        }
        if let Some(moves) = self.greedy_deletion(w) {
            return Verdict::Yes(Certificate::ConjugateProduct { moves });
        }
        if let Some(image) = self.abelian.obstruction(w) {
            return Verdict::No(Certificate::AbelianObstruction { image });
        }
        self.ensure_enumeration();
        if let Some(table) = &self.enumeration {
            let cosets = table.cosets();
            return match table.act(0, w) {
                Some(0) => Verdict::Yes(Certificate::CosetEnumeration { cosets }),
                Some(_) => Verdict::No(Certificate::CosetEnumeration { cosets }),
                None => Verdict::Unknown(Blocker::Budget),
            };
        }
        if let Some(moves) = self.rewriting_search(w) {
            return Verdict::Yes(Certificate::ConjugateProduct { moves });
        }
        Verdict::Unknown(Blocker::Budget)
    }

    fn ensure_enumeration(&mut self) {
        if self.enumeration_ran {
            return;
        }
        self.enumeration_ran = true;
        let table = todd_coxeter(&self.quotient, &[], self.budgets.max_cosets);
        if table.is_complete() {
            self.enumeration = Some(table);
        }
    }

    /// Deletes embedded rotations of relators until the word empties or no
    /// deletion applies. Each deletion `x·r·y -> x·y` divides out one
    /// conjugate factor, so reaching the empty word certifies membership.
    fn greedy_deletion(&self, w: &Word) -> Option<usize> {
        let mut cur = w.cyclically_reduced().0;
        let mut moves = 0usize;
        'outer: loop {
            if cur.is_empty() {
                return Some(moves);
            }
            if moves >= self.budgets.max_search_nodes {
                return None;
            }
            for r in &self.rotations {
                if let Some(shorter) = delete_first(&cur, r) {
                    cur = shorter.cyclically_reduced().0;
                    moves += 1;
                    continue 'outer;
                }
            }
            return None;
        }
    }

    /// Breadth-first search over cyclic words reachable by deleting or
    /// inserting rotations of relators, bounded by node and length budgets.
    fn rewriting_search(&self, w: &Word) -> Option<usize> {
        let start = cyclic_normal_form(w);
        if start.is_empty() {
            return Some(0);
        }
        let mut visited: alloc::collections::BTreeSet<Word> = Default::default();
        let mut queue: alloc::collections::VecDeque<(Word, usize)> = Default::default();
        visited.insert(start.clone());
        queue.push_back((start, 0));
        while let Some((cur, depth)) = queue.pop_front() {
            let mut candidates: Vec<Word> = Vec::new();
            for r in &self.rotations {
                let mut from = 0;
                while let Some(shorter) = delete_at(&cur, r, from) {
                    candidates.push(shorter.0);
                    from = shorter.1 + 1;
                }
                if cur.len() + r.len() <= self.budgets.max_word_len {
                    for pos in 0..=cur.len() {
                        candidates.push(insert_at(&cur, r, pos));
                    }
                }
            }
            for cand in candidates {
                let norm = cyclic_normal_form(&cand);
                if norm.is_empty() {
                    return Some(depth + 1);
                }
                if visited.len() >= self.budgets.max_search_nodes {
                    return None;
                }
                if visited.insert(norm.clone()) {
                    queue.push_back((norm, depth + 1));
                }
            }
        }
        None
    }
}

/// Lexicographically least cyclic rotation of the cyclic reduction; a
/// canonical representative of the conjugacy-and-rotation class.
fn cyclic_normal_form(w: &Word) -> Word {
    let core = w.cyclically_reduced().0;
    core.rotations().into_iter().min().unwrap_or(core)
}

fn delete_first(w: &Word, sub: &Word) -> Option<Word> {
    delete_at(w, sub, 0).map(|(out, _)| out)
}

/// Deletes the first occurrence of `sub` at or after `from`; returns the
/// shortened word and the match position.
fn delete_at(w: &Word, sub: &Word, from: usize) -> Option<(Word, usize)> {
    let wl = w.letters();
    let sl = sub.letters();
    if sl.is_empty() || sl.len() > wl.len() {
        return None;
    }
    for start in from..=(wl.len() - sl.len()) {
        if &wl[start..start + sl.len()] == sl {
            let rest = wl[..start].iter().chain(wl[start + sl.len()..].iter()).copied();
            return Some((Word::from_letters(rest), start));
        }
    }
    None
}

fn insert_at(w: &Word, sub: &Word, pos: usize) -> Word {
    let wl = w.letters();
    let letters = wl[..pos]
        .iter()
        .chain(sub.letters().iter())
        .chain(wl[pos..].iter())
        .copied();
    Word::from_letters(letters)
}

/// Is `w` in the normal closure of `normal_gens` in the group presented by
/// `p`? One-shot wrapper around [`NclContext`].
pub fn word_trivial_in_quotient(
    p: &Presentation,
    normal_gens: &[Word],
    w: &Word,
    budgets: Budgets,
) -> Verdict {
    NclContext::new(p, normal_gens, budgets).verdict(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn free2() -> Presentation {
        Presentation::free(alloc::vec!["a".to_string(), "b".to_string()])
    }

    fn w(letters: &[i32]) -> Word {
        Word::from_letters(letters.iter().copied())
    }

    #[test]
    fn conjugate_of_a_normal_generator() {
        let v = word_trivial_in_quotient(&free2(), &[w(&[2])], &w(&[1, 2, -1]), Budgets::default());
        assert!(v.is_yes());
    }

    #[test]
    fn abelianization_blocks_the_other_generator() {
        let v = word_trivial_in_quotient(&free2(), &[w(&[2])], &w(&[1]), Budgets::default());
        assert!(matches!(v, Verdict::No(Certificate::AbelianObstruction { .. })));
    }

    #[test]
    fn nested_commutator_under_a_tiny_budget_is_unknown() {
        let commutator = w(&[1, 2, -1, -2]);
        // [a, [a, b]]
        let nested = w(&[1]).concat(&commutator).concat(&w(&[-1])).concat(&commutator.inverse());
        let tiny = Budgets { max_cosets: 1, max_word_len: 1, max_search_nodes: 0 };
        let v = word_trivial_in_quotient(&free2(), &[commutator.clone()], &nested, tiny);
        assert!(v.is_unknown());
        // with an honest budget the rewriting search certifies membership
        let v = word_trivial_in_quotient(&free2(), &[commutator], &nested, Budgets::default());
        assert!(v.is_yes());
    }

    #[test]
    fn finite_quotients_decide_both_ways() {
        // <a | a^3>: a^3 trivial, a not (caught by the abelian oracle)
        let p = Presentation {
            generators: alloc::vec!["a".to_string()],
            relators: alloc::vec![w(&[1, 1, 1])],
        };
        let mut ctx = NclContext::new(&p, &[], Budgets::default());
        assert!(matches!(
            ctx.verdict(&w(&[1, 1, 1])),
            Verdict::Yes(Certificate::ConjugateProduct { .. })
        ));
        assert!(matches!(ctx.verdict(&w(&[1])), Verdict::No(Certificate::AbelianObstruction { .. })));
        assert!(ctx.verdict(&w(&[1, 1, 1, 1, 1, 1])).is_yes());
    }

    #[test]
    fn enumeration_catches_what_abelianization_misses() {
        // symmetric group on three letters; a b a b = (ab)^2 has order 3,
        // nontrivial, but its exponent vector (2, 2) clears the abelian
        // oracle
        let p = Presentation {
            generators: alloc::vec!["a".to_string(), "b".to_string()],
            relators: alloc::vec![
                w(&[1, 1]),
                w(&[2, 2]),
                w(&[1, 2, 1, 2, 1, 2]),
            ],
        };
        let mut ctx = NclContext::new(&p, &[], Budgets::default());
        assert!(matches!(
            ctx.verdict(&w(&[1, 2, 1, 2])),
            Verdict::No(Certificate::CosetEnumeration { cosets: 6 })
        ));
    }

    #[test]
    fn budget_increase_never_flips_certified_answers() {
        let p = free2();
        let gens = [w(&[1, 2, -1, -2])];
        let words = [w(&[1]), w(&[2, 1, 2, -1, -2, -2]), w(&[1, 1]), Word::empty()];
        let small = Budgets { max_cosets: 50, max_word_len: 16, max_search_nodes: 64 };
        for word in &words {
            let before = word_trivial_in_quotient(&p, &gens, word, small);
            let after = word_trivial_in_quotient(&p, &gens, word, small.doubled());
            match before {
                Verdict::Yes(_) => assert!(after.is_yes()),
                Verdict::No(_) => assert!(after.is_no()),
                Verdict::Unknown(_) => {}
            }
        }
    }

    #[test]
    fn trivial_quotient_answers_yes_for_everything() {
        // <a, b | a, b>: 1 coset
        let p = free2();
        let mut ctx = NclContext::new(&p, &[w(&[1]), w(&[2])], Budgets::default());
        assert!(ctx.verdict(&w(&[1, 2, 1, -2])).is_yes());
        assert_eq!(
            ctx.quotient_invariants(),
            AbelianInvariants { torsion: alloc::vec![], free_rank: 0 }
        );
    }
}
