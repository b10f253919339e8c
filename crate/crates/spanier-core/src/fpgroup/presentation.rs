use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::word::Word;

/// A finite presentation: named generators and freely reduced relators.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn free(generators: Vec<String>) -> Self {
        Presentation { generators, relators: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Renders a word over this presentation's generator names, e.g.
    /// `a b^-1 a`. The empty word renders as `1`.
    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        for (i, &l) in w.letters().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let idx = (l.unsigned_abs() as usize) - 1;
            match self.generators.get(idx) {
                Some(name) => out.push_str(name),
                None => out.push_str(&alloc::format!("g{idx}")),
            }
            if l < 0 {
                out.push_str("^-1");
            }
        }
        out
    }

    /// Parses a whitespace-separated word such as `a b^-1 a` over this
    /// presentation's generator names. `1` denotes the empty word.
    pub fn parse(&self, text: &str) -> Result<Word, String> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (name, inverted) = match token.strip_suffix("^-1") {
                Some(name) => (name, true),
                None => (token, false),
            };
            let idx = self
                .generators
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| alloc::format!("unknown generator `{name}`"))?;
            let letter = idx as i32 + 1;
            letters.push(if inverted { -letter } else { letter });
        }
        Ok(Word::from_letters(letters))
    }
}

/// Outcome of Tietze-style simplification: a presentation over the subset
/// of surviving generators, together with their indices in the original.
#[derive(Clone, Debug)]
pub struct SimplifiedPresentation {
    pub presentation: Presentation,
    /// Indices into the original generator list, in order.
    pub kept: Vec<usize>,
}

/// Eliminates generators that occur exactly once in some relator
/// (substituting the complementary word elsewhere) and drops empty or
/// duplicate relators. Substitutions whose rewritten relators would exceed
/// `max_len` letters are skipped, so the procedure always terminates.
///
/// Every step is a Tietze transformation: the presented group is unchanged
/// and the surviving generators still generate it.
pub fn simplify_presentation(p: &Presentation, max_len: usize) -> SimplifiedPresentation {
    let n = p.rank();
    let mut alive: Vec<bool> = alloc::vec![true; n];
    let mut relators: Vec<Word> = p
        .relators
        .iter()
        .map(|r| r.cyclically_reduced().0)
        .filter(|r| !r.is_empty())
        .collect();

    loop {
        relators.sort();
        relators.dedup();
        relators.retain(|r| !r.is_empty());

        // candidates: (relator idx, letter position) where the generator at
        // that position occurs exactly once in the relator; shortest
        // relators first so substitutions stay small
        let mut candidates: Vec<(usize, usize)> = Vec::new();
        for (ri, r) in relators.iter().enumerate() {
            for (pos, &l) in r.letters().iter().enumerate() {
                let g = l.unsigned_abs();
                let occurrences = r.letters().iter().filter(|&&m| m.unsigned_abs() == g).count();
                if occurrences == 1 {
                    candidates.push((ri, pos));
                    break;
                }
            }
        }
        candidates.sort_by_key(|&(ri, _)| (relators[ri].len(), ri));

        let mut eliminated = false;
        for (ri, pos) in candidates {
            let relator = relators[ri].clone();
            let letters = relator.letters();
            let l = letters[pos];
            let g = (l.unsigned_abs() as usize) - 1;

            // rotate so the eliminated letter leads: l · tail = 1, hence
            // g^(sign l) = tail^-1
            let mut rotated: Vec<i32> = Vec::with_capacity(letters.len());
            rotated.extend_from_slice(&letters[pos..]);
            rotated.extend_from_slice(&letters[..pos]);
            let tail = Word::from_letters(rotated[1..].iter().copied());
            let image = if l > 0 { tail.inverse() } else { tail };

            // substitute g := image in every other relator
            let mut next: Vec<Word> = Vec::new();
            let mut ok = true;
            for (i, r) in relators.iter().enumerate() {
                if i == ri {
                    continue;
                }
                let mut letters_out: Vec<i32> = Vec::new();
                for &m in r.letters() {
                    if (m.unsigned_abs() as usize) - 1 == g {
                        if m > 0 {
                            letters_out.extend_from_slice(image.letters());
                        } else {
                            letters_out.extend(image.inverse().letters());
                        }
                    } else {
                        letters_out.push(m);
                    }
                }
                let rewritten = Word::from_letters(letters_out).cyclically_reduced().0;
                if rewritten.len() > max_len {
                    ok = false;
                    break;
                }
                next.push(rewritten);
            }
            if ok {
                alive[g] = false;
                relators = next;
                eliminated = true;
                break;
            }
        }
        if !eliminated {
            break;
        }
    }

    let kept: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let remap: alloc::collections::BTreeMap<usize, usize> =
        kept.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let relators = relators
        .iter()
        .map(|r| {
            Word::from_letters(r.letters().iter().map(|&l| {
                let old = (l.unsigned_abs() as usize) - 1;
                let new = remap[&old] as i32 + 1;
                if l > 0 {
                    new
                } else {
                    -new
                }
            }))
        })
        .filter(|r| !r.is_empty())
        .collect();
    let generators = kept.iter().map(|&i| p.generators[i].clone()).collect();
    SimplifiedPresentation { presentation: Presentation { generators, relators }, kept }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn gens(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn render_and_parse_round_trip() {
        let p = Presentation::free(gens(&["a", "b"]));
        let w = Word::from_letters([1, -2, 1]);
        assert_eq!(p.render(&w), "a b^-1 a");
        assert_eq!(p.parse("a b^-1 a").unwrap(), w);
        assert_eq!(p.parse("1").unwrap(), Word::empty());
        assert!(p.parse("c").is_err());
    }

    #[test]
    fn length_one_relators_kill_their_generators() {
        // <a, b | a, b> simplifies to the empty presentation
        let p = Presentation {
            generators: gens(&["a", "b"]),
            relators: alloc::vec![Word::from_letters([1]), Word::from_letters([2])],
        };
        let s = simplify_presentation(&p, 64);
        assert!(s.kept.is_empty());
        assert!(s.presentation.relators.is_empty());
    }

    #[test]
    fn chain_of_identifications_collapses_to_one_generator() {
        // <a, b, c | a b^-1, b c^-1>: all generators equal, free of rank 1
        let p = Presentation {
            generators: gens(&["a", "b", "c"]),
            relators: alloc::vec![
                Word::from_letters([1, -2]),
                Word::from_letters([2, -3]),
            ],
        };
        let s = simplify_presentation(&p, 64);
        assert_eq!(s.kept.len(), 1);
        assert!(s.presentation.relators.is_empty());
    }

    #[test]
    fn commutator_relator_resists_elimination() {
        // every generator occurs twice in [a, b]: nothing to eliminate
        let p = Presentation {
            generators: gens(&["a", "b"]),
            relators: alloc::vec![Word::from_letters([1, 2, -1, -2])],
        };
        let s = simplify_presentation(&p, 64);
        assert_eq!(s.kept.len(), 2);
        assert_eq!(s.presentation.relators.len(), 1);
    }
}
