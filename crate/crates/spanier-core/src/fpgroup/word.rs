use alloc::vec::Vec;

/// A word in signed generator symbols. The letter `k > 0` is generator
/// `k - 1`, the letter `-k` its inverse. The canonical form is freely
/// reduced; constructors reduce eagerly.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Word(Vec<i32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from raw letters and freely reduces it. Zero letters
    /// are dropped.
    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            if l == 0 {
                continue;
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// The length-one word for a generator index.
    pub fn generator(index: usize) -> Self {
        Word(alloc::vec![index as i32 + 1])
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    /// `by⁻¹ · self · by`.
    pub fn conjugated_by(&self, by: &Word) -> Word {
        by.inverse().concat(self).concat(by)
    }

    /// Splits off the maximal conjugator: `self = u · core · u⁻¹` with
    /// `core` cyclically reduced. Returns `(core, u)`.
    pub fn cyclically_reduced(&self) -> (Word, Word) {
        let mut lo = 0;
        let mut hi = self.0.len();
        while hi - lo >= 2 && self.0[lo] == -self.0[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        (Word(self.0[lo..hi].to_vec()), Word(self.0[..lo].to_vec()))
    }

    /// All distinct cyclic rotations of the word.
    pub fn rotations(&self) -> Vec<Word> {
        let n = self.0.len();
        let mut out = Vec::new();
        for k in 0..n.max(1) {
            let mut rot: Vec<i32> = Vec::with_capacity(n);
            rot.extend_from_slice(&self.0[k..]);
            rot.extend_from_slice(&self.0[..k]);
            let w = Word(rot);
            if !out.contains(&w) {
                out.push(w);
            }
        }
        out
    }

    /// Exponent-sum vector over `n` generators.
    pub fn exponents(&self, n: usize) -> Vec<i64> {
        let mut v = alloc::vec![0i64; n];
        for &l in &self.0 {
            let idx = (l.unsigned_abs() as usize) - 1;
            if idx < n {
                v[idx] += l.signum() as i64;
            }
        }
        v
    }

    /// Largest generator index mentioned, plus one.
    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }
}

/// Freely reduces a word; exposed as a free function to match the rest of
/// the operations and for idempotence tests.
pub fn free_reduce(w: &Word) -> Word {
    Word::from_letters(w.letters().iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_inverses_cancel() {
        let w = Word::from_letters([1, -1]);
        assert!(w.is_empty());
    }

    #[test]
    fn inner_cancellation() {
        // a b b^-1 a -> a a
        let w = Word::from_letters([1, 2, -2, 1]);
        assert_eq!(w.letters(), &[1, 1]);
    }

    #[test]
    fn reduction_is_idempotent() {
        let w = Word::from_letters([1, 2, -1, -2, 1]);
        assert_eq!(free_reduce(&w), w);
    }

    #[test]
    fn cyclic_reduction_peels_conjugation() {
        // a b c b^-1 a^-1 = (a b) c (a b)^-1
        let w = Word::from_letters([1, 2, 3, -2, -1]);
        let (core, u) = w.cyclically_reduced();
        assert_eq!(core.letters(), &[3]);
        assert_eq!(u.letters(), &[1, 2]);
        assert_eq!(u.concat(&core).concat(&u.inverse()), w);
    }

    #[test]
    fn conjugation_round_trip() {
        let w = Word::from_letters([1, 2]);
        let by = Word::from_letters([2, -1]);
        let back = w.conjugated_by(&by).conjugated_by(&by.inverse());
        assert_eq!(back, w);
    }
}
