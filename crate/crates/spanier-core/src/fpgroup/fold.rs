use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::word::Word;

/// A folded subgroup graph (core graph) of a finitely generated subgroup of
/// a free group. Transitions are stored in both directions: the key is a
/// signed letter, `+g` reading the generator forwards, `-g` backwards.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    rank: usize,
    base: usize,
    next: Vec<BTreeMap<i32, usize>>,
}

/// Builds the folded core graph of the subgroup generated by `gens` inside
/// the free group of the given rank: one petal per generator word, then
/// identification of equally-labelled edges until the graph is
/// deterministic.
pub fn fold(rank: usize, gens: &[Word]) -> SubgroupGraph {
    // raw edges as (state, signed letter, state); states 0.. with 0 = base
    let mut edges: Vec<(usize, i32, usize)> = Vec::new();
    let mut states = 1usize;
    for g in gens {
        let letters = g.letters();
        if letters.is_empty() {
            continue;
        }
        let mut at = 0usize;
        for (i, &l) in letters.iter().enumerate() {
            let to = if i + 1 == letters.len() { 0 } else { states + i };
            edges.push((at, l, to));
            at = to;
        }
        states += letters.len().saturating_sub(1);
    }

    let mut parent: Vec<usize> = (0..states).collect();
    fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }

    // fold to a deterministic graph: whenever a state has two out-edges
    // with the same signed label, merge their targets
    loop {
        let mut seen: BTreeMap<(usize, i32), usize> = BTreeMap::new();
        let mut merge: Option<(usize, usize)> = None;
        for &(s, l, t) in &edges {
            let s = find(&mut parent, s);
            let t = find(&mut parent, t);
            for (state, letter, target) in [(s, l, t), (t, -l, s)] {
                if let Some(&other) = seen.get(&(state, letter)) {
                    if other != target {
                        merge = Some((other, target));
                        break;
                    }
                } else {
                    seen.insert((state, letter), target);
                }
            }
            if merge.is_some() {
                break;
            }
        }
        match merge {
            Some((x, y)) => {
                let x = find(&mut parent, x);
                let y = find(&mut parent, y);
                let (keep, drop) = if x < y { (x, y) } else { (y, x) };
                parent[drop] = keep;
            }
            None => break,
        }
    }

    // compact representatives
    let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
    let base_rep = find(&mut parent, 0);
    renumber.insert(base_rep, 0);
    for s in 0..states {
        let r = find(&mut parent, s);
        let next_id = renumber.len();
        renumber.entry(r).or_insert(next_id);
    }
    let mut next: Vec<BTreeMap<i32, usize>> = alloc::vec![BTreeMap::new(); renumber.len()];
    for &(s, l, t) in &edges {
        let s = renumber[&find(&mut parent, s)];
        let t = renumber[&find(&mut parent, t)];
        next[s].insert(l, t);
        next[t].insert(-l, s);
    }
    SubgroupGraph { rank, base: 0, next }
}

impl SubgroupGraph {
    pub fn states(&self) -> usize {
        self.next.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Exact membership: a freely reduced word lies in the subgroup iff it
    /// traces a closed path at the base state.
    pub fn contains(&self, w: &Word) -> bool {
        let mut at = self.base;
        for &l in w.letters() {
            match self.next[at].get(&l) {
                Some(&t) => at = t,
                None => return false,
            }
        }
        at == self.base
    }

    /// `Some(index)` when the graph is complete (every state carries every
    /// label), i.e. the subgroup has finite index equal to the state count.
    pub fn complete_index(&self) -> Option<usize> {
        for row in &self.next {
            for g in 1..=self.rank as i32 {
                if !row.contains_key(&g) || !row.contains_key(&-g) {
                    return None;
                }
            }
        }
        Some(self.next.len())
    }

    /// A free generating set read off a spanning tree: one generator per
    /// non-tree transition.
    pub fn generators(&self) -> Vec<Word> {
        let n = self.next.len();
        let mut path: Vec<Option<Word>> = alloc::vec![None; n];
        path[self.base] = Some(Word::empty());
        let mut queue: alloc::collections::VecDeque<usize> = [self.base].into_iter().collect();
        let mut tree: alloc::collections::BTreeSet<(usize, i32)> = Default::default();
        while let Some(s) = queue.pop_front() {
            let prefix = path[s].clone().expect("visited");
            for (&l, &t) in &self.next[s] {
                if path[t].is_none() {
                    tree.insert((s, l));
                    tree.insert((t, -l));
                    path[t] = Some(prefix.concat(&Word::from_letters([l])));
                    queue.push_back(t);
                }
            }
        }
        let mut out = Vec::new();
        for s in 0..n {
            for (&l, &t) in &self.next[s] {
                if l < 0 || tree.contains(&(s, l)) {
                    continue;
                }
                let to_s = path[s].clone().expect("connected");
                let from_t = path[t].clone().expect("connected");
                let w = to_s.concat(&Word::from_letters([l])).concat(&from_t.inverse());
                if !w.is_empty() {
                    out.push(w);
                }
            }
        }
        out
    }
}

/// Exact membership of `w` in the subgroup of the free group of rank
/// `rank` generated by `subgroup_gens`.
pub fn fold_membership(rank: usize, subgroup_gens: &[Word], w: &Word) -> bool {
    fold(rank, subgroup_gens).contains(w)
}

/// The intersection of two finitely generated subgroups of a free group,
/// computed on the product of their folded graphs (the pullback core).
pub fn intersect_subgroups(rank: usize, a: &SubgroupGraph, b: &SubgroupGraph) -> SubgroupGraph {
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    ids.insert((a.base, b.base), 0);
    let mut next: Vec<BTreeMap<i32, usize>> = alloc::vec![BTreeMap::new()];
    let mut queue: alloc::collections::VecDeque<(usize, usize)> = [(a.base, b.base)].into_iter().collect();
    while let Some((sa, sb)) = queue.pop_front() {
        let s = ids[&(sa, sb)];
        for (&l, &ta) in &a.next[sa] {
            if let Some(&tb) = b.next[sb].get(&l) {
                let t = *ids.entry((ta, tb)).or_insert_with(|| {
                    next.push(BTreeMap::new());
                    queue.push_back((ta, tb));
                    next.len() - 1
                });
                next[s].insert(l, t);
            }
        }
    }
    SubgroupGraph { rank, base: 0, next }
}
