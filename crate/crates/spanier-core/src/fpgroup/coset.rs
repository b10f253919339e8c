use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::presentation::Presentation;
use super::word::Word;

/// Outcome of a coset enumeration.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TableStatus {
    /// The table closed: rows are exactly the cosets of the subgroup.
    Complete,
    /// The live-coset budget was exhausted before the table closed.
    BudgetExceeded { live: usize },
}

/// A (possibly partial) coset table. Row 0 is the subgroup coset; column
/// `2g` is the action of generator `g`, column `2g + 1` of its inverse.
#[derive(Clone, Debug)]
pub struct CosetTable {
    rows: Vec<Vec<Option<usize>>>,
    pub status: TableStatus,
}

impl CosetTable {
    pub fn cosets(&self) -> usize {
        self.rows.len()
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.status, TableStatus::Complete)
    }

    fn column(letter: i32) -> usize {
        let g = (letter.unsigned_abs() as usize) - 1;
        if letter > 0 {
            2 * g
        } else {
            2 * g + 1
        }
    }

    /// Single-letter action.
    pub fn step(&self, coset: usize, letter: i32) -> Option<usize> {
        self.rows.get(coset)?.get(Self::column(letter)).copied().flatten()
    }

    /// Right action of a word; `None` if the track leaves the defined part
    /// of a partial table.
    pub fn act(&self, coset: usize, w: &Word) -> Option<usize> {
        let mut at = coset;
        for &l in w.letters() {
            at = self.step(at, l)?;
        }
        Some(at)
    }
}

const NO_ENTRY: Option<usize> = None;

struct Enumerator {
    ncols: usize,
    table: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    alive: Vec<bool>,
    live: usize,
    budget: usize,
    exhausted: bool,
    pending: VecDeque<(usize, usize)>,
}

impl Enumerator {
    fn new(ncols: usize, budget: usize) -> Self {
        Enumerator {
            ncols,
            table: Vec::new(),
            parent: Vec::new(),
            alive: Vec::new(),
            live: 0,
            budget,
            exhausted: false,
            pending: VecDeque::new(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn lookup(&mut self, a: usize, c: usize) -> Option<usize> {
        let a = self.find(a);
        match self.table[a][c] {
            Some(t) => {
                let t = self.find(t);
                self.table[a][c] = Some(t);
                Some(t)
            }
            None => None,
        }
    }

    fn new_coset(&mut self) -> Option<usize> {
        if self.live >= self.budget {
            self.exhausted = true;
            return None;
        }
        let id = self.table.len();
        self.table.push(alloc::vec![NO_ENTRY; self.ncols]);
        self.parent.push(id);
        self.alive.push(true);
        self.live += 1;
        Some(id)
    }

    /// Records `a · c = b` (and the inverse entry), queueing coincidences
    /// when the table already disagrees.
    fn deduce(&mut self, a: usize, c: usize, b: usize) {
        let a = self.find(a);
        let b = self.find(b);
        match self.lookup(a, c) {
            Some(t) if t == b => {}
            Some(t) => self.pending.push_back((t, b)),
            None => self.table[a][c] = Some(b),
        }
        match self.lookup(b, c ^ 1) {
            Some(t) if t == a => {}
            Some(t) => self.pending.push_back((t, a)),
            None => self.table[b][c ^ 1] = Some(a),
        }
        self.process_pending();
    }

    fn process_pending(&mut self) {
        while let Some((x, y)) = self.pending.pop_front() {
            let x = self.find(x);
            let y = self.find(y);
            if x == y {
                continue;
            }
            let (keep, drop) = if x < y { (x, y) } else { (y, x) };
            self.parent[drop] = keep;
            self.alive[drop] = false;
            self.live -= 1;
            for c in 0..self.ncols {
                let moved = self.table[drop][c];
                if let Some(t) = moved {
                    let t = self.find(t);
                    let existing = self.table[keep][c];
                    match existing {
                        Some(u) => {
                            let u = self.find(u);
                            if u != t {
                                self.pending.push_back((u, t));
                            }
                        }
                        None => self.table[keep][c] = Some(t),
                    }
                }
            }
        }
    }

    /// Traces the cyclic word `w` at coset `a`. Returns true when the call
    /// changed the table (deduction, definition or merge). With
    /// `fill == false` only deductions and coincidences are performed.
    fn scan(&mut self, a: usize, w: &[i32], fill: bool) -> bool {
        let a = self.find(a);
        let n = w.len();
        if n == 0 {
            return false;
        }
        let mut f = a;
        let mut i = 0;
        while i < n {
            match self.lookup(f, CosetTable::column(w[i])) {
                Some(t) => {
                    f = t;
                    i += 1;
                }
                None => break,
            }
        }
        if i == n {
            let a = self.find(a);
            let f = self.find(f);
            if f != a {
                self.pending.push_back((f, a));
                self.process_pending();
                return true;
            }
            return false;
        }
        let mut b = self.find(a);
        let mut j = n;
        while j > i {
            match self.lookup(b, CosetTable::column(w[j - 1]) ^ 1) {
                Some(t) => {
                    b = t;
                    j -= 1;
                }
                None => break,
            }
        }
        if j == i {
            let f = self.find(f);
            let b = self.find(b);
            if f != b {
                self.pending.push_back((f, b));
                self.process_pending();
                return true;
            }
            return false;
        }
        if j == i + 1 {
            self.deduce(f, CosetTable::column(w[i]), b);
            return true;
        }
        if !fill {
            return false;
        }
        match self.new_coset() {
            Some(c) => {
                self.deduce(f, CosetTable::column(w[i]), c);
                true
            }
            None => false,
        }
    }

    fn scan_fill(&mut self, a: usize, w: &[i32]) {
        loop {
            let at = self.find(a);
            if !self.scan(at, w, true) {
                break;
            }
        }
    }

    /// Deduction-only pass over the whole table; returns true when it freed
    /// room under the budget.
    fn lookahead(&mut self, relators: &[Vec<i32>]) -> bool {
        loop {
            let mut progress = false;
            for a in 0..self.table.len() {
                if !self.alive[a] {
                    continue;
                }
                for r in relators {
                    if self.alive[a] {
                        progress |= self.scan(a, r, false);
                    }
                }
            }
            if !progress {
                break;
            }
        }
        if self.live < self.budget {
            self.exhausted = false;
            true
        } else {
            false
        }
    }
}

/// HLT-style coset enumeration with lookahead, budgeted by live cosets.
///
/// On completion the rows form the genuine permutation action of the group
/// presented by `p` on the cosets of the subgroup generated by
/// `subgroup_gens`, with the subgroup itself at row 0; the row count is the
/// subgroup index. Budget exhaustion is reported in the status, not as an
/// error.
pub fn todd_coxeter(p: &Presentation, subgroup_gens: &[Word], budget: usize) -> CosetTable {
    let ncols = 2 * p.rank().max(1);
    let relators: Vec<Vec<i32>> =
        p.relators.iter().filter(|r| !r.is_empty()).map(|r| r.letters().to_vec()).collect();
    let subwords: Vec<Vec<i32>> =
        subgroup_gens.iter().filter(|h| !h.is_empty()).map(|h| h.letters().to_vec()).collect();

    let mut e = Enumerator::new(ncols, budget.max(1));
    e.new_coset().expect("budget is at least one");
    for h in &subwords {
        e.scan_fill(0, h);
        if e.exhausted && !e.lookahead(&relators) {
            break;
        }
    }

    let mut idx = 0;
    'main: while idx < e.table.len() && !e.exhausted {
        if !e.alive[idx] {
            idx += 1;
            continue;
        }
        let mut ri = 0;
        while ri < relators.len() {
            if !e.alive[idx] {
                break;
            }
            e.scan_fill(idx, &relators[ri]);
            if e.exhausted {
                if e.lookahead(&relators) {
                    continue;
                }
                break 'main;
            }
            ri += 1;
        }
        if !e.alive[idx] {
            idx += 1;
            continue;
        }
        let mut c = 0;
        while c < ncols {
            if !e.alive[idx] {
                break;
            }
            if e.lookup(idx, c).is_some() {
                c += 1;
                continue;
            }
            match e.new_coset() {
                Some(nc) => {
                    e.deduce(idx, c, nc);
                    c += 1;
                }
                None => {
                    if e.lookahead(&relators) {
                        continue;
                    }
                    break 'main;
                }
            }
        }
        idx += 1;
    }

    // compress: renumber live classes with the subgroup class first
    let root = e.find(0);
    let mut order: Vec<usize> = alloc::vec![root];
    for i in 0..e.table.len() {
        if e.alive[i] && i != root {
            order.push(i);
        }
    }
    let mut renumber = alloc::collections::BTreeMap::new();
    for (new, &old) in order.iter().enumerate() {
        renumber.insert(old, new);
    }
    let mut rows = Vec::with_capacity(order.len());
    let mut complete = !e.exhausted;
    for &old in &order {
        let mut row = Vec::with_capacity(ncols);
        for c in 0..ncols {
            match e.lookup(old, c) {
                Some(t) => row.push(Some(renumber[&t])),
                None => {
                    row.push(None);
                    complete = false;
                }
            }
        }
        rows.push(row);
    }
    let live = rows.len();
    CosetTable {
        rows,
        status: if complete { TableStatus::Complete } else { TableStatus::BudgetExceeded { live } },
    }
}
