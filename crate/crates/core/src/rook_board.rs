//! The staircase board `B_n`, attack predicates and the two bijections
//! between non-attacking placements and structures.
//!
//! Partition model: rooks may not share a row or a column; rook `(i, j)`
//! joins `i` and `j` into one block. Permutation model: rooks may not share
//! a column; rooks are read in increasing column order and rook `(i, j)`
//! inserts `j` just before `i` in `i`'s cycle, so `sigma(j) = i`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::structures::{CyclePermutation, SetPartition, SpectrumVector, Structure};
use crate::Model;

/// Board square `(row, col)` with `row < col`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square {
    pub row: usize,
    pub col: usize,
}

impl Square {
    pub fn new(row: usize, col: usize) -> Self {
        Square { row, col }
    }

    pub fn is_on_board(&self, n: usize) -> bool {
        1 <= self.row && self.row < self.col && self.col <= n
    }

    /// Position in row-major order, starting at 0.
    pub fn index(&self, n: usize) -> usize {
        let i = self.row - 1;
        i * (2 * n - i - 1) / 2 + (self.col - self.row - 1)
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Labeled rooks on `B_n`; rook `a` is `rooks[a]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RookPlacement {
    n: usize,
    rooks: Vec<Square>,
}

impl RookPlacement {
    /// Checks every square lies on `B_n`. Repeated squares are allowed.
    pub fn new(n: usize, rooks: Vec<Square>) -> Result<Self> {
        if let Some(bad) = rooks.iter().find(|s| !s.is_on_board(n)) {
            return Err(Error::domain("placement", format!("square {bad} is not on B_{n}")));
        }
        Ok(RookPlacement { n, rooks })
    }

    pub fn empty(n: usize) -> Self {
        RookPlacement { n, rooks: Vec::new() }
    }

    pub(crate) fn from_parts_unchecked(n: usize, rooks: Vec<Square>) -> Self {
        RookPlacement { n, rooks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.rooks.len()
    }

    pub fn rooks(&self) -> &[Square] {
        &self.rooks
    }
}

impl fmt::Display for RookPlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.n)?;
        for (i, s) in self.rooks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for RookPlacement {
    type Err = Error;

    /// Parses `n;(i1,j1),(i2,j2),...`; the list may be empty.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::parse("placement", reason);
        let (n_str, rest) = s
            .trim()
            .split_once(';')
            .ok_or_else(|| bad(format!("missing ';' in {s:?}")))?;
        let n: usize = n_str
            .trim()
            .parse()
            .map_err(|e| bad(format!("board size {n_str:?}: {e}")))?;
        let mut rooks = Vec::new();
        let mut rest = rest.trim();
        while !rest.is_empty() {
            let inner = rest
                .strip_prefix('(')
                .ok_or_else(|| bad(format!("expected '(' at {rest:?}")))?;
            let close = inner
                .find(')')
                .ok_or_else(|| bad(format!("unclosed square at {rest:?}")))?;
            let (a, b) = inner[..close]
                .split_once(',')
                .ok_or_else(|| bad(format!("expected 'i,j' at {rest:?}")))?;
            let row = a.trim().parse().map_err(|e| bad(format!("row {a:?}: {e}")))?;
            let col = b.trim().parse().map_err(|e| bad(format!("column {b:?}: {e}")))?;
            rooks.push(Square::new(row, col));
            rest = inner[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
            }
        }
        RookPlacement::new(n, rooks)
    }
}

/// Kind of coincidence between an ordered pair of rooks `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    /// `row(a) = row(b)`
    RR,
    /// `col(a) = col(b)`
    CC,
    /// `col(a) = row(b)`
    RC,
    /// `row(a) = col(b)`
    CR,
}

impl Mark {
    pub const ALL: [Mark; 4] = [Mark::RR, Mark::CC, Mark::RC, Mark::CR];

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

/// Set of [`Mark`]s holding for one pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct MarkSet(u8);

impl MarkSet {
    pub fn contains(self, m: Mark) -> bool {
        self.0 & m.bit() != 0
    }

    pub fn insert(&mut self, m: Mark) {
        self.0 |= m.bit();
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Mark> {
        Mark::ALL.into_iter().filter(move |&m| self.contains(m))
    }
}

impl FromIterator<Mark> for MarkSet {
    fn from_iter<I: IntoIterator<Item = Mark>>(iter: I) -> Self {
        let mut set = MarkSet::default();
        for m in iter {
            set.insert(m);
        }
        set
    }
}

/// All `C(n, 2)` squares, row-major.
pub fn board_squares(n: usize) -> Vec<Square> {
    (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| Square::new(i, j)))
        .collect()
}

/// Marks holding for the pair `(a, b)`, `a` being the lower-labeled rook.
pub fn classify_pair(a: Square, b: Square) -> MarkSet {
    let mut set = MarkSet::default();
    if a.row == b.row {
        set.insert(Mark::RR);
    }
    if a.col == b.col {
        set.insert(Mark::CC);
    }
    if a.col == b.row {
        set.insert(Mark::RC);
    }
    if a.row == b.col {
        set.insert(Mark::CR);
    }
    set
}

/// Whether two rooks attack in `model`. Repeated squares always attack.
pub fn has_attack(placement: &RookPlacement, model: Model) -> bool {
    let n = placement.n;
    let mut col_used = vec![false; n + 1];
    let mut row_used = vec![false; n + 1];
    for s in &placement.rooks {
        if std::mem::replace(&mut col_used[s.col], true) {
            return true;
        }
        if model == Model::Partition && std::mem::replace(&mut row_used[s.row], true) {
            return true;
        }
    }
    false
}

/// Structure encoded by a non-attacking placement.
pub fn decode(placement: &RookPlacement, model: Model) -> Result<Structure> {
    Ok(match model {
        Model::Partition => Structure::Partition(decode_partition(placement)?),
        Model::Permutation => Structure::Permutation(decode_permutation(placement)?),
    })
}

pub fn decode_partition(placement: &RookPlacement) -> Result<SetPartition> {
    if has_attack(placement, Model::Partition) {
        return Err(Error::AttackViolation(Model::Partition));
    }
    let n = placement.n;
    let mut parent: Vec<usize> = (0..=n).collect();
    for s in &placement.rooks {
        let (a, b) = (find(&mut parent, s.row), find(&mut parent, s.col));
        parent[a.max(b)] = a.min(b);
    }
    let labels: Vec<usize> = (1..=n).map(|x| find(&mut parent, x)).collect();
    Ok(SetPartition::from_labels(&labels))
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn decode_permutation(placement: &RookPlacement) -> Result<CyclePermutation> {
    if has_attack(placement, Model::Permutation) {
        return Err(Error::AttackViolation(Model::Permutation));
    }
    let succ = permutation_successors(placement.n, &placement.rooks);
    Ok(CyclePermutation::from_successors(&succ).expect("decode yields a bijection"))
}

/// Successor map (1-based values) for column-distinct rooks.
fn permutation_successors(n: usize, rooks: &[Square]) -> Vec<usize> {
    let mut sorted: Vec<Square> = rooks.to_vec();
    sorted.sort_unstable_by_key(|s| s.col);
    let mut succ: Vec<usize> = (0..=n).collect();
    let mut pred: Vec<usize> = (0..=n).collect();
    for s in sorted {
        let (i, j) = (s.row, s.col);
        let p = pred[i];
        succ[p] = j;
        pred[j] = p;
        succ[j] = i;
        pred[i] = j;
    }
    succ.remove(0);
    succ
}

/// Canonical placement for a structure, rooks in row-major order.
pub fn encode(structure: &Structure) -> RookPlacement {
    match structure {
        Structure::Partition(p) => encode_partition(p),
        Structure::Permutation(p) => encode_permutation(p),
    }
}

/// Each block `a1 < a2 < ... < am` becomes the chain `(a1,a2), ..., (a_{m-1},am)`.
pub fn encode_partition(partition: &SetPartition) -> RookPlacement {
    let mut rooks: Vec<Square> = partition
        .blocks()
        .iter()
        .flat_map(|b| b.windows(2).map(|w| Square::new(w[0], w[1])))
        .collect();
    rooks.sort_unstable();
    RookPlacement::from_parts_unchecked(partition.n(), rooks)
}

/// Repeatedly removes the largest element `j` that is not its cycle's
/// minimum, emitting `(sigma(j), j)`.
pub fn encode_permutation(perm: &CyclePermutation) -> RookPlacement {
    let n = perm.n();
    let mut succ = vec![0usize; n + 1];
    let mut pred = vec![0usize; n + 1];
    let mut is_min = vec![false; n + 1];
    for cycle in perm.cycles() {
        is_min[cycle[0]] = true;
        for (i, &x) in cycle.iter().enumerate() {
            let y = cycle[(i + 1) % cycle.len()];
            succ[x] = y;
            pred[y] = x;
        }
    }
    let mut rooks = Vec::new();
    for j in (1..=n).rev() {
        if is_min[j] {
            continue;
        }
        let (i, p) = (succ[j], pred[j]);
        rooks.push(Square::new(i, j));
        succ[p] = i;
        pred[i] = p;
    }
    rooks.sort_unstable();
    RookPlacement::from_parts_unchecked(n, rooks)
}

/// Spectrum of the decoded structure in `O(r log r)`, without building it.
///
/// Only the elements touched by rooks are relabeled and decoded; every
/// untouched element is a singleton block or fixed point.
pub fn spectrum_of_placement(placement: &RookPlacement, model: Model) -> Result<SpectrumVector> {
    if has_attack(placement, model) {
        return Err(Error::AttackViolation(model));
    }
    let mut touched: Vec<usize> = placement.rooks.iter().flat_map(|s| [s.row, s.col]).collect();
    touched.sort_unstable();
    touched.dedup();
    let m = touched.len();
    let local = |x: usize| touched.binary_search(&x).expect("touched element") + 1;
    let rooks: Vec<Square> = placement
        .rooks
        .iter()
        .map(|s| Square::new(local(s.row), local(s.col)))
        .collect();
    let mut sizes: Vec<usize> = match model {
        Model::Partition => {
            let mut parent: Vec<usize> = (0..=m).collect();
            for s in &rooks {
                let (a, b) = (find(&mut parent, s.row), find(&mut parent, s.col));
                parent[a.max(b)] = a.min(b);
            }
            let mut size = vec![0usize; m + 1];
            for x in 1..=m {
                size[find(&mut parent, x)] += 1;
            }
            size.into_iter().filter(|&s| s > 0).collect()
        }
        Model::Permutation => {
            let succ = permutation_successors(m, &rooks);
            let mut seen = vec![false; m + 1];
            let mut lens = Vec::new();
            for start in 1..=m {
                let mut len = 0;
                let mut x = start;
                while !seen[x] {
                    seen[x] = true;
                    len += 1;
                    x = succ[x - 1];
                }
                if len > 0 {
                    lens.push(len);
                }
            }
            lens
        }
    };
    sizes.extend(std::iter::repeat(1).take(placement.n - m));
    Ok(SpectrumVector::from_sizes(sizes))
}

/// Calls `visit` with every non-attacking set of `r` squares (as a sorted
/// placement) and returns how many there were.
pub fn for_each_nonattacking_placement(n: usize, r: usize, model: Model, mut visit: impl FnMut(&RookPlacement)) -> u64 {
    let squares = board_squares(n);
    let mut rows = vec![false; n + 1];
    let mut cols = vec![false; n + 1];
    let mut chosen = RookPlacement::empty(n);
    let mut count = 0;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        squares: &[Square],
        start: usize,
        r: usize,
        model: Model,
        rows: &mut [bool],
        cols: &mut [bool],
        chosen: &mut RookPlacement,
        count: &mut u64,
        visit: &mut dyn FnMut(&RookPlacement),
    ) {
        if chosen.rooks.len() == r {
            *count += 1;
            visit(chosen);
            return;
        }
        let need = r - chosen.rooks.len();
        for idx in start..squares.len() {
            if squares.len() - idx < need {
                break;
            }
            let s = squares[idx];
            if cols[s.col] || (model == Model::Partition && rows[s.row]) {
                continue;
            }
            cols[s.col] = true;
            let row_was = rows[s.row];
            rows[s.row] = true;
            chosen.rooks.push(s);
            rec(squares, idx + 1, r, model, rows, cols, chosen, count, visit);
            chosen.rooks.pop();
            rows[s.row] = row_was;
            cols[s.col] = false;
        }
    }
    rec(
        &squares,
        0,
        r,
        model,
        &mut rows,
        &mut cols,
        &mut chosen,
        &mut count,
        &mut visit,
    );
    count
}

/// Number of non-attacking unlabeled placements of `r` rooks.
pub fn count_nonattacking(n: usize, r: usize, model: Model) -> u64 {
    for_each_nonattacking_placement(n, r, model, |_| {})
}
