//! Full and partial matching of symbol sequences.
//!
//! [`find_matches`] compares two flat sequences. Candidate paths run through
//! the lattice of equal-name cells; only maximal paths (no further cell can
//! be slotted in anywhere) are generated, ranked by credit.
//!
//! [`find_poset_matches`] compares a pattern against the columns of an
//! alignment, whose order is only partial: two columns may be unordered when
//! no row links them. A match is acceptable when merging it keeps the column
//! order acyclic.

use std::cmp::Ordering;

use fixedbitset::FixedBitSet;

use crate::costs::CostTable;
use crate::grammar::Symbol;

/// A set of matched index pairs. For [`find_matches`] pairs increase in
/// both coordinates; for [`find_poset_matches`] they increase in the
/// driver coordinate only.
#[derive(Debug, Clone, PartialEq)]
pub struct HitSequence {
    pub pairs: Vec<(usize, usize)>,
    pub credit: f64,
}

impl HitSequence {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Consecutive pairs that are not diagonal neighbours.
    pub fn gaps(&self) -> usize {
        gaps(&self.pairs)
    }

    /// The same hits with coordinates exchanged.
    pub fn swapped(&self) -> HitSequence {
        HitSequence { pairs: self.pairs.iter().map(|&(i, j)| (j, i)).collect(), credit: self.credit }
    }
}

fn gaps(pairs: &[(usize, usize)]) -> usize {
    pairs.windows(2).filter(|w| w[1].0 != w[0].0 + 1 || w[1].1 != w[0].1 + 1).count()
}

fn rank(a_credit: f64, a_gaps: usize, a: &[(usize, usize)], b_credit: f64, b_gaps: usize, b: &[(usize, usize)]) -> Ordering {
    b_credit.total_cmp(&a_credit).then(a_gaps.cmp(&b_gaps)).then_with(|| a.cmp(b))
}

#[derive(Clone)]
struct Partial {
    cells: Vec<u32>,
    pairs: Vec<(usize, usize)>,
    credit: f64,
    gaps: usize,
}

impl Partial {
    fn order(&self, other: &Partial) -> Ordering {
        rank(self.credit, self.gaps, &self.pairs, other.credit, other.gaps, &other.pairs)
    }
}

/// Ranked maximal matches between `driver` and `target`.
///
/// Paths are kept per lattice cell, at most `beam` of them; with `beam` at
/// least `max_results` the returned list is the exact top of the ranking
/// (credit desc, gaps asc, pairs lexicographic).
pub fn find_matches(
    driver: &[Symbol],
    target: &[Symbol],
    costs: &CostTable,
    beam: usize,
    max_results: usize,
) -> Vec<HitSequence> {
    let (n, m) = (driver.len(), target.len());
    if n == 0 || m == 0 || beam == 0 || max_results == 0 {
        return Vec::new();
    }
    let mut cells = Vec::new();
    for (i, d) in driver.iter().enumerate() {
        for (j, t) in target.iter().enumerate() {
            if d == t {
                cells.push((i, j));
            }
        }
    }
    if cells.is_empty() {
        return Vec::new();
    }
    // prefix[i][j] = match cells in [0, i) x [0, j)
    let mut prefix = vec![vec![0u32; m + 1]; n + 1];
    for i in 0..n {
        for j in 0..m {
            let hit = (driver[i] == target[j]) as u32;
            prefix[i + 1][j + 1] = prefix[i][j + 1] + prefix[i + 1][j] - prefix[i][j] + hit;
        }
    }
    // match cells in the half-open box [i0, i1) x [j0, j1)
    let boxed = |i0: usize, i1: usize, j0: usize, j1: usize| -> u32 {
        if i0 >= i1 || j0 >= j1 {
            return 0;
        }
        prefix[i1][j1] + prefix[i0][j0] - prefix[i0][j1] - prefix[i1][j0]
    };

    let cap = beam.max(max_results);
    let mut lists: Vec<Vec<Partial>> = Vec::with_capacity(cells.len());
    let mut finished: Vec<Partial> = Vec::new();
    for (k, &(i, j)) in cells.iter().enumerate() {
        let credit = costs.cost(driver[i]);
        let mut here: Vec<Partial> = Vec::new();
        if boxed(0, i, 0, j) == 0 {
            here.push(Partial { cells: vec![k as u32], pairs: vec![(i, j)], credit, gaps: 0 });
        }
        for (p, &(pi, pj)) in cells[..k].iter().enumerate() {
            if pi >= i || pj >= j || boxed(pi + 1, i, pj + 1, j) != 0 {
                continue;
            }
            let step_gap = (i != pi + 1 || j != pj + 1) as usize;
            for prev in &lists[p] {
                let mut cells_next = prev.cells.clone();
                cells_next.push(k as u32);
                let mut pairs = prev.pairs.clone();
                pairs.push((i, j));
                here.push(Partial { cells: cells_next, pairs, credit: prev.credit + credit, gaps: prev.gaps + step_gap });
            }
        }
        here.sort_by(Partial::order);
        here.truncate(cap);
        if boxed(i + 1, n, j + 1, m) == 0 {
            finished.extend(here.iter().cloned());
        }
        lists.push(here);
    }
    finished.sort_by(Partial::order);
    finished.truncate(max_results);
    finished.into_iter().map(|p| HitSequence { pairs: p.pairs, credit: p.credit }).collect()
}

/// The column order of an alignment as seen by the matcher.
#[derive(Debug, Clone)]
pub struct ColumnOrder {
    names: Vec<Symbol>,
    /// `ancestors[c]` holds every column that must precede `c`.
    ancestors: Vec<FixedBitSet>,
    /// Columns that already hold an Old ID symbol.
    id_held: Vec<bool>,
}

impl ColumnOrder {
    /// `preds[c]` lists direct predecessors of column `c`; columns must be
    /// given in a topological order (every predecessor index below `c`).
    pub fn new(names: Vec<Symbol>, preds: &[Vec<usize>], id_held: Vec<bool>) -> Self {
        let n = names.len();
        assert_eq!(preds.len(), n);
        assert_eq!(id_held.len(), n);
        let mut ancestors: Vec<FixedBitSet> = Vec::with_capacity(n);
        for (c, ps) in preds.iter().enumerate() {
            let mut set = FixedBitSet::with_capacity(n);
            for &p in ps {
                assert!(p < c, "column predecessors must come first");
                set.insert(p);
                set.union_with(&ancestors[p]);
            }
            ancestors.push(set);
        }
        ColumnOrder { names, ancestors, id_held }
    }

    /// A plain sequence: every column precedes the next.
    pub fn chain(names: Vec<Symbol>) -> Self {
        let preds: Vec<Vec<usize>> = (0..names.len()).map(|c| if c == 0 { vec![] } else { vec![c - 1] }).collect();
        let id_held = vec![false; names.len()];
        Self::new(names, &preds, id_held)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[Symbol] {
        &self.names
    }

    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.ancestors[b].contains(a)
    }
}

#[derive(Clone)]
struct PosetState {
    pairs: Vec<(usize, usize)>,
    credit: f64,
    /// Columns a later driver symbol may no longer use.
    blocked: FixedBitSet,
    gaps: usize,
}

impl PosetState {
    fn order(&self, other: &PosetState) -> Ordering {
        other
            .credit
            .total_cmp(&self.credit)
            .then(self.blocked.count_ones(..).cmp(&other.blocked.count_ones(..)))
            .then(self.gaps.cmp(&other.gaps))
            .then_with(|| self.pairs.cmp(&other.pairs))
    }
}

/// Matches a pattern (`driver`, with its ID flags) against alignment
/// columns. Pairs are `(column, driver position)`, sorted by driver
/// position. A driver ID symbol never lands in a column that already holds
/// an Old ID symbol.
pub fn find_poset_matches(
    driver: &[Symbol],
    driver_ids: &[bool],
    target: &ColumnOrder,
    costs: &CostTable,
    beam: usize,
    max_results: usize,
) -> Vec<HitSequence> {
    assert_eq!(driver.len(), driver_ids.len());
    if driver.is_empty() || target.is_empty() || beam == 0 || max_results == 0 {
        return Vec::new();
    }
    let width = target.len();
    let mut states = vec![PosetState { pairs: Vec::new(), credit: 0.0, blocked: FixedBitSet::with_capacity(width), gaps: 0 }];
    for (j, &sym) in driver.iter().enumerate() {
        let cost = costs.cost(sym);
        let mut next = Vec::with_capacity(states.len() * 2);
        for state in &states {
            for c in 0..width {
                if target.names[c] != sym || state.blocked.contains(c) || (driver_ids[j] && target.id_held[c]) {
                    continue;
                }
                let mut blocked = state.blocked.clone();
                blocked.insert(c);
                blocked.union_with(&target.ancestors[c]);
                let gap = match state.pairs.last() {
                    Some(&(pc, pj)) => (pj + 1 != j || !target.ancestors[c].contains(pc)) as usize,
                    None => 0,
                };
                let mut pairs = state.pairs.clone();
                pairs.push((c, j));
                next.push(PosetState { pairs, credit: state.credit + cost, blocked, gaps: state.gaps + gap });
            }
            next.push(state.clone());
        }
        next.sort_by(PosetState::order);
        next.truncate(beam);
        states = next;
    }
    states.retain(|s| !s.pairs.is_empty());
    states.sort_by(PosetState::order);
    let mut out: Vec<PosetState> = Vec::new();
    for s in states {
        // a strict subset of a better hit adds nothing the better hit lacks
        if out.iter().any(|o| is_subset(&s.pairs, &o.pairs)) {
            continue;
        }
        out.push(s);
        if out.len() == max_results {
            break;
        }
    }
    out.into_iter().map(|s| HitSequence { pairs: s.pairs, credit: s.credit }).collect()
}

fn is_subset(small: &[(usize, usize)], big: &[(usize, usize)]) -> bool {
    small.len() < big.len() && small.iter().all(|p| big.contains(p))
}
