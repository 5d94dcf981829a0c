//! SP-multiple-alignments.
//!
//! Row 0 holds the New pattern (when the alignment has one) and every other
//! row an Old pattern. A column maps some rows to one position each; a
//! column with two or more entries is a matched column and all of its
//! entries name the same symbol. Columns are stored in one linear order that
//! is consistent with every row, although the order between columns that no
//! row links is arbitrary (a-before-b for unified children).

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{Origin, PatternId, SpPattern, Symbol};
use crate::matcher::ColumnOrder;

pub type AlignmentId = usize;

/// One symbol instance: `pos` within the pattern on `row`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Entry {
    pub row: usize,
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Leaf,
    Unified { a: AlignmentId, b: AlignmentId, hits: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("alignment leaves need a New pattern")]
    WrongOrigin,
    #[error("no hits to unify on")]
    EmptyHits,
    #[error("hit {0:?} is outside the parents")]
    HitOutOfRange((usize, usize)),
    #[error("both parents contain a New row")]
    TwoNewRows,
    #[error("merged column would hold different symbols")]
    NameConflict,
    #[error("merge forces a row's symbols out of order")]
    OrderViolation,
    #[error("merged column would hold two Old ID symbols")]
    IdClash,
    #[error("a pattern position would be matched with itself")]
    SelfMatch,
}

impl UnifyError {
    /// Short machine-friendly tag.
    pub fn tag(&self) -> &'static str {
        match self {
            UnifyError::WrongOrigin => "wrong_origin",
            UnifyError::EmptyHits => "empty_hits",
            UnifyError::HitOutOfRange(_) => "hit_out_of_range",
            UnifyError::TwoNewRows => "two_new_rows",
            UnifyError::NameConflict => "name_conflict",
            UnifyError::OrderViolation => "order_violation",
            UnifyError::IdClash => "id_clash",
            UnifyError::SelfMatch => "self_match",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoRows,
    /// A New row anywhere but row 0, or row 0 Old while a New row exists.
    RowOrigin { row: usize },
    EmptyColumn { column: usize },
    EntryOutOfRange { column: usize },
    NameConflict { column: usize },
    /// Row positions do not appear exactly once each, left to right.
    ProjectionGap { row: usize },
    IdClash { column: usize },
}

/// Flattened view: one symbol per column, in column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flattened {
    pub symbols: Vec<Symbol>,
    pub source_columns: Vec<usize>,
}

/// Identity of an alignment up to column interleaving and ids. The New
/// row appears as `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructuralKey {
    pub rows: Vec<Option<PatternId>>,
    pub matched: Vec<Vec<(Option<PatternId>, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    id: AlignmentId,
    rows: Vec<Arc<SpPattern>>,
    columns: Vec<Vec<Entry>>,
    provenance: Provenance,
}

impl Alignment {
    /// The one-row alignment a search starts from.
    pub fn from_pattern(new: &SpPattern, id: AlignmentId) -> Result<Self, UnifyError> {
        if !new.is_new() {
            return Err(UnifyError::WrongOrigin);
        }
        Ok(Self::leaf(Arc::new(new.clone()), id))
    }

    /// A one-row alignment over any pattern; Old leaves are what a search
    /// pairs alignments with.
    pub fn leaf(pattern: Arc<SpPattern>, id: AlignmentId) -> Self {
        let columns = (0..pattern.len()).map(|pos| vec![Entry { row: 0, pos }]).collect();
        Alignment { id, rows: vec![pattern], columns, provenance: Provenance::Leaf }
    }

    /// Builds an alignment without checking it; see [`Alignment::validate`].
    pub fn from_parts(id: AlignmentId, rows: Vec<Arc<SpPattern>>, columns: Vec<Vec<Entry>>, provenance: Provenance) -> Self {
        Alignment { id, rows, columns, provenance }
    }

    pub fn id(&self) -> AlignmentId {
        self.id
    }

    pub(crate) fn with_id(mut self, id: AlignmentId) -> Self {
        self.id = id;
        self
    }

    pub fn rows(&self) -> &[Arc<SpPattern>] {
        &self.rows
    }

    pub fn columns(&self) -> &[Vec<Entry>] {
        &self.columns
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn has_new(&self) -> bool {
        self.rows.first().is_some_and(|r| r.is_new())
    }

    pub fn symbol_at(&self, entry: Entry) -> Symbol {
        self.rows[entry.row].symbols()[entry.pos]
    }

    pub fn is_id_entry(&self, entry: Entry) -> bool {
        let row = &self.rows[entry.row];
        row.origin() == Origin::Old && row.is_id(entry.pos)
    }

    pub fn column_symbol(&self, column: usize) -> Symbol {
        self.symbol_at(self.columns[column][0])
    }

    pub fn is_matched(&self, column: usize) -> bool {
        self.columns[column].len() >= 2
    }

    pub fn matched_column_count(&self) -> usize {
        self.columns.iter().filter(|c| c.len() >= 2).count()
    }

    pub fn contains_pattern(&self, id: PatternId) -> bool {
        self.rows.iter().any(|r| r.origin() == Origin::Old && r.id() == id)
    }

    /// One symbol per column.
    pub fn flatten(&self) -> Flattened {
        Flattened {
            symbols: (0..self.columns.len()).map(|c| self.column_symbol(c)).collect(),
            source_columns: (0..self.columns.len()).collect(),
        }
    }

    /// The partial order the rows impose on the columns.
    pub fn column_order(&self) -> ColumnOrder {
        let mut last_in_row: Vec<Option<usize>> = vec![None; self.rows.len()];
        let mut preds = Vec::with_capacity(self.columns.len());
        let mut id_held = Vec::with_capacity(self.columns.len());
        for (c, col) in self.columns.iter().enumerate() {
            let mut ps = Vec::new();
            for e in col {
                if let Some(p) = last_in_row[e.row] {
                    ps.push(p);
                }
                last_in_row[e.row] = Some(c);
            }
            ps.sort_unstable();
            ps.dedup();
            preds.push(ps);
            id_held.push(col.iter().any(|&e| self.is_id_entry(e)));
        }
        let names = (0..self.columns.len()).map(|c| self.column_symbol(c)).collect();
        ColumnOrder::new(names, &preds, id_held)
    }

    pub fn structural_key(&self) -> StructuralKey {
        let key_of = |r: &SpPattern| if r.is_new() { None } else { Some(r.id()) };
        let mut rows: Vec<_> = self.rows.iter().map(|r| key_of(r)).collect();
        rows.sort_unstable();
        let mut matched: Vec<Vec<_>> = self
            .columns
            .iter()
            .filter(|c| c.len() >= 2)
            .map(|c| {
                let mut v: Vec<_> = c.iter().map(|e| (key_of(&self.rows[e.row]), e.pos)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        matched.sort_unstable();
        StructuralKey { rows, matched }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.rows.is_empty() {
            out.push(Violation::NoRows);
            return out;
        }
        let has_new = self.rows.iter().any(|r| r.is_new());
        for (r, row) in self.rows.iter().enumerate() {
            let misplaced = if r == 0 { has_new && !row.is_new() } else { row.is_new() };
            if misplaced {
                out.push(Violation::RowOrigin { row: r });
            }
        }
        let mut next_pos = vec![0usize; self.rows.len()];
        let mut broken = vec![false; self.rows.len()];
        for (c, col) in self.columns.iter().enumerate() {
            if col.is_empty() {
                out.push(Violation::EmptyColumn { column: c });
                continue;
            }
            if col.iter().any(|e| e.row >= self.rows.len() || e.pos >= self.rows[e.row].len()) {
                out.push(Violation::EntryOutOfRange { column: c });
                continue;
            }
            let name = self.symbol_at(col[0]);
            if col.iter().any(|&e| self.symbol_at(e) != name) {
                out.push(Violation::NameConflict { column: c });
            }
            if col.iter().filter(|&&e| self.is_id_entry(e)).count() > 1 {
                out.push(Violation::IdClash { column: c });
            }
            for e in col {
                if e.pos != next_pos[e.row] {
                    broken[e.row] = true;
                }
                next_pos[e.row] = e.pos + 1;
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if broken[r] || next_pos[r] != row.len() {
                out.push(Violation::ProjectionGap { row: r });
            }
        }
        out
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.rows.iter().map(|r| if r.is_new() { "New".to_string() } else { r.label() }).collect();
        write!(f, "#{} [{}]", self.id, labels.join(" "))
    }
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Merges `b` into `a` along `hits`, pairs of (a column, b column).
///
/// The child holds the rows of `a` followed by those of `b`; if only `b`
/// carries the New row the parents are exchanged so it stays in row 0.
/// Columns are emitted in a topological order that takes a-columns before
/// b-columns whenever the rows leave the choice open.
pub fn unify(a: &Alignment, b: &Alignment, hits: &[(usize, usize)], id: AlignmentId) -> Result<Alignment, UnifyError> {
    let provenance = Provenance::Unified { a: a.id, b: b.id, hits: hits.to_vec() };
    if hits.is_empty() {
        return Err(UnifyError::EmptyHits);
    }
    if let Some(&h) = hits.iter().find(|&&(ca, cb)| ca >= a.columns.len() || cb >= b.columns.len()) {
        return Err(UnifyError::HitOutOfRange(h));
    }
    if a.has_new() && b.has_new() {
        return Err(UnifyError::TwoNewRows);
    }
    let swapped: Vec<(usize, usize)>;
    let (a, b, hits) = if b.has_new() && !a.has_new() {
        swapped = hits.iter().map(|&(x, y)| (y, x)).collect();
        (b, a, swapped.as_slice())
    } else {
        (a, b, hits)
    };

    let na = a.columns.len();
    let total = na + b.columns.len();
    let row_offset = a.rows.len();
    let mut sets = DisjointSet((0..total).collect());
    for &(ca, cb) in hits {
        sets.union(ca, na + cb);
    }

    // group index by root, numbered in node order so a-columns come first
    let mut group_of = vec![usize::MAX; total];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for node in 0..total {
        let root = sets.find(node);
        if group_of[root] == usize::MAX {
            group_of[root] = members.len();
            members.push(Vec::new());
        }
        group_of[node] = group_of[root];
        members[group_of[node]].push(node);
    }

    let rows: Vec<Arc<SpPattern>> = a.rows.iter().chain(b.rows.iter()).cloned().collect();
    let entries_of = |node: usize| -> Vec<Entry> {
        if node < na {
            a.columns[node].clone()
        } else {
            b.columns[node - na].iter().map(|e| Entry { row: e.row + row_offset, pos: e.pos }).collect()
        }
    };
    let mut groups: Vec<Vec<Entry>> = Vec::with_capacity(members.len());
    for nodes in &members {
        let mut entries: Vec<Entry> = nodes.iter().flat_map(|&n| entries_of(n)).collect();
        entries.sort_unstable();
        if nodes.len() > 1 {
            let sym = |e: &Entry| rows[e.row].symbols()[e.pos];
            let name = sym(&entries[0]);
            if entries.iter().any(|e| sym(e) != name) {
                return Err(UnifyError::NameConflict);
            }
            if entries.windows(2).any(|w| w[0].row == w[1].row) {
                return Err(UnifyError::OrderViolation);
            }
            let ids = entries.iter().filter(|e| rows[e.row].origin() == Origin::Old && rows[e.row].is_id(e.pos)).count();
            if ids > 1 {
                return Err(UnifyError::IdClash);
            }
            let mut seen = BTreeSet::new();
            for e in &entries {
                if !seen.insert((rows[e.row].id(), rows[e.row].origin() == Origin::New, e.pos)) {
                    return Err(UnifyError::SelfMatch);
                }
            }
        }
        groups.push(entries);
    }

    // row chains give the edges between groups
    let g = groups.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); g];
    let mut indegree = vec![0usize; g];
    let mut add_chains = |columns: &[Vec<Entry>], base: usize, row_count: usize| {
        let mut last: Vec<Option<usize>> = vec![None; row_count];
        for (c, col) in columns.iter().enumerate() {
            let here = group_of[base + c];
            for e in col {
                if let Some(prev) = last[e.row] {
                    if prev != here {
                        succ[prev].push(here);
                        indegree[here] += 1;
                    }
                }
                last[e.row] = Some(here);
            }
        }
    };
    add_chains(&a.columns, 0, a.rows.len());
    add_chains(&b.columns, na, b.rows.len());

    // the smallest member node decides priority: a-columns in their own
    // order, then b-columns in theirs
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
    for (gi, nodes) in members.iter().enumerate() {
        if indegree[gi] == 0 {
            ready.push(Reverse((nodes[0], gi)));
        }
    }
    let mut order = Vec::with_capacity(g);
    while let Some(Reverse((_, gi))) = ready.pop() {
        order.push(gi);
        for &s in &succ[gi] {
            indegree[s] -= 1;
            if indegree[s] == 0 {
                ready.push(Reverse((members[s][0], s)));
            }
        }
    }
    if order.len() != g {
        return Err(UnifyError::OrderViolation);
    }
    let mut slots: Vec<Option<Vec<Entry>>> = groups.into_iter().map(Some).collect();
    let columns = order.into_iter().map(|gi| slots[gi].take().expect("group emitted once")).collect();
    Ok(Alignment { id, rows, columns, provenance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_symbols;

    fn new_pat(text: &str) -> SpPattern {
        SpPattern::new_pattern(PatternId(100), parse_symbols(text).unwrap()).unwrap()
    }

    fn old_pat(id: u32, text: &str) -> Arc<SpPattern> {
        Arc::new(SpPattern::old(PatternId(id), parse_symbols(text).unwrap()).unwrap())
    }

    fn names(a: &Alignment) -> String {
        crate::grammar::symbols_to_string(&a.flatten().symbols)
    }

    #[test]
    fn leaf_from_new() {
        let a = Alignment::from_pattern(&new_pat("a b"), 0).unwrap();
        assert_eq!(a.rows().len(), 1);
        assert_eq!(a.columns().len(), 2);
        assert!(a.validate().is_empty());
        let sentence = Alignment::from_pattern(&new_pat("f o r t u n e f a v o u r s t h e b r a v e"), 0).unwrap();
        assert_eq!(sentence.columns().len(), 22);
    }

    #[test]
    fn old_pattern_is_wrong_origin() {
        let old = old_pat(0, "X a #X");
        assert_eq!(Alignment::from_pattern(&old, 0), Err(UnifyError::WrongOrigin));
    }

    #[test]
    fn flatten_two_rows() {
        let a = Alignment::from_pattern(&new_pat("A B"), 0).unwrap();
        let b = Alignment::leaf(old_pat(0, "X A B #X"), 1);
        let child = unify(&a, &b, &[(0, 1), (1, 2)], 2).unwrap();
        assert_eq!(names(&child), "X A B #X");
        assert!(child.validate().is_empty());
        assert_eq!(child.matched_column_count(), 2);
    }

    #[test]
    fn noun_row_of_the_parse() {
        let a = Alignment::from_pattern(&new_pat("f o r t u n e f a v o u r s t h e b r a v e"), 0).unwrap();
        let n4 = Alignment::leaf(old_pat(4, "N 4 f o r t u n e #N"), 1);
        let hits: Vec<_> = (0..7).map(|k| (k, k + 2)).collect();
        let child = unify(&a, &n4, &hits, 2).unwrap();
        assert_eq!(names(&child), "N 4 f o r t u n e f a v o u r s t h e b r a v e #N");
        for k in 0..7 {
            assert_eq!(child.columns()[k + 2], vec![Entry { row: 0, pos: k }, Entry { row: 1, pos: k + 2 }]);
        }
    }

    #[test]
    fn single_hit_gives_one_matched_column() {
        let a = Alignment::from_pattern(&new_pat("p q"), 0).unwrap();
        let b = Alignment::leaf(old_pat(0, "Z q #Z"), 1);
        let child = unify(&a, &b, &[(1, 1)], 2).unwrap();
        assert_eq!(child.matched_column_count(), 1);
    }

    #[test]
    fn crossing_hits_are_rejected() {
        let a = Alignment::from_pattern(&new_pat("A B"), 0).unwrap();
        let b = Alignment::leaf(old_pat(0, "X B A #X"), 1);
        assert_eq!(unify(&a, &b, &[(0, 2), (1, 1)], 2), Err(UnifyError::OrderViolation));
    }

    #[test]
    fn other_unify_errors() {
        let a = Alignment::from_pattern(&new_pat("A B"), 0).unwrap();
        let a2 = Alignment::from_pattern(&new_pat("A B"), 1).unwrap();
        assert_eq!(unify(&a, &a2, &[(0, 0)], 2), Err(UnifyError::TwoNewRows));
        let b = Alignment::leaf(old_pat(0, "X A #X"), 1);
        assert_eq!(unify(&a, &b, &[(1, 1)], 2), Err(UnifyError::NameConflict));
        assert_eq!(unify(&a, &b, &[], 2), Err(UnifyError::EmptyHits));
        assert_eq!(unify(&a, &b, &[(5, 0)], 2), Err(UnifyError::HitOutOfRange((5, 0))));
        let c = Alignment::leaf(old_pat(1, "X b #X"), 3);
        assert_eq!(unify(&b, &c, &[(0, 0)], 4), Err(UnifyError::IdClash));
        let b_again = Alignment::leaf(old_pat(0, "X A #X"), 5);
        let child = unify(&a, &b, &[(0, 1)], 6).unwrap();
        assert_eq!(unify(&child, &b_again, &[(1, 1)], 7), Err(UnifyError::SelfMatch));
    }

    #[test]
    fn new_row_stays_first() {
        let a = Alignment::from_pattern(&new_pat("A"), 0).unwrap();
        let b = Alignment::leaf(old_pat(0, "X A #X"), 1);
        let child = unify(&b, &a, &[(1, 0)], 2).unwrap();
        assert!(child.rows()[0].is_new());
        assert!(child.validate().is_empty());
        assert_eq!(child.provenance(), &Provenance::Unified { a: 1, b: 0, hits: vec![(1, 0)] });
    }

    #[test]
    fn unordered_columns_follow_a_first() {
        // New "a", Old "X a #X": X is unordered w.r.t nothing; a-columns first
        let a = Alignment::from_pattern(&new_pat("m a"), 0).unwrap();
        let b = Alignment::leaf(old_pat(0, "X a #X"), 1);
        let child = unify(&a, &b, &[(1, 1)], 2).unwrap();
        assert_eq!(names(&child), "m X a #X");
    }

    #[test]
    fn validate_detects_hand_built_faults() {
        let rows = vec![Arc::new(new_pat("A B")), old_pat(0, "X C #X")];
        let bad_name = Alignment::from_parts(
            9,
            rows.clone(),
            vec![
                vec![Entry { row: 0, pos: 0 }, Entry { row: 1, pos: 0 }],
                vec![Entry { row: 0, pos: 1 }],
                vec![Entry { row: 1, pos: 1 }],
                vec![Entry { row: 1, pos: 2 }],
            ],
            Provenance::Leaf,
        );
        assert_eq!(bad_name.validate(), vec![Violation::NameConflict { column: 0 }]);

        let dup = Alignment::from_parts(
            9,
            rows,
            vec![
                vec![Entry { row: 0, pos: 0 }],
                vec![Entry { row: 0, pos: 0 }],
                vec![Entry { row: 0, pos: 1 }],
                vec![Entry { row: 1, pos: 0 }],
                vec![Entry { row: 1, pos: 1 }],
                vec![Entry { row: 1, pos: 2 }],
            ],
            Provenance::Leaf,
        );
        assert_eq!(dup.validate(), vec![Violation::ProjectionGap { row: 0 }]);
    }

    #[test]
    fn structural_key_ignores_interleaving() {
        let a = Alignment::from_pattern(&new_pat("m a"), 0).unwrap();
        let b = Alignment::leaf(old_pat(0, "X a #X"), 1);
        let one = unify(&a, &b, &[(1, 1)], 2).unwrap();
        let two = unify(&b, &a, &[(1, 1)], 3).unwrap();
        assert_eq!(one.structural_key(), two.structural_key());
    }
}
