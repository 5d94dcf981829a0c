//! Compression scoring of alignments.
//!
//! `B_N` is what the New row costs where it is explained (its symbols in
//! matched columns). `B_E` is what the explanation costs: Old ID symbols
//! left in single-entry columns. A positive `CD = B_N - B_E` means the
//! alignment compresses New.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alignment::{Alignment, AlignmentId};
use crate::costs::CostTable;
use crate::grammar::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub b_n: f64,
    pub b_e: f64,
    pub cd: f64,
    pub p_abs: f64,
}

impl Score {
    pub fn new(b_n: f64, b_e: f64) -> Self {
        Score { b_n, b_e, cd: b_n - b_e, p_abs: (-b_e).exp2() }
    }
}

/// The code an alignment assigns to New: Old ID symbols that are not
/// registered against any other Old symbol, in column order.
pub fn encoding_of(a: &Alignment) -> Vec<Symbol> {
    let mut code = Vec::new();
    for column in a.columns() {
        let mut old = column.iter().filter(|e| !a.rows()[e.row].is_new());
        if let (Some(&only), None) = (old.next(), old.next()) {
            if a.is_id_entry(only) {
                code.push(a.symbol_at(only));
            }
        }
    }
    code
}

pub fn compression_difference(a: &Alignment, costs: &CostTable) -> Score {
    let mut b_n = 0.0;
    let mut b_e = 0.0;
    for column in a.columns() {
        if column.len() >= 2 {
            if let Some(&e) = column.iter().find(|e| a.rows()[e.row].is_new()) {
                b_n += costs.cost(a.symbol_at(e));
            }
        } else if a.is_id_entry(column[0]) {
            b_e += costs.cost(a.symbol_at(column[0]));
        }
    }
    Score::new(b_n, b_e)
}

/// New positions sitting in matched columns.
pub fn coverage(a: &Alignment) -> BTreeSet<usize> {
    a.columns()
        .iter()
        .filter(|c| c.len() >= 2)
        .flat_map(|c| c.iter().filter(|e| a.rows()[e.row].is_new()).map(|e| e.pos))
        .collect()
}

/// Normalizes `2^-B_E` within groups of equal coverage. Works relative to
/// each group's smallest `B_E` so large encodings do not underflow.
pub fn relative_from_scores(items: &[(AlignmentId, BTreeSet<usize>, f64)]) -> BTreeMap<AlignmentId, f64> {
    let mut groups: BTreeMap<&BTreeSet<usize>, Vec<(AlignmentId, f64)>> = BTreeMap::new();
    for (id, cov, b_e) in items {
        groups.entry(cov).or_default().push((*id, *b_e));
    }
    let mut out = BTreeMap::new();
    for members in groups.values() {
        let floor = members.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = members.iter().map(|m| (floor - m.1).exp2()).collect();
        let total: f64 = weights.iter().sum();
        for (m, w) in members.iter().zip(weights) {
            out.insert(m.0, w / total);
        }
    }
    out
}

pub fn relative_probabilities(alts: &[Alignment], costs: &CostTable) -> BTreeMap<AlignmentId, f64> {
    let items: Vec<_> = alts.iter().map(|a| (a.id(), coverage(a), compression_difference(a, costs).b_e)).collect();
    relative_from_scores(&items)
}
