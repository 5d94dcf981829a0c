//! Bit costs of symbols.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::grammar::{Grammar, Symbol};

/// Lowest cost any symbol may carry.
pub const MIN_COST_BITS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    #[default]
    Uniform,
    Frequency,
}

/// Per-symbol costs in bits. Symbols outside the table (typically New-only
/// material) cost as much as an alphabet symbol that was never counted.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    mode: CostMode,
    bits: BTreeMap<Symbol, f64>,
    unseen: f64,
}

impl CostTable {
    /// `log2 |alphabet|` bits per symbol, floored at [`MIN_COST_BITS`].
    pub fn uniform(alphabet: impl IntoIterator<Item = Symbol>) -> Self {
        let alphabet: BTreeSet<Symbol> = alphabet.into_iter().collect();
        let cost = uniform_cost(alphabet.len());
        CostTable {
            mode: CostMode::Uniform,
            bits: alphabet.into_iter().map(|s| (s, cost)).collect(),
            unseen: cost,
        }
    }

    /// Smoothed frequency costs: `-log2((count + 1) / (total + |alphabet|))`.
    pub fn from_counts(counts: &BTreeMap<Symbol, u64>) -> Self {
        let total: u64 = counts.values().sum();
        let denom = (total + counts.len() as u64) as f64;
        let cost_of = |count: u64| -> f64 {
            let bits = -((count as f64 + 1.0) / denom).log2();
            if counts.len() <= 1 { bits.max(MIN_COST_BITS) } else { bits }
        };
        CostTable {
            mode: CostMode::Frequency,
            bits: counts.iter().map(|(&s, &c)| (s, cost_of(c))).collect(),
            unseen: if counts.is_empty() { MIN_COST_BITS } else { cost_of(0) },
        }
    }

    pub fn mode(&self) -> CostMode {
        self.mode
    }

    pub fn cost(&self, symbol: Symbol) -> f64 {
        self.bits.get(&symbol).copied().unwrap_or(self.unseen)
    }

    /// Sum of costs, added left to right.
    pub fn total(&self, symbols: impl IntoIterator<Item = Symbol>) -> f64 {
        symbols.into_iter().map(|s| self.cost(s)).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Symbol, f64)> + '_ {
        self.bits.iter().map(|(&s, &c)| (s, c))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

fn uniform_cost(size: usize) -> f64 {
    (size as f64).log2().max(MIN_COST_BITS)
}

/// Instance counts of every symbol in the grammar.
pub fn symbol_counts(grammar: &Grammar) -> BTreeMap<Symbol, u64> {
    let mut counts = BTreeMap::new();
    for p in grammar.patterns() {
        for &s in p.symbols() {
            *counts.entry(s).or_insert(0) += 1;
        }
    }
    counts
}

pub fn symbol_costs(grammar: &Grammar, mode: CostMode) -> CostTable {
    match mode {
        CostMode::Uniform => CostTable::uniform(grammar.alphabet().iter().copied()),
        CostMode::Frequency => CostTable::from_counts(&symbol_counts(grammar)),
    }
}
