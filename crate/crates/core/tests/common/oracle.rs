//! Brute-force references for the matcher and the search.

use spma::{CostTable, Grammar, SpPattern, Symbol};

/// Every set of index pairs that increases in both coordinates and pairs
/// equal names, the empty set excluded.
pub fn all_monotone_matchings(driver: &[Symbol], target: &[Symbol]) -> Vec<Vec<(usize, usize)>> {
    fn extend(
        driver: &[Symbol],
        target: &[Symbol],
        from: (usize, usize),
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        for i in from.0..driver.len() {
            for j in from.1..target.len() {
                if driver[i] == target[j] {
                    current.push((i, j));
                    out.push(current.clone());
                    extend(driver, target, (i + 1, j + 1), current, out);
                    current.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    extend(driver, target, (0, 0), &mut Vec::new(), &mut out);
    out
}

pub fn credit(driver: &[Symbol], pairs: &[(usize, usize)], costs: &CostTable) -> f64 {
    pairs.iter().map(|&(i, _)| costs.cost(driver[i])).sum()
}

/// Highest credit over all monotone matchings, by dynamic programming over
/// prefixes (weighted longest common subsequence).
pub fn best_credit(driver: &[Symbol], target: &[Symbol], costs: &CostTable) -> f64 {
    let (n, m) = (driver.len(), target.len());
    let mut t = vec![vec![0.0f64; m + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=m {
            let mut v = t[i - 1][j].max(t[i][j - 1]);
            if driver[i - 1] == target[j - 1] {
                v = v.max(t[i - 1][j - 1] + costs.cost(driver[i - 1]));
            }
            t[i][j] = v;
        }
    }
    t[n][m]
}

/// Best compression difference over every valid alignment of `new` with a
/// non-empty subset of the grammar (each pattern at most once) that has at
/// least one matched column involving the New row.
///
/// An alignment is enumerated as a sequence of columns over the chosen
/// rows; each column advances a set of rows whose next symbols share one
/// name, with at most one Old ID symbol among them. Columns score `+cost`
/// when matched and holding a New symbol, `-cost` when they are a lone Old
/// ID symbol, and 0 otherwise. Rows linked to nothing can only lose, so the
/// requirement of one New-involving column makes the optimum equal to the
/// best connected alignment.
pub fn exhaustive_best_cd(new: &SpPattern, grammar: &Grammar, costs: &CostTable) -> Option<f64> {
    let n = grammar.len();
    assert!(n <= 4, "desk-scale oracle");
    let mut best: Option<f64> = None;
    for subset in 1u32..(1 << n) {
        let olds: Vec<&SpPattern> = (0..n).filter(|k| subset & (1 << k) != 0).map(|k| &*grammar.patterns()[k]).collect();
        if let Some(v) = subset_best(new, &olds, costs) {
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best
}

fn subset_best(new: &SpPattern, olds: &[&SpPattern], costs: &CostTable) -> Option<f64> {
    let rows: Vec<&SpPattern> = std::iter::once(new).chain(olds.iter().copied()).collect();
    let r = rows.len();
    let lens: Vec<usize> = rows.iter().map(|p| p.len()).collect();
    let mut radix = vec![1usize; r];
    for k in 1..r {
        radix[k] = radix[k - 1] * (lens[k - 1] + 1);
    }
    let states = radix[r - 1] * (lens[r - 1] + 1);
    let mut table = vec![[f64::NEG_INFINITY; 2]; states];
    table[0][0] = 0.0;
    let mut pos = vec![0usize; r];
    for s in 0..states {
        let mut rest = s;
        for k in 0..r {
            pos[k] = rest % (lens[k] + 1);
            rest /= lens[k] + 1;
        }
        for flag in 0..2 {
            let here = table[s][flag];
            if here == f64::NEG_INFINITY {
                continue;
            }
            'masks: for mask in 1u32..(1 << r) {
                let mut name: Option<Symbol> = None;
                let mut size = 0;
                let mut old_ids = 0;
                let mut target = s;
                for k in 0..r {
                    if mask & (1 << k) == 0 {
                        continue;
                    }
                    if pos[k] == lens[k] {
                        continue 'masks;
                    }
                    let sym = rows[k].symbols()[pos[k]];
                    if name.is_some_and(|n| n != sym) {
                        continue 'masks;
                    }
                    name = Some(sym);
                    size += 1;
                    if k > 0 && rows[k].is_id(pos[k]) {
                        old_ids += 1;
                    }
                    target += radix[k];
                }
                if old_ids > 1 {
                    continue;
                }
                let sym = name.expect("non-empty mask");
                let with_new = mask & 1 != 0;
                let (gain, next_flag) = if size >= 2 {
                    (if with_new { costs.cost(sym) } else { 0.0 }, flag | with_new as usize)
                } else if old_ids == 1 {
                    (-costs.cost(sym), flag)
                } else {
                    (0.0, flag)
                };
                let v = here + gain;
                if v > table[target][next_flag] {
                    table[target][next_flag] = v;
                }
            }
        }
    }
    let end = table[states - 1][1];
    (end > f64::NEG_INFINITY).then_some(end)
}
