mod common;

use common::oracle::{all_monotone_matchings, best_credit, credit};
use proptest::prelude::*;
use spma::{find_matches, CostTable, Symbol};

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn seq(max: usize) -> impl Strategy<Value = Vec<Symbol>> {
    prop::collection::vec(0..NAMES.len(), 1..=max)
        .prop_map(|v| v.into_iter().map(|k| Symbol::new(NAMES[k]).unwrap()).collect())
}

fn weighted(weights: &[u64]) -> CostTable {
    let counts = NAMES.iter().zip(weights).map(|(n, &w)| (Symbol::new(n).unwrap(), w)).collect();
    CostTable::from_counts(&counts)
}

fn pair_within(product: usize) -> impl Strategy<Value = (Vec<Symbol>, Vec<Symbol>)> {
    (1..=product).prop_flat_map(move |n| (seq(n), seq(product / n)))
}

proptest! {
    #[test]
    fn top_credit_is_optimal((d, t) in pair_within(64), w in prop::collection::vec(0u64..30, 4)) {
        let costs = weighted(&w);
        let top = find_matches(&d, &t, &costs, 50, 8).first().map_or(0.0, |h| h.credit);
        prop_assert!((top - best_credit(&d, &t, &costs)).abs() < 1e-9);
    }

    #[test]
    fn lcs_oracle_agrees_with_enumeration(d in seq(5), t in seq(5)) {
        let costs = weighted(&[3, 1, 4, 1]);
        let best = all_monotone_matchings(&d, &t).iter().map(|m| credit(&d, m, &costs)).fold(0.0, f64::max);
        prop_assert!((best - best_credit(&d, &t, &costs)).abs() < 1e-9);
    }

    #[test]
    fn hits_are_valid_and_ordered(d in seq(8), t in seq(8)) {
        let costs = weighted(&[5, 2, 9, 0]);
        let hits = find_matches(&d, &t, &costs, 50, 20);
        for h in &hits {
            prop_assert!(!h.pairs.is_empty());
            prop_assert!(h.pairs.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
            prop_assert!(h.pairs.iter().all(|&(i, j)| d[i] == t[j]));
            prop_assert!((h.credit - credit(&d, &h.pairs, &costs)).abs() < 1e-9);
        }
        for w in hits.windows(2) {
            let (x, y) = (&w[0], &w[1]);
            prop_assert!(x.credit > y.credit || (x.credit == y.credit && x.gaps() <= y.gaps()));
        }
    }

    #[test]
    fn symmetric_credit(d in seq(5), t in seq(5)) {
        let costs = weighted(&[2, 7, 1, 3]);
        let mut forward: Vec<f64> = find_matches(&d, &t, &costs, 10_000, 10_000).iter().map(|h| h.credit).collect();
        let mut backward: Vec<f64> = find_matches(&t, &d, &costs, 10_000, 10_000).iter().map(|h| h.credit).collect();
        forward.sort_by(f64::total_cmp);
        backward.sort_by(f64::total_cmp);
        prop_assert_eq!(forward.len(), backward.len());
        prop_assert!(forward.iter().zip(&backward).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn appending_never_lowers_top_credit(d in seq(7), t in seq(7), to_driver in any::<bool>()) {
        let costs = CostTable::uniform(NAMES.iter().map(|n| Symbol::new(n).unwrap()).chain([Symbol::new("z").unwrap()]));
        let top = |d: &[Symbol], t: &[Symbol]| find_matches(d, t, &costs, 50, 8).first().map_or(0.0, |h| h.credit);
        let before = top(&d, &t);
        let (mut d2, mut t2) = (d.clone(), t.clone());
        if to_driver { d2.push(Symbol::new("z").unwrap()) } else { t2.push(Symbol::new("z").unwrap()) }
        prop_assert!(top(&d2, &t2) >= before);
    }
}

#[test]
fn discontinuous_match() {
    let d: Vec<Symbol> = "a b c d".split(' ').map(|s| Symbol::new(s).unwrap()).collect();
    let t: Vec<Symbol> = "a x b y d".split(' ').map(|s| Symbol::new(s).unwrap()).collect();
    let costs = CostTable::uniform(d.iter().chain(&t).copied());
    let hits = find_matches(&d, &t, &costs, 50, 4);
    assert_eq!(hits[0].pairs, vec![(0, 0), (1, 2), (3, 4)]);
    assert_eq!(hits[0].gaps(), 2);
    assert!(find_matches(&d, &[Symbol::new("q").unwrap()], &costs, 50, 4).is_empty());
}
