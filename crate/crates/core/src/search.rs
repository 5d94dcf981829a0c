//! The alignment-building cycle.
//!
//! Cycle 0 pairs the New pattern with every Old pattern. Each later cycle
//! pairs the alignments that entered the beam in the previous cycle with
//! every Old pattern they do not already contain. All structurally new
//! children compete with the retained alignments for `beam_width` places;
//! the search stops once a cycle adds nothing to the beam.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::alignment::{unify, Alignment, AlignmentId, StructuralKey, UnifyError};
use crate::audit::{AuditNode, AuditTrail, Fate, DUPLICATE};
use crate::costs::{symbol_costs, CostMode, CostTable};
use crate::grammar::{Grammar, SpPattern};
use crate::matcher::{find_poset_matches, ColumnOrder};
use crate::scorer::{compression_difference, coverage, relative_from_scores, Score};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub beam_width: usize,
    pub max_cycles: usize,
    pub matcher_beam: usize,
    pub matches_per_pair: usize,
    pub cost_mode: CostMode,
    /// Whether an alignment may take an Old pattern it already contains.
    pub allow_repeats: bool,
    /// Worker threads for candidate evaluation; results do not depend on it.
    pub jobs: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            beam_width: 20,
            max_cycles: 12,
            matcher_beam: 50,
            matches_per_pair: 8,
            cost_mode: CostMode::Uniform,
            allow_repeats: false,
            jobs: 1,
        }
    }
}

impl SearchConfig {
    pub fn check(&self) -> Result<(), SearchError> {
        let fields = [
            ("beam_width", self.beam_width),
            ("max_cycles", self.max_cycles),
            ("matcher_beam", self.matcher_beam),
            ("matches_per_pair", self.matches_per_pair),
            ("jobs", self.jobs),
        ];
        match fields.iter().find(|f| f.1 == 0) {
            Some(f) => Err(SearchError::InvalidConfig(f.0)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("grammar contains no patterns")]
    EmptyGrammar,
    #[error("the pattern to explain must be a New pattern")]
    NotNew,
    #[error("{0} must be positive")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredAlignment {
    pub alignment: Arc<Alignment>,
    pub score: Score,
    pub p_rel: f64,
    pub coverage: BTreeSet<usize>,
    pub cycle: usize,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Final beam, best first.
    pub ranked: Vec<ScoredAlignment>,
    pub cycles_run: usize,
    /// Children produced by unification, valid or not.
    pub candidates: usize,
    pub costs: CostTable,
}

impl SearchOutcome {
    pub fn best(&self) -> Option<&ScoredAlignment> {
        self.ranked.first()
    }
}

#[derive(Clone)]
struct Live {
    alignment: Arc<Alignment>,
    score: Score,
    matched: usize,
    cycle: usize,
}

fn rank(x: &Live, y: &Live) -> Ordering {
    y.score
        .cd
        .total_cmp(&x.score.cd)
        .then(x.score.b_e.total_cmp(&y.score.b_e))
        .then(y.matched.cmp(&x.matched))
        .then(x.alignment.id().cmp(&y.alignment.id()))
}

enum Outcome {
    Built(Arc<Alignment>, Score),
    Duplicate(Score),
    Failed(UnifyError),
}

struct Candidate {
    parents: (AlignmentId, AlignmentId),
    hits: Vec<(usize, usize)>,
    cycle: usize,
    outcome: Outcome,
}

type Attempt = (Vec<(usize, usize)>, Result<Alignment, UnifyError>);

enum Event {
    Leaf(Arc<SpPattern>),
    Child(Candidate),
}

/// Runs the search and appends every leaf and candidate to `audit`, with
/// its final fate, once the search is over. Alignment ids equal the ids of
/// their audit nodes for as long as the trail's cap allows.
pub fn build_alignments(
    new: &SpPattern,
    grammar: &Grammar,
    config: &SearchConfig,
    audit: &mut AuditTrail,
) -> Result<SearchOutcome, SearchError> {
    config.check()?;
    if grammar.is_empty() {
        return Err(SearchError::EmptyGrammar);
    }
    if !new.is_new() {
        return Err(SearchError::NotNew);
    }
    let costs = symbol_costs(grammar, config.cost_mode);
    let base = audit.len();

    let mut events: Vec<Event> = Vec::new();
    let new_leaf = Arc::new(Alignment::from_pattern(new, base).map_err(|_| SearchError::NotNew)?);
    events.push(Event::Leaf(new_leaf.rows()[0].clone()));
    let mut old_leaves: Vec<Arc<Alignment>> = Vec::with_capacity(grammar.len());
    for p in grammar.patterns() {
        old_leaves.push(Arc::new(Alignment::leaf(p.clone(), base + events.len())));
        events.push(Event::Leaf(p.clone()));
    }

    let pool = if config.jobs > 1 {
        rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build().ok()
    } else {
        None
    };

    let mut seen: HashSet<StructuralKey> = HashSet::new();
    let mut retained: Vec<Live> = Vec::new();
    let mut frontier: Vec<Arc<Alignment>> = vec![new_leaf];
    let mut cycles_run = 0;
    let mut candidates = 0;

    for cycle in 0..config.max_cycles {
        // Every retained alignment carries the New row, so pairing two of
        // them always breaks the one-New-row rule; only Old leaves remain.
        let mut work: Vec<(usize, usize)> = Vec::new();
        for (fi, f) in frontier.iter().enumerate() {
            for (li, leaf) in old_leaves.iter().enumerate() {
                if config.allow_repeats || !f.contains_pattern(leaf.rows()[0].id()) {
                    work.push((fi, li));
                }
            }
        }
        if work.is_empty() {
            break;
        }
        cycles_run += 1;

        let orders: Vec<ColumnOrder> = frontier.iter().map(|f| f.column_order()).collect();
        let evaluate = |&(fi, li): &(usize, usize)| -> Vec<Attempt> {
            let f = &frontier[fi];
            let leaf = &old_leaves[li];
            let pattern = &leaf.rows()[0];
            let ids: Vec<bool> = (0..pattern.len()).map(|p| pattern.is_id(p)).collect();
            find_poset_matches(pattern.symbols(), &ids, &orders[fi], &costs, config.matcher_beam, config.matches_per_pair)
                .into_iter()
                .map(|h| (h.pairs.clone(), unify(f, leaf, &h.pairs, 0)))
                .collect()
        };
        let results: Vec<_> = match &pool {
            Some(pool) => pool.install(|| work.par_iter().map(evaluate).collect()),
            None => work.iter().map(evaluate).collect(),
        };

        let mut children: Vec<Live> = Vec::new();
        for (&(fi, li), outs) in work.iter().zip(results) {
            for (hits, result) in outs {
                let id = base + events.len();
                candidates += 1;
                let outcome = match result {
                    Ok(child) => {
                        let child = Arc::new(child.with_id(id));
                        let score = compression_difference(&child, &costs);
                        if seen.insert(child.structural_key()) {
                            children.push(Live { matched: child.matched_column_count(), alignment: child.clone(), score, cycle });
                            Outcome::Built(child, score)
                        } else {
                            Outcome::Duplicate(score)
                        }
                    }
                    Err(e) => Outcome::Failed(e),
                };
                let parents = (frontier[fi].id(), old_leaves[li].id());
                events.push(Event::Child(Candidate { parents, hits, cycle, outcome }));
            }
        }

        let first_child = children.first().map(|c| c.alignment.id());
        let mut pool_now: Vec<Live> = retained.drain(..).chain(children).collect();
        pool_now.sort_by(rank);
        pool_now.truncate(config.beam_width);
        let entrants: Vec<Arc<Alignment>> = match first_child {
            Some(first) => pool_now.iter().filter(|l| l.alignment.id() >= first).map(|l| l.alignment.clone()).collect(),
            None => Vec::new(),
        };
        retained = pool_now;
        if entrants.is_empty() {
            break;
        }
        frontier = entrants;
    }

    let kept: HashSet<AlignmentId> = retained.iter().map(|l| l.alignment.id()).collect();
    for event in events {
        let node = match event {
            Event::Leaf(p) => AuditNode::leaf(p),
            Event::Child(c) => {
                let (fate, score) = match c.outcome {
                    Outcome::Built(a, s) if kept.contains(&a.id()) => (Fate::Retained, Some(s)),
                    Outcome::Built(_, s) => (Fate::Pruned, Some(s)),
                    Outcome::Duplicate(s) => (Fate::Rejected(DUPLICATE.into()), Some(s)),
                    Outcome::Failed(e) => (Fate::Rejected(e.tag().into()), None),
                };
                AuditNode::alignment(c.parents.0, c.parents.1, c.hits, c.cycle, fate, score)
            }
        };
        if audit.record(node).is_err() {
            break;
        }
    }

    let covers: Vec<_> = retained.iter().map(|l| (l.alignment.id(), coverage(&l.alignment), l.score.b_e)).collect();
    let p_rel = relative_from_scores(&covers);
    let ranked = retained
        .into_iter()
        .zip(covers)
        .map(|(l, (id, cov, _))| ScoredAlignment { p_rel: p_rel[&id], coverage: cov, score: l.score, cycle: l.cycle, alignment: l.alignment })
        .collect();
    Ok(SearchOutcome { ranked, cycles_run, candidates, costs })
}
