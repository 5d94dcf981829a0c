//! Compression-driven learning: chunks that recur more often than chance
//! get a short code, repeated runs collapse to a unit and a count, and a
//! greedy description-length loop segments unmarked text.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::costs::CostTable;
use crate::grammar::{GrammarError, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LearnError {
    #[error(transparent)]
    Symbol(#[from] GrammarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tokenization {
    /// Every non-whitespace character is a symbol.
    #[default]
    Char,
    /// Whitespace-separated tokens.
    Word,
}

/// A body of raw symbols with its unigram model.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    symbols: Vec<Symbol>,
    unigram: BTreeMap<Symbol, f64>,
}

impl Corpus {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        let mut counts: BTreeMap<Symbol, usize> = BTreeMap::new();
        for &s in &symbols {
            *counts.entry(s).or_insert(0) += 1;
        }
        let total = symbols.len() as f64;
        let unigram = counts.into_iter().map(|(s, c)| (s, c as f64 / total)).collect();
        Corpus { symbols, unigram }
    }

    pub fn from_text(text: &str, tokens: Tokenization) -> Result<Self, LearnError> {
        let symbols = match tokens {
            Tokenization::Char => text
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| Symbol::new(c.encode_utf8(&mut [0; 4])))
                .collect::<Result<Vec<_>, _>>()?,
            Tokenization::Word => text.split_whitespace().map(Symbol::new).collect::<Result<Vec<_>, _>>()?,
        };
        Ok(Self::new(symbols))
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn unigram(&self) -> &BTreeMap<Symbol, f64> {
        &self.unigram
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.unigram.keys().copied().collect()
    }

    /// Occurrences of `chunk` expected from the unigram model alone.
    pub fn expected(&self, chunk: &[Symbol]) -> f64 {
        let (l, k) = (self.symbols.len(), chunk.len());
        if k == 0 || k > l {
            return 0.0;
        }
        let p: f64 = chunk.iter().map(|s| self.unigram.get(s).copied().unwrap_or(0.0)).product();
        (l - k + 1) as f64 * p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub chunk: Vec<Symbol>,
    pub observed: usize,
    pub expected: f64,
}

impl Candidate {
    /// Symbols a code would stand in for.
    pub fn potential(&self) -> usize {
        self.observed * self.chunk.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChunkEntry {
    pub chunk: Vec<Symbol>,
    pub code: Symbol,
    pub observed: usize,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChunkDictionary {
    pub entries: Vec<ChunkEntry>,
}

impl ChunkDictionary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, code: Symbol) -> Option<&ChunkEntry> {
        self.entries.iter().find(|e| e.code == code)
    }

    /// Raw symbols behind `code`, nested codes expanded.
    pub fn expand(&self, code: Symbol) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.expand_into(code, &mut out);
        out
    }

    fn expand_into(&self, sym: Symbol, out: &mut Vec<Symbol>) {
        match self.get(sym) {
            Some(entry) => {
                for &s in &entry.chunk {
                    self.expand_into(s, out);
                }
            }
            None => out.push(sym),
        }
    }

    fn codes(&self) -> BTreeSet<Symbol> {
        self.entries.iter().map(|e| e.code).collect()
    }
}

/// First-fit count of non-overlapping occurrences.
pub fn count_non_overlapping(seq: &[Symbol], chunk: &[Symbol]) -> usize {
    let k = chunk.len();
    if k == 0 || k > seq.len() {
        return 0;
    }
    let (mut i, mut n) = (0, 0);
    while i + k <= seq.len() {
        if &seq[i..i + k] == chunk {
            n += 1;
            i += k;
        } else {
            i += 1;
        }
    }
    n
}

/// Replaces non-overlapping occurrences, left to right.
pub fn replace_chunk(seq: &[Symbol], chunk: &[Symbol], code: Symbol) -> Vec<Symbol> {
    let k = chunk.len();
    let mut out = Vec::with_capacity(seq.len());
    let mut i = 0;
    while i < seq.len() {
        if k > 0 && i + k <= seq.len() && &seq[i..i + k] == chunk {
            out.push(code);
            i += k;
        } else {
            out.push(seq[i]);
            i += 1;
        }
    }
    out
}

/// Every chunk of 2..=`max_len` symbols seen at least twice without
/// overlap, best compression potential (observed · length) first; ties go
/// to longer, then lexicographically smaller chunks.
pub fn chunk_candidates(corpus: &Corpus, max_len: usize) -> Vec<Candidate> {
    let seq = corpus.symbols();
    let mut out = Vec::new();
    for k in 2..=max_len.min(seq.len()) {
        let mut starts: HashMap<&[Symbol], Vec<usize>> = HashMap::new();
        for i in 0..=seq.len() - k {
            starts.entry(&seq[i..i + k]).or_default().push(i);
        }
        for (chunk, positions) in starts {
            if positions.len() < 2 {
                continue;
            }
            let mut observed = 0;
            let mut next_free = 0;
            for p in positions {
                if p >= next_free {
                    observed += 1;
                    next_free = p + k;
                }
            }
            if observed >= 2 {
                out.push(Candidate { chunk: chunk.to_vec(), observed, expected: corpus.expected(chunk) });
            }
        }
    }
    out.sort_by(|a, b| {
        b.potential()
            .cmp(&a.potential())
            .then(b.chunk.len().cmp(&a.chunk.len()))
            .then_with(|| a.chunk.cmp(&b.chunk))
    });
    out
}

/// True when `observed` clears the chance threshold.
pub fn above_chance(observed: usize, expected: f64, threshold_factor: f64) -> bool {
    observed >= 2 && observed as f64 >= threshold_factor * expected
}

fn fresh_code(taken: &BTreeSet<Symbol>, next: &mut usize) -> Symbol {
    loop {
        *next += 1;
        let code = Symbol::new(&format!("w{next}")).expect("code names are valid symbols");
        if !taken.contains(&code) {
            return code;
        }
    }
}

pub fn select_chunks(candidates: &[Candidate], corpus: &Corpus, threshold_factor: f64) -> ChunkDictionary {
    select_chunks_limited(candidates, corpus, threshold_factor, None)
}

/// Accepts candidates in order whenever their count in what is left of the
/// corpus (earlier chunks already replaced) clears the chance threshold.
pub fn select_chunks_limited(
    candidates: &[Candidate],
    corpus: &Corpus,
    threshold_factor: f64,
    limit: Option<usize>,
) -> ChunkDictionary {
    assert!(threshold_factor > 0.0, "threshold factor must be positive");
    let mut taken = corpus.alphabet();
    let mut next = 0;
    let mut residual = corpus.symbols().to_vec();
    let mut dict = ChunkDictionary::default();
    for c in candidates {
        if limit.is_some_and(|l| dict.len() >= l) {
            break;
        }
        let observed = count_non_overlapping(&residual, &c.chunk);
        if !above_chance(observed, c.expected, threshold_factor) {
            continue;
        }
        let code = fresh_code(&taken, &mut next);
        taken.insert(code);
        residual = replace_chunk(&residual, &c.chunk, code);
        dict.entries.push(ChunkEntry { chunk: c.chunk.clone(), code, observed, expected: c.expected });
    }
    dict
}

/// Bits for `seq` plus the dictionary (each chunk followed by its code),
/// all under one smoothed frequency table fitted to that description.
pub fn description_bits(seq: &[Symbol], dict: &ChunkDictionary) -> f64 {
    let description = || seq.iter().chain(dict.entries.iter().flat_map(|e| e.chunk.iter().chain(std::iter::once(&e.code))));
    let mut counts: BTreeMap<Symbol, u64> = BTreeMap::new();
    for &s in description() {
        *counts.entry(s).or_insert(0) += 1;
    }
    let table = CostTable::from_counts(&counts);
    table.total(description().copied())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    pub encoded: Vec<Symbol>,
    pub raw_bits: f64,
    pub encoded_bits: f64,
}

/// Left-to-right longest-match replacement of raw material by codes.
pub fn encode_corpus(corpus: &Corpus, dict: &ChunkDictionary) -> Encoding {
    let codes = dict.codes();
    assert!(corpus.symbols().iter().all(|s| !codes.contains(s)), "codes must be fresh");
    let mut bodies: Vec<(Vec<Symbol>, Symbol)> = dict.entries.iter().map(|e| (dict.expand(e.code), e.code)).collect();
    bodies.sort_by_key(|b| std::cmp::Reverse(b.0.len()));
    let seq = corpus.symbols();
    let mut encoded = Vec::with_capacity(seq.len());
    let mut i = 0;
    while i < seq.len() {
        match bodies.iter().find(|(body, _)| !body.is_empty() && seq[i..].starts_with(body)) {
            Some((body, code)) => {
                encoded.push(*code);
                i += body.len();
            }
            None => {
                encoded.push(seq[i]);
                i += 1;
            }
        }
    }
    let raw_bits = description_bits(seq, &ChunkDictionary::default());
    let encoded_bits = description_bits(&encoded, dict);
    Encoding { encoded, raw_bits, encoded_bits }
}

pub fn decode(encoded: &[Symbol], dict: &ChunkDictionary) -> Vec<Symbol> {
    let mut out = Vec::new();
    for &s in encoded {
        dict.expand_into(s, &mut out);
    }
    out
}

/// Greedy run-length factorization. At each position the unit that saves
/// the most symbols, `(count - 1) · len`, is taken; ties go to the shorter
/// unit and a position with no repeat yields its own symbol once.
pub fn run_length_encode(seq: &[Symbol]) -> Vec<(Vec<Symbol>, usize)> {
    let mut out = Vec::new();
    let mut p = 0;
    while p < seq.len() {
        let rest = &seq[p..];
        let (mut best_len, mut best_count, mut best_saved) = (1, 1, 0);
        for len in 1..=rest.len() / 2 {
            let unit = &rest[..len];
            let mut count = 1;
            while (count + 1) * len <= rest.len() && &rest[count * len..(count + 1) * len] == unit {
                count += 1;
            }
            let saved = (count - 1) * len;
            if saved > best_saved {
                (best_len, best_count, best_saved) = (len, count, saved);
            }
        }
        out.push((rest[..best_len].to_vec(), best_count));
        p += best_len * best_count;
    }
    out
}

pub fn run_length_decode(runs: &[(Vec<Symbol>, usize)]) -> Vec<Symbol> {
    runs.iter().flat_map(|(unit, n)| unit.iter().copied().cycle().take(unit.len() * n)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentConfig {
    pub rounds: usize,
    pub max_len: usize,
    pub threshold_factor: f64,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig { rounds: 50, max_len: 8, threshold_factor: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    /// Interior cut points in the raw corpus, ascending.
    pub boundaries: Vec<usize>,
    pub lexicon: ChunkDictionary,
    pub encoded: Vec<Symbol>,
    /// Total description bits before the first round and after each one.
    pub bits: Vec<f64>,
}

impl Segmentation {
    /// The raw corpus cut at the boundaries.
    pub fn pieces<'a>(&self, raw: &'a [Symbol]) -> Vec<&'a [Symbol]> {
        let mut out = Vec::new();
        let mut start = 0;
        for &b in self.boundaries.iter().chain(std::iter::once(&raw.len())) {
            if b > start {
                out.push(&raw[start..b]);
            }
            start = b;
        }
        out
    }

    /// Raw expansions of every lexicon entry.
    pub fn words(&self) -> Vec<Vec<Symbol>> {
        self.lexicon.entries.iter().map(|e| self.lexicon.expand(e.code)).collect()
    }
}

pub fn segment(corpus: &Corpus, rounds: usize) -> Segmentation {
    segment_with(corpus, &SegmentConfig { rounds, ..SegmentConfig::default() })
}

/// Each round adds the above-chance chunk of the current (partly encoded)
/// sequence that lowers total description bits the most; the loop stops
/// when none does. Boundaries fall at the edges of every code, nested codes
/// included.
pub fn segment_with(corpus: &Corpus, config: &SegmentConfig) -> Segmentation {
    let mut taken = corpus.alphabet();
    let mut next = 0;
    let mut seq = corpus.symbols().to_vec();
    let mut lexicon = ChunkDictionary::default();
    let mut bits = vec![description_bits(&seq, &lexicon)];
    for _ in 0..config.rounds {
        let current = Corpus::new(seq.clone());
        let mut probe = next;
        let code = fresh_code(&taken, &mut probe);
        let mut best: Option<(f64, Vec<Symbol>, ChunkEntry)> = None;
        for c in chunk_candidates(&current, config.max_len) {
            if !above_chance(c.observed, c.expected, config.threshold_factor) {
                continue;
            }
            let candidate_seq = replace_chunk(&seq, &c.chunk, code);
            let entry = ChunkEntry { chunk: c.chunk.clone(), code, observed: c.observed, expected: c.expected };
            lexicon.entries.push(entry);
            let b = description_bits(&candidate_seq, &lexicon);
            let entry = lexicon.entries.pop().expect("just pushed");
            let limit = best.as_ref().map_or(*bits.last().expect("seeded"), |x| x.0);
            if b < limit {
                best = Some((b, candidate_seq, entry));
            }
        }
        let Some((b, new_seq, entry)) = best else { break };
        next = probe;
        taken.insert(entry.code);
        lexicon.entries.push(entry);
        seq = new_seq;
        bits.push(b);
    }

    let mut cuts = BTreeSet::new();
    let mut offset = 0;
    for &s in &seq {
        offset = mark_edges(s, offset, &lexicon, &mut cuts);
    }
    let total = corpus.len();
    let boundaries = cuts.into_iter().filter(|&b| b > 0 && b < total).collect();
    Segmentation { boundaries, lexicon, encoded: seq, bits }
}

fn mark_edges(sym: Symbol, start: usize, dict: &ChunkDictionary, cuts: &mut BTreeSet<usize>) -> usize {
    match dict.get(sym) {
        None => start + 1,
        Some(entry) => {
            cuts.insert(start);
            let mut end = start;
            for &s in &entry.chunk {
                end = mark_edges(s, end, dict, cuts);
            }
            cuts.insert(end);
            end
        }
    }
}

/// F1 of predicted against true interior boundaries. Two empty sets agree
/// perfectly.
pub fn boundary_f1(predicted: &[usize], truth: &[usize]) -> f64 {
    let p: BTreeSet<_> = predicted.iter().collect();
    let t: BTreeSet<_> = truth.iter().collect();
    if p.is_empty() && t.is_empty() {
        return 1.0;
    }
    let hit = p.intersection(&t).count() as f64;
    if hit == 0.0 {
        return 0.0;
    }
    let precision = hit / p.len() as f64;
    let recall = hit / t.len() as f64;
    2.0 * precision * recall / (precision + recall)
}
