//! Symbols, SP-patterns and the plain-text grammar format.
//!
//! A grammar file holds one Old pattern per line. Anything after the first
//! `|` on a line is a comment. Tokens are separated by runs of spaces or
//! tabs and blank lines are ignored:
//!
//! ```text
//! MU ST #ST MC #MC PD #PD #MU  | Prepare meal
//! ST 0 mussels #ST             | Starter: mussels
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("grammar contains no patterns")]
    EmptyGrammar,
    #[error("invalid symbol {0:?}: symbols must be non-empty and contain no whitespace or '|'")]
    InvalidSymbol(String),
    #[error("a pattern needs at least one symbol")]
    EmptyPattern,
    #[error("ID position {pos} is outside a pattern of length {len}")]
    IdOutOfRange { pos: usize, len: usize },
    #[error("New patterns carry no ID symbols")]
    IdsOnNewPattern,
    #[error("duplicate pattern id {0}")]
    DuplicatePatternId(u32),
}

#[derive(Default)]
struct Interner {
    ids: HashMap<&'static str, u32>,
    names: Vec<&'static str>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

/// An atomic SP-symbol. Symbols are interned process-wide, so equality and
/// hashing are integer operations while ordering follows the name.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol(u32);

impl Symbol {
    pub fn new(name: &str) -> Result<Symbol, GrammarError> {
        if name.is_empty() || name.contains('|') || name.chars().any(char::is_whitespace) {
            return Err(GrammarError::InvalidSymbol(name.to_string()));
        }
        Ok(Self::intern(name))
    }

    fn intern(name: &str) -> Symbol {
        if let Some(&id) = interner().read().expect("interner poisoned").ids.get(name) {
            return Symbol(id);
        }
        let mut table = interner().write().expect("interner poisoned");
        if let Some(&id) = table.ids.get(name) {
            return Symbol(id);
        }
        let leaked: &'static str = Box::leak(name.to_string().into_boxed_str());
        let id = table.names.len() as u32;
        table.names.push(leaked);
        table.ids.insert(leaked, id);
        Symbol(id)
    }

    pub fn name(self) -> &'static str {
        interner().read().expect("interner poisoned").names[self.0 as usize]
    }

    /// The interned id. Stable within one process only.
    pub fn id(self) -> u32 {
        self.0
    }

    fn is_digits(self) -> bool {
        self.name().bytes().all(|b| b.is_ascii_digit())
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self.0 == other.0 {
            return std::cmp::Ordering::Equal;
        }
        self.name().cmp(other.name())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        Symbol::new(&name).map_err(serde::de::Error::custom)
    }
}

/// Splits text on whitespace into symbols. `|` is rejected, not treated as
/// a comment marker.
pub fn parse_symbols(text: &str) -> Result<Vec<Symbol>, GrammarError> {
    text.split_whitespace().map(Symbol::new).collect()
}

pub fn symbols_to_string(symbols: &[Symbol]) -> String {
    symbols.iter().map(|s| s.name()).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternId(pub u32);

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    New,
    Old,
}

/// A flat sequence of symbols. Old patterns mark some positions as ID
/// symbols; New patterns never do.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpPattern {
    id: PatternId,
    symbols: Vec<Symbol>,
    origin: Origin,
    id_positions: Vec<usize>,
}

impl SpPattern {
    /// A New pattern: raw input to be explained.
    pub fn new_pattern(id: PatternId, symbols: Vec<Symbol>) -> Result<Self, GrammarError> {
        if symbols.is_empty() {
            return Err(GrammarError::EmptyPattern);
        }
        Ok(SpPattern { id, symbols, origin: Origin::New, id_positions: Vec::new() })
    }

    /// An Old pattern with ID symbols assigned by [`classify_symbols`].
    pub fn old(id: PatternId, symbols: Vec<Symbol>) -> Result<Self, GrammarError> {
        if symbols.is_empty() {
            return Err(GrammarError::EmptyPattern);
        }
        let id_positions = classify_symbols(&symbols).into_iter().collect();
        Ok(SpPattern { id, symbols, origin: Origin::Old, id_positions })
    }

    /// An Old pattern with explicitly chosen ID positions.
    pub fn old_with_ids(
        id: PatternId,
        symbols: Vec<Symbol>,
        ids: impl IntoIterator<Item = usize>,
    ) -> Result<Self, GrammarError> {
        if symbols.is_empty() {
            return Err(GrammarError::EmptyPattern);
        }
        let id_positions: BTreeSet<usize> = ids.into_iter().collect();
        if let Some(&pos) = id_positions.iter().find(|&&p| p >= symbols.len()) {
            return Err(GrammarError::IdOutOfRange { pos, len: symbols.len() });
        }
        Ok(SpPattern { id, symbols, origin: Origin::Old, id_positions: id_positions.into_iter().collect() })
    }

    pub(crate) fn from_raw(
        id: PatternId,
        symbols: Vec<Symbol>,
        origin: Origin,
        ids: Vec<usize>,
    ) -> Result<Self, GrammarError> {
        match origin {
            Origin::New if !ids.is_empty() => Err(GrammarError::IdsOnNewPattern),
            Origin::New => Self::new_pattern(id, symbols),
            Origin::Old => Self::old_with_ids(id, symbols, ids),
        }
    }

    pub fn id(&self) -> PatternId {
        self.id
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn is_new(&self) -> bool {
        self.origin == Origin::New
    }

    pub fn id_positions(&self) -> &[usize] {
        &self.id_positions
    }

    pub fn is_id(&self, pos: usize) -> bool {
        self.id_positions.binary_search(&pos).is_ok()
    }

    /// Short human label: the leading ID symbol plus its digit run, e.g.
    /// `N4` for `N 4 f o r t u n e #N`.
    pub fn label(&self) -> String {
        let mut label = self.symbols[0].name().to_string();
        for sym in self.symbols.iter().skip(1).take_while(|s| s.is_digits()) {
            label.push_str(sym.name());
        }
        label
    }
}

impl fmt::Display for SpPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&symbols_to_string(&self.symbols))
    }
}

/// ID positions of an Old pattern: index 0, the run of all-digit symbols
/// right after it, and the last index when it reads `#` + first name.
pub fn classify_symbols(symbols: &[Symbol]) -> BTreeSet<usize> {
    let mut ids = BTreeSet::new();
    let Some(first) = symbols.first() else {
        return ids;
    };
    ids.insert(0);
    ids.extend((1..symbols.len()).take_while(|&i| symbols[i].is_digits()));
    let last = symbols.len() - 1;
    if last > 0 && symbols[last].name().strip_prefix('#') == Some(first.name()) {
        ids.insert(last);
    }
    ids
}

/// Positional ID classification of a pattern; empty for New patterns.
pub fn classify_id_symbols(pattern: &SpPattern) -> BTreeSet<usize> {
    match pattern.origin() {
        Origin::New => BTreeSet::new(),
        Origin::Old => classify_symbols(pattern.symbols()),
    }
}

/// A repository of Old patterns.
#[derive(Debug, Clone)]
pub struct Grammar {
    patterns: Vec<Arc<SpPattern>>,
    alphabet: BTreeSet<Symbol>,
    source_text: String,
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.patterns == other.patterns
    }
}

impl Grammar {
    pub fn from_patterns(patterns: Vec<SpPattern>) -> Result<Self, GrammarError> {
        if patterns.is_empty() {
            return Err(GrammarError::EmptyGrammar);
        }
        let mut seen = BTreeSet::new();
        for p in &patterns {
            if !seen.insert(p.id()) {
                return Err(GrammarError::DuplicatePatternId(p.id().0));
            }
        }
        let alphabet = patterns.iter().flat_map(|p| p.symbols().iter().copied()).collect();
        let patterns: Vec<_> = patterns.into_iter().map(Arc::new).collect();
        let source_text = render_patterns(&patterns);
        Ok(Grammar { patterns, alphabet, source_text })
    }

    pub fn patterns(&self) -> &[Arc<SpPattern>] {
        &self.patterns
    }

    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        &self.alphabet
    }

    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn get(&self, id: PatternId) -> Option<&Arc<SpPattern>> {
        self.patterns.iter().find(|p| p.id() == id)
    }

    /// One pattern per line, comments dropped.
    pub fn to_text(&self) -> String {
        render_patterns(&self.patterns)
    }
}

fn render_patterns(patterns: &[Arc<SpPattern>]) -> String {
    let mut out = String::new();
    for p in patterns {
        out.push_str(&p.to_string());
        out.push('\n');
    }
    out
}

/// Parses grammar text. Pattern ids follow file order starting at 0.
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut patterns = Vec::new();
    for line in text.lines() {
        let body = line.split('|').next().unwrap_or("");
        let symbols = parse_symbols(body)?;
        if symbols.is_empty() {
            continue;
        }
        let id = PatternId(patterns.len() as u32);
        patterns.push(SpPattern::old(id, symbols)?);
    }
    let mut grammar = Grammar::from_patterns(patterns)?;
    grammar.source_text = text.to_string();
    Ok(grammar)
}
