//! SP-pattern multiple alignment: grammar model, compression-guided
//! alignment search with a full audit trail, rendering, and
//! compression-based chunk learning.

pub mod alignment;
pub mod audit;
pub mod cli;
pub mod costs;
pub mod grammar;
pub mod learn;
pub mod matcher;
pub mod render;
pub mod scorer;
pub mod search;

pub use alignment::{unify, Alignment, AlignmentId, Entry, Provenance, StructuralKey, UnifyError, Violation};
pub use audit::{AuditError, AuditNode, AuditTrail, Fate, NodeKind};
pub use costs::{symbol_costs, CostMode, CostTable};
pub use grammar::{classify_id_symbols, symbols_to_string, parse_grammar, parse_symbols, Grammar, GrammarError, Origin, PatternId, SpPattern, Symbol};
pub use learn::{
    chunk_candidates, decode, encode_corpus, run_length_encode, segment, select_chunks, ChunkDictionary, Corpus, Tokenization,
};
pub use matcher::{find_matches, find_poset_matches, ColumnOrder, HitSequence};
pub use render::{parse_row_form, render, RenderError, RenderOptions, Style};
pub use scorer::{compression_difference, coverage, encoding_of, relative_probabilities, Score};
pub use search::{build_alignments, ScoredAlignment, SearchConfig, SearchError, SearchOutcome};
