//! Seeded generators for small grammar-like instances.

use rand::seq::SliceRandom;
use rand::Rng;
use spma::{parse_grammar, Grammar, PatternId, SpPattern, Symbol};

const CONTENT: [&str; 5] = ["a", "b", "c", "d", "e"];
const CLASSES: [&str; 3] = ["X", "Y", "Z"];

/// Up to `max_patterns` Old patterns of at most six symbols and a New
/// pattern of at most eight. About half the patterns are bracketed by a
/// class marker pair (`X 1 ... #X`); some bodies refer to a class by its
/// markers, the way higher-level patterns do. New is usually stitched from
/// the contents of a few patterns, otherwise random.
pub fn grammar_like<R: Rng>(rng: &mut R, max_patterns: usize) -> (Grammar, SpPattern) {
    let n = rng.gen_range(1..=max_patterns);
    let mut lines = Vec::new();
    for k in 0..n {
        let class = *CLASSES.choose(rng).unwrap();
        let bracketed = rng.gen_bool(0.5);
        let room = if bracketed { 3 } else { 5 };
        let body_len = rng.gen_range(1..=room);
        let mut body: Vec<String> = Vec::new();
        while body.len() < body_len {
            if body.len() + 2 <= body_len && rng.gen_bool(0.2) {
                let other = *CLASSES.choose(rng).unwrap();
                body.push(other.to_string());
                body.push(format!("#{other}"));
            } else {
                body.push(CONTENT.choose(rng).unwrap().to_string());
            }
        }
        let line = if bracketed {
            format!("{class} {k} {} #{class}", body.join(" "))
        } else {
            format!("{class}{k} {}", body.join(" "))
        };
        lines.push(line);
    }
    let grammar = parse_grammar(&lines.join("\n")).expect("generated grammar parses");

    let mut new: Vec<Symbol> = Vec::new();
    if rng.gen_bool(0.8) {
        // Contents of a few patterns in turn, with the odd symbol dropped
        // or inserted, so that explanations usually span several rows.
        while new.len() < 8 {
            let p = grammar.patterns().choose(rng).unwrap();
            for pos in 0..p.len() {
                if !p.is_id(pos) && rng.gen_bool(0.9) {
                    new.push(p.symbols()[pos]);
                }
                if rng.gen_bool(0.1) {
                    new.push(Symbol::new(CONTENT.choose(rng).unwrap()).unwrap());
                }
            }
            if rng.gen_bool(0.3) {
                break;
            }
        }
        new.truncate(8);
    }
    if new.is_empty() {
        for _ in 0..rng.gen_range(1..=8) {
            let name = if rng.gen_bool(0.15) {
                let c = *CLASSES.choose(rng).unwrap();
                if rng.gen_bool(0.5) {
                    c.to_string()
                } else {
                    format!("#{c}")
                }
            } else {
                CONTENT.choose(rng).unwrap().to_string()
            };
            new.push(Symbol::new(&name).unwrap());
        }
    }
    let new = SpPattern::new_pattern(PatternId(grammar.len() as u32), new).unwrap();
    (grammar, new)
}

/// A random sequence over a small alphabet.
pub fn sequence<R: Rng>(rng: &mut R, len: usize, alphabet: usize) -> Vec<Symbol> {
    (0..len).map(|_| Symbol::new(CONTENT[rng.gen_range(0..alphabet.min(CONTENT.len()))]).unwrap()).collect()
}
