//! Command-line front end. Results go to stdout; audit exports go to the
//! files their flags name. Exit status: 0 success, 1 usage, 2 bad data.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::audit::{AuditTrail, NodeKind};
use crate::costs::CostMode;
use crate::grammar::{parse_grammar, parse_symbols, symbols_to_string, Grammar, PatternId, SpPattern, Symbol};
use crate::learn::{
    chunk_candidates, encode_corpus, run_length_encode, segment_with, select_chunks, Corpus, SegmentConfig, Tokenization,
};
use crate::render::{render, RenderOptions, Style, DEFAULT_WIDTH};
use crate::search::{build_alignments, SearchConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "spma", version, about = "SP-pattern multiple alignment and compression-based learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Align a New pattern against a grammar.
    Align {
        #[command(flatten)]
        search: SearchArgs,
        /// The New pattern, symbols separated by whitespace.
        #[arg(long)]
        new: String,
    },
    /// Align fragments (one per line of a file) joined into one New pattern.
    Classify {
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        fragments: PathBuf,
    },
    /// Discover above-chance chunks and encode the corpus with them.
    Learn {
        #[command(flatten)]
        input: TextArgs,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,
    },
    /// Segment unmarked text by greedy description-length reduction.
    Segment {
        #[command(flatten)]
        input: TextArgs,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Run-length encode a sequence.
    Rle {
        #[command(flatten)]
        input: TextArgs,
    },
    /// Render an alignment rebuilt from an audit trail.
    Render {
        #[arg(long)]
        trail: PathBuf,
        #[arg(long)]
        node: usize,
        #[arg(long, value_enum, default_value_t = StyleArg::Row)]
        style: StyleArg,
        #[arg(long, default_value_t = DEFAULT_WIDTH)]
        width: usize,
    },
    /// Print the ancestry of an audit node, the node itself first.
    Audit {
        #[arg(long)]
        trail: PathBuf,
        #[arg(long)]
        node: usize,
    },
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long, default_value_t = 20)]
    beam: usize,
    #[arg(long, default_value_t = 12)]
    cycles: usize,
    #[arg(long, value_enum, default_value_t = CostArg::Uniform)]
    cost: CostArg,
    #[arg(long, default_value_t = 3)]
    top: usize,
    #[arg(long, value_enum)]
    render: Option<StyleArg>,
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    width: usize,
    #[arg(long)]
    audit_json: Option<PathBuf>,
    #[arg(long)]
    audit_dot: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct TextArgs {
    #[arg(long, group = "source", required_unless_present = "file")]
    text: Option<String>,
    #[arg(long, group = "source")]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TokenArg::Char)]
    tokens: TokenArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CostArg {
    Uniform,
    Freq,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StyleArg {
    Row,
    Column,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TokenArg {
    Char,
    Word,
}

impl From<StyleArg> for Style {
    fn from(s: StyleArg) -> Self {
        match s {
            StyleArg::Row => Style::RowForm,
            StyleArg::Column => Style::ColumnForm,
        }
    }
}

struct Failure(i32, String);

type Outcome = Result<(), Failure>;

fn data<E: std::fmt::Display>(e: E) -> Failure {
    Failure(EXIT_DATA, e.to_string())
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure(EXIT_USAGE, e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure(EXIT_DATA, format!("{}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Align { search, new } => {
            let symbols = parse_symbols(&new).map_err(data)?;
            align(&search, symbols, out)
        }
        Command::Classify { search, fragments } => {
            let text = read(&fragments)?;
            let mut symbols = Vec::new();
            for line in text.lines() {
                symbols.extend(parse_symbols(line).map_err(data)?);
            }
            align(&search, symbols, out)
        }
        Command::Learn { input, max_len, threshold } => learn(&input, max_len, threshold, out),
        Command::Segment { input, rounds, max_len } => seg(&input, rounds, max_len, out),
        Command::Rle { input } => rle(&input, out),
        Command::Render { trail, node, style, width } => {
            let trail = load_trail(&trail)?;
            let rebuilt = trail.replay().map_err(data)?;
            let a = rebuilt.get(&node).ok_or_else(|| data(format!("node {node} is not a rebuilt alignment")))?;
            let text = render(a, &RenderOptions { style: style.into(), width }).map_err(usage)?;
            emit(out, &text)
        }
        Command::Audit { trail, node } => {
            let trail = load_trail(&trail)?;
            let mut text = String::new();
            for n in trail.ancestor_trail(node).map_err(data)? {
                let parents: Vec<String> = n.parents.iter().map(|p| p.to_string()).collect();
                let what = match &n.kind {
                    NodeKind::PatternLeaf(p) => format!("pattern {}", symbols_to_string(p.symbols())),
                    NodeKind::Alignment { .. } => format!("from {}", parents.join(" + ")),
                    NodeKind::CapReached => "cap reached".to_string(),
                };
                let score = n.score.map_or(String::new(), |s| format!(" cd {:.3}", s.cd));
                text.push_str(&format!("{} {} [{}]{}\n", n.id, what, n.fate, score));
            }
            emit(out, &text)
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes()).map_err(|e| Failure(EXIT_DATA, e.to_string()))
}

fn load_trail(path: &Path) -> Result<AuditTrail, Failure> {
    AuditTrail::from_json(&read(path)?).map_err(data)
}

fn load_grammar(path: &Path) -> Result<Grammar, Failure> {
    parse_grammar(&read(path)?).map_err(|e| Failure(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn align(args: &SearchArgs, symbols: Vec<Symbol>, out: &mut dyn Write) -> Outcome {
    let grammar = load_grammar(&args.grammar)?;
    let new = SpPattern::new_pattern(PatternId(grammar.len() as u32), symbols).map_err(data)?;
    let config = SearchConfig {
        beam_width: args.beam,
        max_cycles: args.cycles,
        cost_mode: match args.cost {
            CostArg::Uniform => CostMode::Uniform,
            CostArg::Freq => CostMode::Frequency,
        },
        jobs: args.jobs,
        ..SearchConfig::default()
    };
    config.check().map_err(usage)?;
    let opts = args.render.map(|s| RenderOptions { style: s.into(), width: args.width });
    if let Some(o) = &opts {
        if o.width < crate::render::MIN_WIDTH {
            return Err(usage(crate::render::RenderError::InvalidWidth(o.width)));
        }
    }

    let mut trail = AuditTrail::new();
    let outcome = build_alignments(&new, &grammar, &config, &mut trail).map_err(data)?;
    let mut text = format!(
        "{} alignments kept after {} cycles ({} candidates)\n",
        outcome.ranked.len(),
        outcome.cycles_run,
        outcome.candidates
    );
    for (rank, r) in outcome.ranked.iter().take(args.top).enumerate() {
        let s = r.score;
        text.push_str(&format!(
            "\n{}. {}\n   CD {:.3}  B_N {:.3}  B_E {:.3}  p_abs {:.6e}  p_rel {:.6}\n",
            rank + 1,
            r.alignment,
            s.cd,
            s.b_n,
            s.b_e,
            s.p_abs,
            r.p_rel
        ));
        if let Some(o) = &opts {
            text.push('\n');
            text.push_str(&render(&r.alignment, o).map_err(usage)?);
        }
    }
    if let Some(path) = &args.audit_json {
        write_file(path, &trail.to_json())?;
    }
    if let Some(path) = &args.audit_dot {
        write_file(path, &trail.to_dot())?;
    }
    emit(out, &text)
}

fn corpus(input: &TextArgs) -> Result<(Corpus, Tokenization), Failure> {
    let text = match (&input.text, &input.file) {
        (Some(t), _) => t.clone(),
        (None, Some(f)) => read(f)?,
        (None, None) => return Err(usage("one of --text or --file is required")),
    };
    let tokens = match input.tokens {
        TokenArg::Char => Tokenization::Char,
        TokenArg::Word => Tokenization::Word,
    };
    Ok((Corpus::from_text(&text, tokens).map_err(data)?, tokens))
}

fn joined(seq: &[Symbol], tokens: Tokenization) -> String {
    let names: Vec<&str> = seq.iter().map(|s| s.name()).collect();
    match tokens {
        Tokenization::Char => names.concat(),
        Tokenization::Word => names.join(" "),
    }
}

fn learn(input: &TextArgs, max_len: usize, threshold: f64, out: &mut dyn Write) -> Outcome {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(usage("--threshold must be positive"));
    }
    if max_len < 2 {
        return Err(usage("--max-len must be at least 2"));
    }
    let (c, tokens) = corpus(input)?;
    let dict = select_chunks(&chunk_candidates(&c, max_len), &c, threshold);
    let enc = encode_corpus(&c, &dict);
    let mut text = String::new();
    for e in &dict.entries {
        text.push_str(&format!(
            "{} = {}  observed {}  expected {:.3}\n",
            e.code,
            joined(&e.chunk, tokens),
            e.observed,
            e.expected
        ));
    }
    let names: Vec<&str> = enc.encoded.iter().map(|s| s.name()).collect();
    text.push_str(&format!("encoded: {}\n", names.join(" ")));
    text.push_str(&format!("bits: {:.3} raw, {:.3} encoded\n", enc.raw_bits, enc.encoded_bits));
    emit(out, &text)
}

fn seg(input: &TextArgs, rounds: usize, max_len: usize, out: &mut dyn Write) -> Outcome {
    if max_len < 2 {
        return Err(usage("--max-len must be at least 2"));
    }
    let (c, tokens) = corpus(input)?;
    let s = segment_with(&c, &SegmentConfig { rounds, max_len, ..SegmentConfig::default() });
    let mut text = String::new();
    for (e, word) in s.lexicon.entries.iter().zip(s.words()) {
        text.push_str(&format!("{} = {}\n", e.code, joined(&word, tokens)));
    }
    let pieces: Vec<String> = s.pieces(c.symbols()).iter().map(|p| joined(p, tokens)).collect();
    let sep = match tokens {
        Tokenization::Char => " ",
        Tokenization::Word => " | ",
    };
    text.push_str(&format!("segmented: {}\n", pieces.join(sep)));
    text.push_str(&format!(
        "bits: {:.3} -> {:.3}\n",
        s.bits.first().copied().unwrap_or(0.0),
        s.bits.last().copied().unwrap_or(0.0)
    ));
    emit(out, &text)
}

fn rle(input: &TextArgs, out: &mut dyn Write) -> Outcome {
    let (c, tokens) = corpus(input)?;
    let mut text = String::new();
    for (unit, n) in run_length_encode(c.symbols()) {
        text.push_str(&format!("{} x{n}\n", joined(&unit, tokens)));
    }
    emit(out, &text)
}
