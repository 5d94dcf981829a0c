//! Plain-text displays of an alignment.
//!
//! Row form puts one pattern per line with its symbols under a shared
//! column grid; a `|` runs vertically through every column that links
//! rows. Column form transposes that: one line per alignment column, one
//! field per row, linked symbols joined by a run of `-`.

use thiserror::Error;

use crate::alignment::{Alignment, Entry};

pub const DEFAULT_WIDTH: usize = 160;
pub const MIN_WIDTH: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    #[default]
    RowForm,
    ColumnForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub style: Style,
    pub width: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { style: Style::RowForm, width: DEFAULT_WIDTH }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("width {0} is below the minimum of {MIN_WIDTH}")]
    InvalidWidth(usize),
    #[error("{needed} characters are needed but the width is {width}")]
    WidthExceeded { needed: usize, width: usize },
}

pub fn render(a: &Alignment, opts: &RenderOptions) -> Result<String, RenderError> {
    if opts.width < MIN_WIDTH {
        return Err(RenderError::InvalidWidth(opts.width));
    }
    match opts.style {
        Style::RowForm => row_form(a, opts.width),
        Style::ColumnForm => column_form(a, opts.width),
    }
}

fn digits(n: usize) -> usize {
    n.to_string().len()
}

fn push_padded(line: &mut String, text: &str, width: usize) {
    line.push_str(text);
    line.extend(std::iter::repeat_n(' ', width.saturating_sub(text.chars().count())));
}

fn pad_to(line: &mut String, width: usize) {
    let have = line.chars().count();
    line.extend(std::iter::repeat_n(' ', width.saturating_sub(have)));
}

fn finish(mut line: String, out: &mut String) {
    line.truncate(line.trim_end().len());
    out.push_str(&line);
    out.push('\n');
}

fn row_form(a: &Alignment, width: usize) -> Result<String, RenderError> {
    let n_rows = a.rows().len();
    let label = digits(n_rows.saturating_sub(1));
    let margins = 2 * label + 2;
    let slot = |c: usize| a.column_symbol(c).name().chars().count();

    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut used = 0;
    for c in 0..a.columns().len() {
        let w = slot(c);
        if margins + w > width {
            return Err(RenderError::WidthExceeded { needed: margins + w, width });
        }
        match blocks.last_mut() {
            Some(block) if used + 1 + w + margins <= width => {
                block.push(c);
                used += 1 + w;
            }
            _ => {
                blocks.push(vec![c]);
                used = w;
            }
        }
    }
    if blocks.is_empty() {
        blocks.push(Vec::new());
    }

    let mut out = String::new();
    for (b, block) in blocks.iter().enumerate() {
        if b > 0 {
            out.push('\n');
        }
        let content: usize = block.iter().map(|&c| slot(c)).sum::<usize>() + block.len().saturating_sub(1);
        for r in 0..n_rows {
            let mut line = String::new();
            push_padded(&mut line, &r.to_string(), label + 1);
            for (k, &c) in block.iter().enumerate() {
                if k > 0 {
                    line.push(' ');
                }
                let col = &a.columns()[c];
                let w = slot(c);
                if let Some(e) = col.iter().find(|e| e.row == r) {
                    push_padded(&mut line, a.symbol_at(*e).name(), w);
                } else if spans(col, r, r) {
                    push_padded(&mut line, &centered_bar(w), w);
                } else {
                    push_padded(&mut line, "", w);
                }
            }
            pad_to(&mut line, label + 1 + content);
            line.push(' ');
            line.push_str(&r.to_string());
            finish(line, &mut out);

            if r + 1 < n_rows {
                let mut link = " ".repeat(label + 1);
                for (k, &c) in block.iter().enumerate() {
                    if k > 0 {
                        link.push(' ');
                    }
                    let w = slot(c);
                    let bar = if spans(&a.columns()[c], r, r + 1) { centered_bar(w) } else { String::new() };
                    push_padded(&mut link, &bar, w);
                }
                finish(link, &mut out);
            }
        }
    }
    Ok(out)
}

/// True when the column has entries at or above `upper` and at or below
/// `lower`.
fn spans(col: &[Entry], upper: usize, lower: usize) -> bool {
    col.iter().any(|e| e.row <= upper) && col.iter().any(|e| e.row >= lower) && col.len() >= 2
}

fn centered_bar(w: usize) -> String {
    format!("{}|", " ".repeat((w - 1) / 2))
}

fn column_form(a: &Alignment, width: usize) -> Result<String, RenderError> {
    let rows = a.rows();
    let fields: Vec<usize> = rows
        .iter()
        .enumerate()
        .map(|(r, p)| p.symbols().iter().map(|s| s.name().chars().count()).max().unwrap_or(0).max(digits(r)))
        .collect();
    let mut starts = Vec::with_capacity(fields.len());
    let mut at = 0;
    for &f in &fields {
        starts.push(at);
        at += f + 3;
    }
    let needed = at - 3;
    if needed > width {
        return Err(RenderError::WidthExceeded { needed, width });
    }

    let header = {
        let mut line = String::new();
        for (r, &start) in starts.iter().enumerate() {
            pad_to(&mut line, start);
            line.push_str(&r.to_string());
        }
        line
    };

    let mut out = String::new();
    finish(header.clone(), &mut out);
    out.push('\n');
    for col in a.columns() {
        let mut chars = vec![' '; needed];
        let mut prev_end: Option<usize> = None;
        for e in col {
            let name = a.symbol_at(*e).name();
            let start = starts[e.row];
            if let Some(end) = prev_end {
                for ch in &mut chars[end + 1..start - 1] {
                    *ch = '-';
                }
            }
            for (k, ch) in name.chars().enumerate() {
                chars[start + k] = ch;
            }
            prev_end = Some(start + name.chars().count());
        }
        finish(chars.into_iter().collect(), &mut out);
    }
    out.push('\n');
    finish(header, &mut out);
    Ok(out)
}

/// Row-form text read back into rows of symbol names and the column
/// structure, columns left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedRowForm {
    pub rows: Vec<Vec<String>>,
    pub columns: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

fn malformed(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Malformed { line: line + 1, reason: reason.into() }
}

/// Inverse of the row form. Symbols sharing a start offset within a block
/// form one column; connector marks are checked against that structure.
pub fn parse_row_form(text: &str) -> Result<ParsedRowForm, ParseError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut blocks: Vec<Vec<(usize, &str)>> = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.starts_with('0') && line[1..].starts_with(' ') {
            blocks.push(Vec::new());
        }
        match blocks.last_mut() {
            Some(b) => b.push((i, line)),
            None if line.is_empty() => {}
            None => return Err(malformed(i, "text before row 0")),
        }
    }
    let mut n_rows = None;
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut columns = Vec::new();
    for block in &blocks {
        let symbol_lines: Vec<(usize, &str)> =
            block.iter().copied().filter(|(_, l)| l.starts_with(|c: char| c.is_ascii_digit())).collect();
        let count = symbol_lines.len();
        if *n_rows.get_or_insert(count) != count {
            return Err(malformed(block[0].0, "blocks disagree on the number of rows"));
        }
        if rows.is_empty() {
            rows = vec![Vec::new(); count];
        }
        let label = digits(count.saturating_sub(1));
        let content_of = |line: &str| -> Vec<(usize, String)> {
            let body: Vec<char> = line.chars().collect();
            let mut tokens = Vec::new();
            let mut k = label + 1;
            while k < body.len() {
                if body[k] == ' ' {
                    k += 1;
                    continue;
                }
                let start = k;
                while k < body.len() && body[k] != ' ' {
                    k += 1;
                }
                tokens.push((start, body[start..k].iter().collect::<String>()));
            }
            tokens
        };

        let mut by_offset: std::collections::BTreeMap<usize, Vec<(usize, String)>> = Default::default();
        let mut bars: Vec<Vec<usize>> = vec![Vec::new(); 2 * count];
        for (r, &(i, line)) in symbol_lines.iter().enumerate() {
            if !line.starts_with(&r.to_string()) {
                return Err(malformed(i, format!("expected row {r}")));
            }
            let mut tokens = content_of(line);
            match tokens.pop() {
                Some((_, last)) if last == r.to_string() => {}
                _ => return Err(malformed(i, "missing right-hand row index")),
            }
            for (start, tok) in tokens {
                if tok == "|" {
                    bars[2 * r].push(start);
                } else {
                    by_offset.entry(start).or_default().push((r, tok));
                }
            }
        }
        for &(i, line) in block {
            if line.starts_with(|c: char| c.is_ascii_digit()) {
                continue;
            }
            let above = symbol_lines.iter().take_while(|(j, _)| *j < i).count();
            if above == 0 || above >= count {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(malformed(i, "connector outside the rows"));
            }
            for (start, tok) in content_of(line) {
                if tok != "|" {
                    return Err(malformed(i, format!("unexpected {tok:?} on a connector line")));
                }
                bars[2 * (above - 1) + 1].push(start);
            }
        }

        let mut expected: Vec<Vec<usize>> = vec![Vec::new(); 2 * count];
        for (&start, members) in &by_offset {
            let w = members[0].1.chars().count();
            if members.iter().any(|(_, t)| t.chars().count() != w || *t != members[0].1) {
                return Err(malformed(block[0].0, format!("mixed names in the column at offset {start}")));
            }
            let mut col = Vec::new();
            for (r, tok) in members {
                col.push(Entry { row: *r, pos: rows[*r].len() });
                rows[*r].push(tok.clone());
            }
            if col.len() >= 2 {
                let (lo, hi) = (col[0].row, col[col.len() - 1].row);
                let bar = start + (w - 1) / 2;
                for r in lo + 1..hi {
                    if !col.iter().any(|e| e.row == r) {
                        expected[2 * r].push(bar);
                    }
                }
                for r in lo..hi {
                    expected[2 * r + 1].push(bar);
                }
            }
            columns.push(col);
        }
        for (k, (mut got, mut want)) in bars.into_iter().zip(expected).enumerate() {
            got.sort_unstable();
            want.sort_unstable();
            if got != want {
                return Err(malformed(block[0].0, format!("connectors disagree with columns at display line {}", k + 1)));
            }
        }
    }
    Ok(ParsedRowForm { rows, columns })
}
