#![allow(dead_code)]

pub mod fixtures;
pub mod gen;
pub mod oracle;

use spma::Alignment;

pub fn row_label(a: &Alignment, row: usize) -> String {
    let p = &a.rows()[row];
    if p.is_new() {
        "New".to_string()
    } else {
        p.label()
    }
}

pub fn row_labels(a: &Alignment) -> Vec<String> {
    let mut labels: Vec<String> = (0..a.rows().len()).map(|r| row_label(a, r)).collect();
    labels.sort();
    labels
}

pub fn labelled_matched_columns(a: &Alignment) -> Vec<Vec<(String, usize)>> {
    let mut cols: Vec<Vec<(String, usize)>> = a
        .columns()
        .iter()
        .filter(|c| c.len() >= 2)
        .map(|c| {
            let mut v: Vec<_> = c.iter().map(|e| (row_label(a, e.row), e.pos)).collect();
            v.sort();
            v
        })
        .collect();
    cols.sort();
    cols
}

pub fn owned(cols: Vec<Vec<(&str, usize)>>) -> Vec<Vec<(String, usize)>> {
    cols.into_iter().map(|c| c.into_iter().map(|(l, p)| (l.to_string(), p)).collect()).collect()
}

/// First symbols of the Old rows.
pub fn heads(a: &Alignment) -> Vec<String> {
    a.rows().iter().filter(|r| !r.is_new()).map(|r| r.symbols()[0].name().to_string()).collect()
}
