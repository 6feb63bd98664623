//! Text formats for codes and partition families.
//!
//! Code file:
//!
//! ```text
//! # optional comments
//! q=2 n=4 t1=2 t2=3
//! 0010
//! 0011
//! ```
//!
//! `t1`/`t2` are optional; when present the window is checked on load.
//!
//! Family file:
//!
//! ```text
//! q=2 k=2
//! L1: 0
//! R1: 1
//! L2: 01
//! R2:
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::family::{FamilyError, Level, PartitionFamily};
use crate::word::{Alphabet, CodeError, CodeSet, OverlapWindow, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing header line")]
    MissingHeader,
    #[error("header lacks {0}=")]
    MissingKey(&'static str),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_header(line: usize, text: &str) -> Result<BTreeMap<String, usize>, FormatError> {
    let mut out = BTreeMap::new();
    for field in text.split_whitespace() {
        let (key, value) =
            field.split_once('=').ok_or_else(|| syntax(line, format!("expected key=value, got {field:?}")))?;
        let value: usize = value.parse().map_err(|_| syntax(line, format!("bad integer in {field:?}")))?;
        if out.insert(key.to_string(), value).is_some() {
            return Err(syntax(line, format!("duplicate key {key}")));
        }
    }
    Ok(out)
}

fn take(header: &BTreeMap<String, usize>, key: &'static str) -> Result<usize, FormatError> {
    header.get(key).copied().ok_or(FormatError::MissingKey(key))
}

/// Parses a code file and checks its declared window, if any.
pub fn parse_code(text: &str) -> Result<CodeSet, FormatError> {
    let mut lines = content_lines(text);
    let (line, head) = lines.next().ok_or(FormatError::MissingHeader)?;
    if !head.contains('=') {
        return Err(FormatError::MissingHeader);
    }
    let header = parse_header(line, head)?;
    if let Some(key) = header.keys().find(|k| !["q", "n", "t1", "t2"].contains(&k.as_str())) {
        return Err(syntax(line, format!("unknown header key {key}")));
    }
    let alphabet = Alphabet::new(take(&header, "q")?)?;
    let n = take(&header, "n")?;
    if n == 0 {
        return Err(syntax(line, "n must be positive"));
    }
    let mut code = CodeSet::new(alphabet, n);
    for (line, l) in lines {
        for token in l.split_whitespace() {
            let w = Word::parse(token, alphabet).map_err(|e| syntax(line, e.to_string()))?;
            code.insert(w).map_err(|e| syntax(line, e.to_string()))?;
        }
    }
    match (header.get("t1"), header.get("t2")) {
        (None, None) => {}
        (Some(&t1), Some(&t2)) => {
            code.set_window(Some(OverlapWindow::new(t1, t2, n)?));
            code.check_declared_window()?;
        }
        _ => return Err(syntax(line, "t1 and t2 must be given together")),
    }
    Ok(code)
}

/// Writes a code file. Each comment line is prefixed with `# `.
pub fn format_code(code: &CodeSet, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        for l in c.lines() {
            let _ = writeln!(out, "# {l}");
        }
    }
    let _ = write!(out, "q={} n={}", code.q(), code.n());
    if let Some(w) = code.window() {
        let _ = write!(out, " t1={} t2={}", w.t1(), w.t2());
    }
    out.push('\n');
    for w in code.iter() {
        let _ = writeln!(out, "{w}");
    }
    out
}

/// Parses and validates a family file.
pub fn parse_family(text: &str) -> Result<PartitionFamily, FormatError> {
    let mut lines = content_lines(text);
    let (line, head) = lines.next().ok_or(FormatError::MissingHeader)?;
    let header = parse_header(line, head)?;
    if let Some(key) = header.keys().find(|k| !["q", "k"].contains(&k.as_str())) {
        return Err(syntax(line, format!("unknown header key {key}")));
    }
    let alphabet = Alphabet::new(take(&header, "q")?)?;
    let k = take(&header, "k")?;
    let mut left = vec![None; k];
    let mut right = vec![None; k];
    for (line, l) in lines {
        let (tag, rest) = l.split_once(':').ok_or_else(|| syntax(line, "expected L<i>: or R<i>:"))?;
        let tag = tag.trim();
        let (side, idx) = match tag.split_at_checked(1) {
            Some(("L", i)) => (&mut left, i),
            Some(("R", i)) => (&mut right, i),
            _ => return Err(syntax(line, format!("bad tag {tag:?}"))),
        };
        let i: usize = idx.parse().map_err(|_| syntax(line, format!("bad level in {tag:?}")))?;
        if !(1..=k).contains(&i) {
            return Err(syntax(line, format!("level {i} outside [1, {k}]")));
        }
        if side[i - 1].is_some() {
            return Err(syntax(line, format!("{tag} given twice")));
        }
        let words = rest
            .split_whitespace()
            .map(|t| Word::parse(t, alphabet))
            .collect::<Result<BTreeSet<_>, _>>()
            .map_err(|e| syntax(line, e.to_string()))?;
        side[i - 1] = Some(words);
    }
    let levels =
        left.into_iter().zip(right).map(|(l, r)| Level::new(l.unwrap_or_default(), r.unwrap_or_default())).collect();
    Ok(PartitionFamily::try_new(alphabet, levels)?)
}

pub fn format_family(f: &PartitionFamily) -> String {
    let join = |s: &BTreeSet<Word>| s.iter().map(|w| format!(" {w}")).collect::<String>();
    let mut out = format!("q={} k={}\n", f.q(), f.depth());
    for i in 1..=f.depth() {
        let _ = writeln!(out, "L{i}:{}", join(f.left(i)));
        let _ = writeln!(out, "R{i}:{}", join(f.right(i)));
    }
    out
}
