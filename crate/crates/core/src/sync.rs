//! Burst insertion/deletion channel and a strict aligned decoder, used to
//! measure how quickly an overlap-free code exposes a loss of alignment.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::word::{Alphabet, CodeSet, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyncError {
    #[error("codeword index {index} out of range for a code of {size} words")]
    Index { index: usize, size: usize },
    #[error("burst length must be positive")]
    EmptyBurst,
    #[error("edit at {position} with burst {burst} does not fit a stream of length {len}")]
    OutOfRange { position: usize, burst: usize, len: usize },
    #[error("inserted symbols have length {found}, burst is {burst}")]
    InsertLength { found: usize, burst: usize },
    #[error("symbol {0} is outside the alphabet")]
    Symbol(u8),
    #[error("empty code")]
    EmptyCode,
}

/// A symbol sequence together with the codeword boundaries it was built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolStream {
    pub symbols: Vec<u8>,
    /// Start offsets of the codewords before corruption.
    pub boundaries: Vec<usize>,
}

impl SymbolStream {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.symbols.iter().map(|&s| char::from_digit(s as u32, 36).expect("symbol below 36")).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    Delete,
    Insert,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub kind: EditKind,
    pub position: usize,
    pub burst: usize,
    /// Seed for inserted symbols when `symbols` is absent.
    #[serde(default)]
    pub seed: u64,
    /// Explicit inserted symbols.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<Vec<u8>>,
}

impl CorruptionSpec {
    pub fn delete(position: usize, burst: usize) -> Self {
        CorruptionSpec { kind: EditKind::Delete, position, burst, seed: 0, symbols: None }
    }

    pub fn insert(position: usize, burst: usize, seed: u64) -> Self {
        CorruptionSpec { kind: EditKind::Insert, position, burst, seed, symbols: None }
    }

    pub fn insert_symbols(position: usize, symbols: Vec<u8>) -> Self {
        CorruptionSpec { kind: EditKind::Insert, position, burst: symbols.len(), seed: 0, symbols: Some(symbols) }
    }
}

/// Burst lengths for which a `(t1,t2)`-overlap-free code detects a single
/// burst: `[min(t1, n-t2), min(n-t1, t2)]`.
pub fn burst_range(n: usize, t1: usize, t2: usize) -> (usize, usize) {
    (t1.min(n - t2), (n - t1).min(t2))
}

pub fn encode_stream(code: &CodeSet, message: &[usize]) -> Result<SymbolStream, SyncError> {
    let words: Vec<&Word> = code.iter().collect();
    let mut symbols = Vec::with_capacity(message.len() * code.n());
    let mut boundaries = Vec::with_capacity(message.len());
    for &i in message {
        let w = words.get(i).ok_or(SyncError::Index { index: i, size: words.len() })?;
        boundaries.push(symbols.len());
        symbols.extend_from_slice(w.symbols());
    }
    Ok(SymbolStream { symbols, boundaries })
}

/// Applies one burst. Boundaries at or after the edit are dropped, since
/// they no longer describe the stream.
pub fn corrupt(stream: &SymbolStream, spec: &CorruptionSpec, alphabet: Alphabet) -> Result<SymbolStream, SyncError> {
    if spec.burst == 0 {
        return Err(SyncError::EmptyBurst);
    }
    let len = stream.len();
    let out_of_range = SyncError::OutOfRange { position: spec.position, burst: spec.burst, len };
    let mut symbols = stream.symbols.clone();
    match spec.kind {
        EditKind::Delete => {
            if spec.position + spec.burst > len {
                return Err(out_of_range);
            }
            symbols.drain(spec.position..spec.position + spec.burst);
        }
        EditKind::Insert => {
            if spec.position > len {
                return Err(out_of_range);
            }
            let inserted = match &spec.symbols {
                Some(s) if s.len() != spec.burst => {
                    return Err(SyncError::InsertLength { found: s.len(), burst: spec.burst })
                }
                Some(s) => {
                    if let Some(&bad) = s.iter().find(|&&c| !alphabet.contains(c)) {
                        return Err(SyncError::Symbol(bad));
                    }
                    s.clone()
                }
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                    (0..spec.burst).map(|_| rng.gen_range(0..alphabet.q() as u8)).collect()
                }
            };
            symbols.splice(spec.position..spec.position, inserted);
        }
    }
    let boundaries = stream.boundaries.iter().copied().filter(|&b| b < spec.position).collect();
    Ok(SymbolStream { symbols, boundaries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum DecodeEvent {
    Matched {
        start: usize,
        word: Word,
    },
    /// The aligned block `[start, end)` is not a codeword.
    Desync {
        start: usize,
        end: usize,
    },
    /// The stream ended `len` symbols into a block.
    Truncated {
        start: usize,
        len: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeLog {
    pub events: Vec<DecodeEvent>,
}

impl DecodeLog {
    /// Symbols read when alignment loss was first observed.
    pub fn detected_at(&self) -> Option<usize> {
        self.events.iter().find_map(|e| match *e {
            DecodeEvent::Desync { end, .. } => Some(end),
            DecodeEvent::Truncated { start, len } => Some(start + len),
            DecodeEvent::Matched { .. } => None,
        })
    }

    pub fn matched(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, DecodeEvent::Matched { .. })).count()
    }
}

/// Reads aligned blocks of `n` symbols and stops at the first block that is
/// not a codeword. There is no resynchronisation.
pub fn scan_decode(stream: &SymbolStream, code: &CodeSet) -> DecodeLog {
    let n = code.n();
    let mut events = Vec::new();
    let mut start = 0;
    while start < stream.len() {
        let end = start + n;
        if end > stream.len() {
            events.push(DecodeEvent::Truncated { start, len: stream.len() - start });
            break;
        }
        let block = &stream.symbols[start..end];
        match code.iter().find(|w| w.symbols() == block) {
            Some(w) => events.push(DecodeEvent::Matched { start, word: w.clone() }),
            None => {
                events.push(DecodeEvent::Desync { start, end });
                break;
            }
        }
        start = end;
    }
    DecodeLog { events }
}

/// Symbols read past the edit position before the decoder lost alignment;
/// `None` if it never did.
pub fn detection_latency(
    stream: &SymbolStream,
    code: &CodeSet,
    spec: &CorruptionSpec,
    alphabet: Alphabet,
) -> Result<Option<usize>, SyncError> {
    let corrupted = corrupt(stream, spec, alphabet)?;
    Ok(scan_decode(&corrupted, code).detected_at().map(|at| at.saturating_sub(spec.position)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveConfig {
    /// Codewords in each message; edits fall in the first
    /// `message_len - trailing` codewords.
    pub message_len: usize,
    pub trailing: usize,
    /// Above this many messages, a seeded sample of this size is used.
    pub max_messages: usize,
    pub seed: u64,
    /// Extra codewords appended for the re-run of any over-bound case.
    pub widen_by: usize,
}

impl Default for ExhaustiveConfig {
    fn default() -> Self {
        ExhaustiveConfig { message_len: 6, trailing: 3, max_messages: 4096, seed: 1, widen_by: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatencyCase {
    pub message: Vec<usize>,
    pub edit: CorruptionSpec,
    pub latency: Option<usize>,
    /// Latency in the widened re-run.
    pub widened_latency: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KindReport {
    pub kind: EditKind,
    pub bound: usize,
    pub runs: u64,
    pub max_latency: Option<usize>,
    /// Latency value to number of runs; `None` keys are never serialized as
    /// the undetected count is separate.
    pub histogram: BTreeMap<usize, u64>,
    pub undetected: u64,
    /// Runs over the bound (or undetected), with their widened re-runs.
    pub over_bound: Vec<LatencyCase>,
    /// Over-bound runs that still exceed `bound + n` after widening.
    pub confirmed_misses: u64,
}

impl KindReport {
    pub fn within_bound(&self) -> bool {
        self.over_bound.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatencyReport {
    pub q: usize,
    pub n: usize,
    pub window: (usize, usize),
    pub bursts: (usize, usize),
    pub messages: usize,
    pub sampled: bool,
    pub deletion: KindReport,
    pub insertion: KindReport,
}

fn messages(code_size: usize, len: usize, cfg: &ExhaustiveConfig) -> (Vec<Vec<usize>>, bool) {
    let total = (code_size as u128).checked_pow(len as u32);
    if total.is_some_and(|t| t <= cfg.max_messages as u128) {
        let total = total.unwrap() as usize;
        let all = (0..total)
            .map(|mut i| {
                let mut m = vec![0; len];
                for slot in m.iter_mut().rev() {
                    *slot = i % code_size;
                    i /= code_size;
                }
                m
            })
            .collect();
        (all, false)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let sample = (0..cfg.max_messages).map(|_| (0..len).map(|_| rng.gen_range(0..code_size)).collect()).collect();
        (sample, true)
    }
}

fn all_strings(q: usize, b: usize) -> Vec<Vec<u8>> {
    let alphabet = Alphabet::new(q).expect("q already validated");
    alphabet.words(b).map(Word::into_symbols).collect()
}

/// Exhaustive single-burst experiment: every message (or a seeded sample),
/// every edit position in the leading codewords, every burst length in the
/// detection range, and for insertions every inserted string.
///
/// Latency bounds are `2n` for deletions and `3n` for insertions. A run over
/// its bound is re-run with `widen_by` more codewords of context, and counts
/// as a confirmed miss if it still exceeds `bound + n` there.
pub fn exhaustive_latency(
    code: &CodeSet,
    t1: usize,
    t2: usize,
    cfg: &ExhaustiveConfig,
    exec: Execution,
) -> Result<LatencyReport, SyncError> {
    if code.is_empty() {
        return Err(SyncError::EmptyCode);
    }
    let n = code.n();
    let q = code.q();
    let alphabet = code.alphabet();
    let (bmin, bmax) = burst_range(n, t1, t2);
    let (msgs, sampled) = messages(code.len(), cfg.message_len, cfg);
    let edit_span = cfg.message_len.saturating_sub(cfg.trailing) * n;

    let mut edits: Vec<CorruptionSpec> = Vec::new();
    for b in bmin.max(1)..=bmax {
        for p in 0..edit_span {
            edits.push(CorruptionSpec::delete(p, b));
        }
    }
    let deletions = edits.len();
    for b in bmin.max(1)..=bmax {
        for p in 0..edit_span {
            for s in all_strings(q, b) {
                edits.push(CorruptionSpec::insert_symbols(p, s));
            }
        }
    }

    let results: Vec<Result<Vec<(usize, Option<usize>)>, SyncError>> = exec.map(&msgs, |m| {
        let stream = encode_stream(code, m)?;
        edits.iter().enumerate().map(|(i, e)| Ok((i, detection_latency(&stream, code, e, alphabet)?))).collect()
    });

    let mut reports = [EditKind::Delete, EditKind::Insert].map(|kind| KindReport {
        kind,
        bound: if kind == EditKind::Delete { 2 * n } else { 3 * n },
        runs: 0,
        max_latency: None,
        histogram: BTreeMap::new(),
        undetected: 0,
        over_bound: Vec::new(),
        confirmed_misses: 0,
    });
    for (m, res) in msgs.iter().zip(results) {
        for (i, latency) in res? {
            let edit = &edits[i];
            let r = &mut reports[usize::from(i >= deletions)];
            r.runs += 1;
            match latency {
                Some(l) => {
                    *r.histogram.entry(l).or_default() += 1;
                    r.max_latency = r.max_latency.max(Some(l));
                }
                None => r.undetected += 1,
            }
            if latency.is_none_or(|l| l > r.bound) {
                let mut widened = m.clone();
                widened.extend(std::iter::repeat_n(0, cfg.widen_by));
                let stream = encode_stream(code, &widened)?;
                let widened_latency = detection_latency(&stream, code, edit, alphabet)?;
                if widened_latency.is_none_or(|l| l > r.bound + n) {
                    r.confirmed_misses += 1;
                }
                r.over_bound.push(LatencyCase { message: m.clone(), edit: edit.clone(), latency, widened_latency });
            }
        }
    }
    let [deletion, insertion] = reports;
    Ok(LatencyReport {
        q,
        n,
        window: (t1, t2),
        bursts: (bmin, bmax),
        messages: msgs.len(),
        sampled,
        deletion,
        insertion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(words: &str) -> CodeSet {
        let n = words.split_whitespace().next().unwrap().len();
        CodeSet::parse_words(Alphabet::new(2).unwrap(), n, words).unwrap()
    }

    #[test]
    fn encode_examples() {
        let c = code("0001 0011");
        assert_eq!(encode_stream(&c, &[0, 1, 0]).unwrap().to_text(), "000100110001");
        assert!(encode_stream(&c, &[]).unwrap().is_empty());
        let single = CodeSet::parse_words(Alphabet::new(3).unwrap(), 4, "0212").unwrap();
        assert_eq!(encode_stream(&single, &[0, 0]).unwrap().to_text(), "02120212");
        assert!(matches!(encode_stream(&c, &[2]), Err(SyncError::Index { .. })));
    }

    #[test]
    fn corrupt_examples() {
        let a = Alphabet::new(2).unwrap();
        let s = encode_stream(&code("0001 0011"), &[0, 1, 0]).unwrap();
        let d = corrupt(&s, &CorruptionSpec::delete(5, 1), a).unwrap();
        assert_eq!(d.len(), 11);
        assert_eq!(d.to_text(), "00010110001");
        assert_eq!(d.boundaries, vec![0, 4]);
        assert_eq!(corrupt(&s, &CorruptionSpec::insert(3, 2, 7), a).unwrap().len(), 14);
        assert_eq!(corrupt(&s, &CorruptionSpec::delete(5, 0), a), Err(SyncError::EmptyBurst));
        assert!(corrupt(&s, &CorruptionSpec::delete(11, 2), a).is_err());
        let same = corrupt(&s, &CorruptionSpec::insert(3, 2, 7), a).unwrap();
        assert_eq!(same, corrupt(&s, &CorruptionSpec::insert(3, 2, 7), a).unwrap());
    }

    #[test]
    fn clean_stream_has_no_desync() {
        let c = code("0010 0011");
        let s = encode_stream(&c, &[0, 1, 1, 0]).unwrap();
        let log = scan_decode(&s, &c);
        assert_eq!(log.matched(), 4);
        assert_eq!(log.detected_at(), None);
    }

    #[test]
    fn deletion_detected_within_two_blocks() {
        let c = code("0010 0011");
        let a = Alphabet::new(2).unwrap();
        let s = encode_stream(&c, &[0, 1, 0, 1, 1]).unwrap();
        for p in 0..8 {
            for b in 1..=2 {
                let l = detection_latency(&s, &c, &CorruptionSpec::delete(p, b), a).unwrap().unwrap();
                assert!(l <= 8, "p={p} b={b} latency {l}");
            }
        }
    }

    #[test]
    fn ranges() {
        assert_eq!(burst_range(4, 2, 3), (1, 2));
        assert_eq!(burst_range(6, 1, 5), (1, 5));
        assert_eq!(burst_range(6, 3, 3), (3, 3));
    }
}
