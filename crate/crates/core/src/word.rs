//! Words over a q-ary alphabet, overlap predicates and codes.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest alphabet the base-36 text format can express.
pub const MAX_Q: usize = 36;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet size {0} outside [2, {MAX_Q}]")]
    AlphabetSize(usize),
    #[error("symbol {symbol} is not below q = {q}")]
    SymbolOutOfRange { symbol: u8, q: usize },
    #[error("invalid base-36 digit {0:?}")]
    BadDigit(char),
    #[error("empty word")]
    Empty,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("overlap window ({t1},{t2}) invalid for block length {n}: need 1 <= t1 <= t2 <= n-1")]
    Window { t1: usize, t2: usize, n: usize },
}

/// The alphabet `{0, .., q-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet {
    q: u8,
}

impl Alphabet {
    pub fn new(q: usize) -> Result<Self, WordError> {
        if !(2..=MAX_Q).contains(&q) {
            return Err(WordError::AlphabetSize(q));
        }
        Ok(Alphabet { q: q as u8 })
    }

    #[inline]
    pub fn q(self) -> usize {
        self.q as usize
    }

    pub fn symbols(self) -> impl Iterator<Item = u8> + Clone {
        0..self.q
    }

    pub fn contains(self, symbol: u8) -> bool {
        symbol < self.q
    }

    /// Number of words of length `n`, or `None` if it does not fit in a `u64`.
    pub fn word_count(self, n: usize) -> Option<u64> {
        (self.q as u64).checked_pow(u32::try_from(n).ok()?)
    }

    /// All words of length `n` in lexicographic order.
    pub fn words(self, n: usize) -> impl Iterator<Item = Word> {
        let total = self.word_count(n).expect("word space too large to enumerate");
        (0..total).map(move |i| Word::from_index(i, self, n))
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = WordError;
    fn try_from(q: usize) -> Result<Self, Self::Error> {
        Alphabet::new(q)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.q()
    }
}

/// A finite non-empty sequence of symbols.
///
/// A `Word` does not carry its alphabet; containers ([`CodeSet`],
/// [`crate::family::PartitionFamily`]) check symbols on insertion.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Result<Self, WordError> {
        if symbols.is_empty() {
            return Err(WordError::Empty);
        }
        Ok(Word(symbols))
    }

    /// Builds a word and checks every symbol against `alphabet`.
    pub fn over(alphabet: Alphabet, symbols: Vec<u8>) -> Result<Self, WordError> {
        if let Some(&symbol) = symbols.iter().find(|&&s| !alphabet.contains(s)) {
            return Err(WordError::SymbolOutOfRange { symbol, q: alphabet.q() });
        }
        Word::new(symbols)
    }

    /// No checks; the empty word is allowed as a concatenation unit.
    pub(crate) fn from_vec_unchecked(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    /// Parses contiguous base-36 digits, e.g. `"02122"`.
    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Self, WordError> {
        let symbols = text
            .chars()
            .map(|c| c.to_digit(36).map(|d| d as u8).ok_or(WordError::BadDigit(c)))
            .collect::<Result<Vec<_>, _>>()?;
        Word::over(alphabet, symbols)
    }

    /// The `index`-th word of length `n` in lexicographic order.
    pub fn from_index(mut index: u64, alphabet: Alphabet, n: usize) -> Self {
        let q = alphabet.q() as u64;
        let mut symbols = vec![0u8; n];
        for slot in symbols.iter_mut().rev() {
            *slot = (index % q) as u8;
            index /= q;
        }
        Word(symbols)
    }

    /// Lexicographic rank among words of the same length.
    pub fn index(&self, alphabet: Alphabet) -> u64 {
        let q = alphabet.q() as u64;
        self.0.iter().fold(0, |acc, &s| acc * q + s as u64)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn first(&self) -> u8 {
        self.0[0]
    }

    #[inline]
    pub fn last(&self) -> u8 {
        self.0[self.0.len() - 1]
    }

    #[inline]
    pub fn prefix(&self, t: usize) -> &[u8] {
        &self.0[..t]
    }

    #[inline]
    pub fn suffix(&self, t: usize) -> &[u8] {
        &self.0[self.0.len() - t..]
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = Vec::with_capacity(self.len() + other.len());
        symbols.extend_from_slice(&self.0);
        symbols.extend_from_slice(&other.0);
        Word(symbols)
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            let c = char::from_digit(s as u32, 36).expect("symbol below 36");
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A window `[t1, t2]` of forbidden overlap lengths at block length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OverlapWindow {
    t1: usize,
    t2: usize,
    n: usize,
}

impl OverlapWindow {
    pub fn new(t1: usize, t2: usize, n: usize) -> Result<Self, WordError> {
        if t1 < 1 || t1 > t2 || t2 + 1 > n {
            return Err(WordError::Window { t1, t2, n });
        }
        Ok(OverlapWindow { t1, t2, n })
    }

    /// The non-overlapping (cross-bifix-free) window `[1, n-1]`.
    pub fn non_overlapping(n: usize) -> Result<Self, WordError> {
        OverlapWindow::new(1, n.saturating_sub(1), n)
    }

    pub fn t1(&self) -> usize {
        self.t1
    }
    pub fn t2(&self) -> usize {
        self.t2
    }
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, t: usize) -> bool {
        (self.t1..=self.t2).contains(&t)
    }
}

impl fmt::Display for OverlapWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.t1, self.t2)
    }
}

/// All `t` in `[1, n-1]` such that the length-`t` prefix of `u` equals the
/// length-`t` suffix of `v`. Only this direction is tested.
pub fn overlap_lengths(u: &Word, v: &Word) -> Result<Vec<usize>, WordError> {
    if u.len() != v.len() {
        return Err(WordError::LengthMismatch { expected: u.len(), found: v.len() });
    }
    Ok((1..u.len()).filter(|&t| u.prefix(t) == v.suffix(t)).collect())
}

/// Whether `prefix_t(u) == suffix_t(v)` for some `t` in `[t1, t2]`.
/// Assumes equal lengths.
#[inline]
pub fn has_overlap_in(u: &[u8], v: &[u8], t1: usize, t2: usize) -> bool {
    let n = v.len();
    (t1..=t2).any(|t| u[..t] == v[n - t..])
}

/// Whether `u` and `v` clash in either direction for some `t` in the window.
#[inline]
pub fn conflicts(u: &[u8], v: &[u8], t1: usize, t2: usize) -> bool {
    has_overlap_in(u, v, t1, t2) || has_overlap_in(v, u, t1, t2)
}

/// A `t`-overlap between an ordered pair of codewords: `prefix_t(u) == suffix_t(v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapWitness {
    pub u: Word,
    pub v: Word,
    pub t: usize,
}

impl fmt::Display for OverlapWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prefix of {} of length {} is a suffix of {}", self.u, self.t, self.v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Witness(OverlapWitness),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("code violates its window {window}: {witness}")]
    Overlap { window: OverlapWindow, witness: OverlapWitness },
}

/// A block code: a set of equal-length words over one alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSet {
    alphabet: Alphabet,
    n: usize,
    words: BTreeSet<Word>,
    window: Option<OverlapWindow>,
}

impl CodeSet {
    pub fn new(alphabet: Alphabet, n: usize) -> Self {
        assert!(n >= 1, "block length must be positive");
        CodeSet { alphabet, n, words: BTreeSet::new(), window: None }
    }

    pub fn from_words<I>(alphabet: Alphabet, n: usize, words: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = Word>,
    {
        let mut code = CodeSet::new(alphabet, n);
        for w in words {
            code.insert(w)?;
        }
        Ok(code)
    }

    /// Parses whitespace-separated base-36 words.
    pub fn parse_words(alphabet: Alphabet, n: usize, text: &str) -> Result<Self, WordError> {
        let words = text.split_whitespace().map(|t| Word::parse(t, alphabet)).collect::<Result<Vec<_>, _>>()?;
        CodeSet::from_words(alphabet, n, words)
    }

    pub(crate) fn from_set_unchecked(alphabet: Alphabet, n: usize, words: BTreeSet<Word>) -> Self {
        debug_assert!(words.iter().all(|w| w.len() == n));
        CodeSet { alphabet, n, words, window: None }
    }

    /// Inserts a word; returns `false` if it was already present.
    pub fn insert(&mut self, word: Word) -> Result<bool, WordError> {
        if word.len() != self.n {
            return Err(WordError::LengthMismatch { expected: self.n, found: word.len() });
        }
        if let Some(&symbol) = word.symbols().iter().find(|&&s| !self.alphabet.contains(s)) {
            return Err(WordError::SymbolOutOfRange { symbol, q: self.alphabet.q() });
        }
        Ok(self.words.insert(word))
    }

    pub fn remove(&mut self, word: &Word) -> bool {
        self.words.remove(word)
    }

    pub fn contains(&self, word: &Word) -> bool {
        self.words.contains(word)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }
    pub fn q(&self) -> usize {
        self.alphabet.q()
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn len(&self) -> usize {
        self.words.len()
    }
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
    pub fn words(&self) -> &BTreeSet<Word> {
        &self.words
    }
    pub fn iter(&self) -> impl Iterator<Item = &Word> {
        self.words.iter()
    }
    pub fn window(&self) -> Option<OverlapWindow> {
        self.window
    }

    /// Records the window the code claims to satisfy, without checking it.
    pub fn set_window(&mut self, window: Option<OverlapWindow>) {
        self.window = window;
    }

    pub fn with_window(mut self, window: OverlapWindow) -> Self {
        self.window = Some(window);
        self
    }

    /// Checks the declared window, if any.
    pub fn check_declared_window(&self) -> Result<(), CodeError> {
        match self.window {
            None => Ok(()),
            Some(window) => match verify_overlap_free(self, window.t1(), window.t2())? {
                Verdict::Ok => Ok(()),
                Verdict::Witness(witness) => Err(CodeError::Overlap { window, witness }),
            },
        }
    }

    /// Whether some codeword starts with `x`.
    pub fn has_prefix(&self, x: &[u8]) -> bool {
        self.words.iter().any(|w| w.len() >= x.len() && w.prefix(x.len()) == x)
    }

    /// Whether some codeword ends with `x`.
    pub fn has_suffix(&self, x: &[u8]) -> bool {
        self.words.iter().any(|w| w.len() >= x.len() && w.suffix(x.len()) == x)
    }
}

/// Serialized as the list of its words.
impl Serialize for CodeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'a> IntoIterator for &'a CodeSet {
    type Item = &'a Word;
    type IntoIter = std::collections::btree_set::Iter<'a, Word>;
    fn into_iter(self) -> Self::IntoIter {
        self.words.iter()
    }
}

/// Checks that no ordered pair `(u, v)` of codewords (including `u == v`)
/// has a `t`-overlap for `t` in `[t1, t2]`.
///
/// The witness returned is the smallest `(u, v, t)` in lexicographic order.
pub fn verify_overlap_free(code: &CodeSet, t1: usize, t2: usize) -> Result<Verdict, WordError> {
    let n = code.n();
    OverlapWindow::new(t1, t2, n)?;
    if code.is_empty() {
        return Ok(Verdict::Ok);
    }
    // per t: suffix -> smallest codeword carrying it
    let mut by_suffix: Vec<HashMap<&[u8], &Word>> = Vec::with_capacity(t2 - t1 + 1);
    for t in t1..=t2 {
        let mut map = HashMap::with_capacity(code.len());
        for v in code.iter() {
            map.entry(v.suffix(t)).or_insert(v);
        }
        by_suffix.push(map);
    }
    for u in code.iter() {
        let mut best: Option<(&Word, usize)> = None;
        for (offset, map) in by_suffix.iter().enumerate() {
            let t = t1 + offset;
            if let Some(&v) = map.get(u.prefix(t)) {
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, t));
                }
            }
        }
        if let Some((v, t)) = best {
            return Ok(Verdict::Witness(OverlapWitness { u: u.clone(), v: v.clone(), t }));
        }
    }
    Ok(Verdict::Ok)
}

/// Least period of `w`: the smallest `d` with `d | |w|` and `w = (w_1..w_d)^{|w|/d}`.
///
/// Only divisors of the length count as periods here; a primitive word
/// therefore has least period `|w|`.
pub fn least_period(w: &Word) -> usize {
    let s = w.symbols();
    let n = s.len();
    (1..=n).filter(|d| n.is_multiple_of(*d)).find(|&d| (d..n).all(|i| s[i] == s[i - d])).unwrap_or(n)
}

pub fn is_primitive(w: &Word) -> bool {
    least_period(w) == w.len()
}
