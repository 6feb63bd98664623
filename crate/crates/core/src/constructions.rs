//! Constructions 1 to 6, padding, and the lift/project map between lengths
//! `2 t2` and `n`.
//!
//! Every construction is expressed as a union of *terms*, each a product of
//! factors that are either a family level (`L_i` or `R_i`) or a free block
//! `Sigma^m`. Sizes are computed from the same terms that materialization
//! expands, so the size formulas and the codes cannot drift apart.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::big_pow;
use crate::compositions::{compositions, compositions_bounded, Composition};
use crate::exec::Execution;
use crate::family::{PartitionFamily, Side};
use crate::word::{verify_overlap_free, CodeSet, OverlapWindow, OverlapWitness, Verdict, Word, WordError};

pub const DEFAULT_CAP: u64 = 10_000_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("family depth {found} is below the required {needed}")]
    Depth { needed: usize, found: usize },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("code has {size} words, above the materialization cap {cap}")]
    TooLarge { size: BigUint, cap: u64 },
    #[error("word {0} generated twice")]
    Duplicate(Word),
    #[error("input code is not {window}-overlap-free: {witness}")]
    Precondition { window: OverlapWindow, witness: OverlapWitness },
    #[error(transparent)]
    Word(#[from] WordError),
}

fn params(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::Params(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstructionKind {
    NonOverlapping,
    OneK,
    #[serde(rename = "WMU")]
    Wmu,
    PadT1T2,
    ExpandedT1T2,
    Simultaneous,
}

/// A fully parameterized construction. `n` is always the output block
/// length except for [`Construction::Wmu`], whose output has length `n + k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Construction {
    /// Construction 1: `union L_i R_(n-i)`.
    NonOverlapping { n: usize },
    /// Construction 2: a `(1,k)`-overlap-free code. Only levels `1..=k` are
    /// used, so composition parts are bounded by `k`.
    OneK { n: usize, k: usize },
    /// Construction 3: `union L_i R_j Sigma^(n+k-i-j)` over `n <= i+j <= n+k`.
    Wmu { n: usize, k: usize },
    /// Construction 4 applied to the Construction 1 or 2 code of length
    /// `n - t1 + 1` built from the same family.
    PadT1T2 { n: usize, t1: usize, t2: usize },
    /// Construction 5; composition parts are bounded by `t2`.
    ExpandedT1T2 { n: usize, t1: usize, t2: usize },
    /// Construction 6: simultaneously `(1,k)`- and `(n-k,n-1)`-overlap-free.
    Simultaneous { n: usize, k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Factor {
    Level(Side, usize),
    Free(usize),
}

type Term = Vec<Factor>;

#[derive(Clone, Copy, Debug)]
pub struct MaterializeOptions {
    /// Refuse to materialize codes with more words than this.
    pub cap: u64,
    /// Treat a duplicate word across terms as an error instead of merging,
    /// for constructions whose terms are claimed disjoint.
    pub strict: bool,
    pub exec: Execution,
}

impl Default for MaterializeOptions {
    fn default() -> Self {
        MaterializeOptions { cap: DEFAULT_CAP, strict: false, exec: Execution::default() }
    }
}

impl MaterializeOptions {
    pub fn strict() -> Self {
        MaterializeOptions { strict: true, ..Default::default() }
    }
}

fn check_depth(f: &PartitionFamily, needed: usize) -> Result<(), ConstructionError> {
    if f.depth() < needed {
        Err(ConstructionError::Depth { needed, found: f.depth() })
    } else {
        Ok(())
    }
}

/// `L_(a_1) ... L_(a_i) [middle] R_(a_(i+1)) ... R_(a_par)` for every split
/// point `i` of `alpha`.
fn spread(alpha: &Composition, middle: &[Factor], tail: &[Factor], out: &mut Vec<Term>) {
    let parts = alpha.parts();
    for i in 0..=parts.len() {
        let mut term: Term = parts[..i].iter().map(|&a| Factor::Level(Side::Left, a)).collect();
        term.extend_from_slice(middle);
        term.extend(parts[i..].iter().map(|&a| Factor::Level(Side::Right, a)));
        term.extend_from_slice(tail);
        out.push(term);
    }
}

impl Construction {
    pub fn kind(&self) -> ConstructionKind {
        match self {
            Construction::NonOverlapping { .. } => ConstructionKind::NonOverlapping,
            Construction::OneK { .. } => ConstructionKind::OneK,
            Construction::Wmu { .. } => ConstructionKind::Wmu,
            Construction::PadT1T2 { .. } => ConstructionKind::PadT1T2,
            Construction::ExpandedT1T2 { .. } => ConstructionKind::ExpandedT1T2,
            Construction::Simultaneous { .. } => ConstructionKind::Simultaneous,
        }
    }

    /// Block length of the output code.
    pub fn block_length(&self) -> usize {
        match *self {
            Construction::Wmu { n, k } => n + k,
            Construction::NonOverlapping { n }
            | Construction::OneK { n, .. }
            | Construction::PadT1T2 { n, .. }
            | Construction::ExpandedT1T2 { n, .. }
            | Construction::Simultaneous { n, .. } => n,
        }
    }

    /// Windows the output is claimed to avoid.
    pub fn windows(&self) -> Result<Vec<OverlapWindow>, ConstructionError> {
        let w = match *self {
            Construction::NonOverlapping { n } => vec![OverlapWindow::non_overlapping(n)?],
            Construction::OneK { n, k } => vec![OverlapWindow::new(1, k, n)?],
            Construction::Wmu { n, k } => vec![OverlapWindow::new(k + 1, n + k - 1, n + k)?],
            Construction::PadT1T2 { n, t1, t2 } | Construction::ExpandedT1T2 { n, t1, t2 } => {
                vec![OverlapWindow::new(t1, t2, n)?]
            }
            Construction::Simultaneous { n, k } => {
                vec![OverlapWindow::new(1, k, n)?, OverlapWindow::new(n - k, n - 1, n)?]
            }
        };
        Ok(w)
    }

    /// The primary window, recorded on materialized codes.
    pub fn window(&self) -> Result<OverlapWindow, ConstructionError> {
        Ok(self.windows()?[0])
    }

    fn terms(&self, f: &PartitionFamily) -> Result<Vec<Term>, ConstructionError> {
        use Factor::*;
        use Side::{Left as L, Right as R};
        let mut out = Vec::new();
        match *self {
            Construction::NonOverlapping { n } => {
                if n < 2 {
                    return Err(params("block length must be at least 2"));
                }
                check_depth(f, n - 1)?;
                for i in 1..n {
                    out.push(vec![Level(L, i), Level(R, n - i)]);
                }
            }
            Construction::OneK { n, k } => {
                if k < 1 || n < k + 1 {
                    return Err(params(format!("need 1 <= k <= n-1, got n={n} k={k}")));
                }
                check_depth(f, k)?;
                for s in k + 1..=n.min(2 * k) {
                    for alpha in compositions_bounded(n - s, k) {
                        for j in s - k..=k {
                            spread(&alpha, &[Level(L, j), Level(R, s - j)], &[], &mut out);
                        }
                    }
                }
            }
            Construction::Wmu { n, k } => {
                if n < 2 || k > n - 2 {
                    return Err(params(format!("need n >= 2 and 0 <= k <= n-2, got n={n} k={k}")));
                }
                check_depth(f, n - 1)?;
                for i in 1..n {
                    for j in 1..n {
                        if (n..=n + k).contains(&(i + j)) {
                            out.push(vec![Level(L, i), Level(R, j), Free(n + k - i - j)]);
                        }
                    }
                }
            }
            Construction::PadT1T2 { n, t1, t2 } => {
                OverlapWindow::new(t1, t2, n)?;
                let inner = n - t1 + 1;
                let base = if t2 < inner {
                    Construction::OneK { n: inner, k: t2 }
                } else {
                    Construction::NonOverlapping { n: inner }
                };
                for mut term in base.terms(f)? {
                    term.push(Free(t1 - 1));
                    out.push(term);
                }
            }
            Construction::ExpandedT1T2 { n, t1, t2 } => {
                OverlapWindow::new(t1, t2, n)?;
                if t1 + t2 > n {
                    return Err(params(format!("need t1 + t2 <= n, got t1={t1} t2={t2} n={n}")));
                }
                check_depth(f, t2)?;
                for k in 0..t1 {
                    for s in t1 + t2 - k..=n - k {
                        if s > 2 * t2 {
                            continue;
                        }
                        for alpha in compositions_bounded(n - k - s, t2) {
                            for j in s - t2..=t2 {
                                if j < 1 || j >= s {
                                    continue;
                                }
                                spread(&alpha, &[Level(L, j), Level(R, s - j)], &[Free(k)], &mut out);
                            }
                        }
                    }
                }
            }
            Construction::Simultaneous { n, k } => {
                if k < 1 || 2 * k >= n {
                    return Err(params(format!("need 1 <= k < n/2, got n={n} k={k}")));
                }
                check_depth(f, k)?;
                for alpha in compositions(k) {
                    for i in 1..=k {
                        let mut term = vec![Level(L, i), Level(R, k + 1 - i), Free(n - 2 * k - 1)];
                        term.extend(alpha.parts().iter().map(|&a| Level(R, a)));
                        out.push(term);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Whether the union's terms are pairwise disjoint. Construction 5
    /// repeats words across its `Sigma^k` tails once `t1 >= 2`, e.g.
    /// `001011` at `n=6, t1=2, t2=3` from the family
    /// `L1={0} R1={1}; L2={} R2={01}; L3={001} R3={}`.
    pub fn disjoint_terms(&self) -> bool {
        !matches!(self, Construction::ExpandedT1T2 { t1, .. } if *t1 >= 2)
    }

    /// Sum of the term sizes; the code size when the terms are disjoint.
    pub fn term_size_sum(&self, f: &PartitionFamily) -> Result<BigUint, ConstructionError> {
        let q = f.q();
        Ok(self.terms(f)?.iter().map(|t| term_size(f, q, t)).sum())
    }

    /// Exact size: the term-size sum when the terms are disjoint, otherwise
    /// the count of distinct words (materialized under the default cap).
    pub fn size(&self, f: &PartitionFamily) -> Result<BigUint, ConstructionError> {
        if self.disjoint_terms() {
            self.term_size_sum(f)
        } else {
            let opts = MaterializeOptions { exec: Execution::Sequential, ..Default::default() };
            Ok(BigUint::from(self.materialize(f, &opts)?.len()))
        }
    }

    /// Expands the union into an explicit code.
    pub fn materialize(&self, f: &PartitionFamily, opts: &MaterializeOptions) -> Result<CodeSet, ConstructionError> {
        let terms = self.terms(f)?;
        let q = f.q();
        let size: BigUint = terms.iter().map(|t| term_size(f, q, t)).sum();
        let strict = opts.strict && self.disjoint_terms();
        if size > BigUint::from(opts.cap) {
            return Err(ConstructionError::TooLarge { size, cap: opts.cap });
        }
        let expanded = opts.exec.map(&terms, |t| expand_term(f, t));
        let mut words = BTreeSet::new();
        let mut generated = 0usize;
        for batch in expanded {
            for w in batch {
                generated += 1;
                let w = Word::from_vec_unchecked(w);
                if words.contains(&w) {
                    if strict {
                        return Err(ConstructionError::Duplicate(w));
                    }
                    continue;
                }
                words.insert(w);
            }
        }
        if generated != words.len() && self.disjoint_terms() {
            log::warn!("{:?}: {} duplicate words merged; term union is not disjoint", self, generated - words.len());
        }
        let code = CodeSet::from_set_unchecked(f.alphabet(), self.block_length(), words);
        Ok(code.with_window(self.window()?))
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Construction::NonOverlapping { n } => write!(f, "NonOverlapping(n={n})"),
            Construction::OneK { n, k } => write!(f, "OneK(n={n}, k={k})"),
            Construction::Wmu { n, k } => write!(f, "WMU(n={n}, k={k})"),
            Construction::PadT1T2 { n, t1, t2 } => write!(f, "PadT1T2(n={n}, t1={t1}, t2={t2})"),
            Construction::ExpandedT1T2 { n, t1, t2 } => {
                write!(f, "ExpandedT1T2(n={n}, t1={t1}, t2={t2})")
            }
            Construction::Simultaneous { n, k } => write!(f, "Simultaneous(n={n}, k={k})"),
        }
    }
}

fn factor_words(f: &PartitionFamily, factor: Factor) -> Vec<Vec<u8>> {
    match factor {
        Factor::Level(side, i) => f.side(i, side).iter().map(|w| w.symbols().to_vec()).collect(),
        Factor::Free(m) => {
            let alphabet = f.alphabet();
            if m == 0 {
                vec![Vec::new()]
            } else {
                alphabet.words(m).map(Word::into_symbols).collect()
            }
        }
    }
}

fn term_size(f: &PartitionFamily, q: usize, term: &Term) -> BigUint {
    let mut size = BigUint::one();
    for &factor in term {
        match factor {
            Factor::Level(side, i) => size *= f.side(i, side).len(),
            Factor::Free(m) => size *= big_pow(q, m),
        }
        if size.is_zero() {
            break;
        }
    }
    size
}

fn expand_term(f: &PartitionFamily, term: &Term) -> Vec<Vec<u8>> {
    let mut acc: Vec<Vec<u8>> = vec![Vec::new()];
    for &factor in term {
        let words = factor_words(f, factor);
        if words.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(acc.len() * words.len());
        for prefix in &acc {
            for w in &words {
                let mut x = prefix.clone();
                x.extend_from_slice(w);
                next.push(x);
            }
        }
        acc = next;
    }
    acc
}

fn build(f: &PartitionFamily, c: Construction) -> Result<CodeSet, ConstructionError> {
    c.materialize(f, &MaterializeOptions::default())
}

/// Construction 1.
pub fn non_overlapping(f: &PartitionFamily, n: usize) -> Result<CodeSet, ConstructionError> {
    build(f, Construction::NonOverlapping { n })
}

/// Construction 2.
pub fn overlap_free_1k(f: &PartitionFamily, n: usize, k: usize) -> Result<CodeSet, ConstructionError> {
    build(f, Construction::OneK { n, k })
}

/// Size of [`overlap_free_1k`] without materializing it.
pub fn code_size_1k(f: &PartitionFamily, n: usize, k: usize) -> Result<BigUint, ConstructionError> {
    Construction::OneK { n, k }.size(f)
}

/// Construction 3; the output has block length `n + k`.
pub fn wmu_expanded(f: &PartitionFamily, n: usize, k: usize) -> Result<CodeSet, ConstructionError> {
    build(f, Construction::Wmu { n, k })
}

/// Construction 5.
pub fn t1t2_expanded(f: &PartitionFamily, n: usize, t1: usize, t2: usize) -> Result<CodeSet, ConstructionError> {
    build(f, Construction::ExpandedT1T2 { n, t1, t2 })
}

/// Construction 6.
pub fn simultaneous(f: &PartitionFamily, n: usize, k: usize) -> Result<CodeSet, ConstructionError> {
    build(f, Construction::Simultaneous { n, k })
}

fn append_free(code: &CodeSet, m: usize) -> CodeSet {
    let alphabet = code.alphabet();
    let tails: Vec<Word> =
        if m == 0 { vec![Word::from_vec_unchecked(Vec::new())] } else { alphabet.words(m).collect() };
    let words = code.iter().flat_map(|x| tails.iter().map(move |s| x.concat(s))).collect();
    CodeSet::from_set_unchecked(alphabet, code.n() + m, words)
}

/// Construction 4: `X Sigma^(t1-1)`. `X` must be `(1,t2)`-overlap-free, or
/// non-overlapping when `t2` reaches its length.
pub fn pad_t1t2(x: &CodeSet, t1: usize, t2: usize) -> Result<CodeSet, ConstructionError> {
    if t1 < 1 {
        return Err(params("t1 must be at least 1"));
    }
    let inner = x.n();
    let n = inner + t1 - 1;
    let window = OverlapWindow::new(t1, t2, n)?;
    let needed = OverlapWindow::new(1, t2.min(inner - 1), inner)?;
    if let Verdict::Witness(witness) = verify_overlap_free(x, needed.t1(), needed.t2())? {
        return Err(ConstructionError::Precondition { window: needed, witness });
    }
    Ok(append_free(x, t1 - 1).with_window(window))
}

/// Inserts every `Sigma^(n - 2 t2)` block after position `t2` of each word of
/// a length-`2 t2` code.
pub fn lift_code(c: &CodeSet, n: usize) -> Result<CodeSet, ConstructionError> {
    let len = c.n();
    if !len.is_multiple_of(2) || len == 0 {
        return Err(params(format!("lift needs an even block length, got {len}")));
    }
    let t2 = len / 2;
    if n <= len {
        return Err(params(format!("lift target {n} must exceed {len}")));
    }
    let alphabet = c.alphabet();
    let middles: Vec<Word> = alphabet.words(n - len).collect();
    let mut words = BTreeSet::new();
    for x in c {
        for m in &middles {
            let mut w = x.prefix(t2).to_vec();
            w.extend_from_slice(m.symbols());
            w.extend_from_slice(x.suffix(t2));
            words.insert(Word::from_vec_unchecked(w));
        }
    }
    let mut out = CodeSet::from_set_unchecked(alphabet, n, words);
    if let Some(w) = c.window() {
        out.set_window(Some(OverlapWindow::new(w.t1(), w.t2(), n)?));
    }
    Ok(out)
}

/// Keeps the first and last `t2` symbols of each word.
pub fn project_code(c: &CodeSet, t2: usize) -> Result<CodeSet, ConstructionError> {
    let n = c.n();
    if t2 == 0 || n <= 2 * t2 {
        return Err(params(format!("projection needs n > 2 t2, got n={n} t2={t2}")));
    }
    let words = c
        .iter()
        .map(|x| {
            let mut w = x.prefix(t2).to_vec();
            w.extend_from_slice(x.suffix(t2));
            Word::from_vec_unchecked(w)
        })
        .collect();
    let mut out = CodeSet::from_set_unchecked(c.alphabet(), 2 * t2, words);
    if let Some(w) = c.window() {
        if w.t2() <= t2 {
            out.set_window(Some(OverlapWindow::new(w.t1(), w.t2(), 2 * t2)?));
        }
    }
    Ok(out)
}

/// Serializable description of a construction run. The family is supplied
/// separately (usually from a family file).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub kind: ConstructionKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<usize>,
}

impl ConstructionSpec {
    pub fn construction(&self) -> Result<Construction, ConstructionError> {
        let need =
            |v: Option<usize>, name: &str| v.ok_or_else(|| params(format!("{:?} needs parameter {name}", self.kind)));
        let n = self.n;
        Ok(match self.kind {
            ConstructionKind::NonOverlapping => Construction::NonOverlapping { n },
            ConstructionKind::OneK => Construction::OneK { n, k: need(self.k, "k")? },
            ConstructionKind::Wmu => Construction::Wmu { n, k: need(self.k, "k")? },
            ConstructionKind::PadT1T2 => {
                Construction::PadT1T2 { n, t1: need(self.t1, "t1")?, t2: need(self.t2, "t2")? }
            }
            ConstructionKind::ExpandedT1T2 => {
                Construction::ExpandedT1T2 { n, t1: need(self.t1, "t1")?, t2: need(self.t2, "t2")? }
            }
            ConstructionKind::Simultaneous => Construction::Simultaneous { n, k: need(self.k, "k")? },
        })
    }
}

/// Outcome of building and checking one construction.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub construction: String,
    pub q: usize,
    pub block_length: usize,
    /// Sum of the union's term sizes; the code size when `disjoint_terms`.
    #[serde(serialize_with = "crate::bignum::serialize")]
    pub formula_size: BigUint,
    pub disjoint_terms: bool,
    pub materialized: Option<usize>,
    /// One entry per claimed window; `None` when not materialized.
    pub verified: Vec<WindowCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowCheck {
    pub window: OverlapWindow,
    pub ok: Option<bool>,
    pub witness: Option<OverlapWitness>,
}

impl ConstructionReport {
    pub fn all_ok(&self) -> bool {
        self.verified.iter().all(|c| c.ok != Some(false))
    }
}

/// Builds `c` from `f`, verifies every claimed window, and reports the size.
/// Above the cap the code is not materialized and only the formula size is
/// reported.
pub fn run(
    c: Construction,
    f: &PartitionFamily,
    opts: &MaterializeOptions,
) -> Result<(Option<CodeSet>, ConstructionReport), ConstructionError> {
    let formula_size = c.term_size_sum(f)?;
    let code = match c.materialize(f, opts) {
        Ok(code) => Some(code),
        Err(ConstructionError::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut verified = Vec::new();
    for window in c.windows()? {
        let check = match &code {
            Some(code) => {
                let verdict = verify_overlap_free(code, window.t1(), window.t2())?;
                let witness = match verdict {
                    Verdict::Ok => None,
                    Verdict::Witness(w) => Some(w),
                };
                WindowCheck { window, ok: Some(witness.is_none()), witness }
            }
            None => WindowCheck { window, ok: None, witness: None },
        };
        verified.push(check);
    }
    let report = ConstructionReport {
        construction: c.to_string(),
        q: f.q(),
        block_length: c.block_length(),
        materialized: code.as_ref().map(CodeSet::len),
        formula_size,
        disjoint_terms: c.disjoint_terms(),
        verified,
    };
    Ok((code, report))
}

/// Formula size as `u64`, when it fits.
pub fn size_u64(c: Construction, f: &PartitionFamily) -> Result<Option<u64>, ConstructionError> {
    Ok(c.size(f)?.to_u64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{balanced_family, EmptySide, FamilyEnumerator};
    use crate::word::Alphabet;

    fn a(q: usize) -> Alphabet {
        Alphabet::new(q).unwrap()
    }

    fn fam(q: usize, levels: &[(&str, &str)]) -> PartitionFamily {
        PartitionFamily::from_text_levels(a(q), levels).unwrap()
    }

    fn words(c: &CodeSet) -> Vec<String> {
        c.iter().map(|w| w.to_string()).collect()
    }

    fn example() -> PartitionFamily {
        fam(3, &[("0 1", "2"), ("02", "12")])
    }

    /// Independent oracle: all words of length `n` that split as one
    /// admissible product, found by trying every factorization.
    fn oracle_1k(f: &PartitionFamily, n: usize, k: usize) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for w in f.alphabet().words(n) {
            let s = w.symbols();
            let inside = |side: Side, lo: usize, hi: usize| {
                hi - lo <= k && f.side(hi - lo, side).contains(&Word::new(s[lo..hi].to_vec()).unwrap())
            };
            // choose the middle L_j R_(s-j) block at [a, a+len) with cut at a+j
            let mut hit = false;
            'outer: for start in 0..n {
                for len in k + 1..=(n - start).min(2 * k) {
                    for j in len - k..=k {
                        if j == 0 || j >= len {
                            continue;
                        }
                        if !inside(Side::Left, start, start + j) || !inside(Side::Right, start + j, start + len) {
                            continue;
                        }
                        // prefix must split into L-parts, suffix into R-parts
                        if splits(&inside, Side::Left, 0, start) && splits(&inside, Side::Right, start + len, n) {
                            hit = true;
                            break 'outer;
                        }
                    }
                }
            }
            if hit {
                out.insert(w.to_string());
            }
        }
        out
    }

    fn splits(inside: &dyn Fn(Side, usize, usize) -> bool, side: Side, lo: usize, hi: usize) -> bool {
        if lo == hi {
            return true;
        }
        (lo + 1..=hi).any(|m| inside(side, lo, m) && splits(inside, side, m, hi))
    }

    #[test]
    fn non_overlapping_examples() {
        let f = balanced_family(a(2), 1, 2, EmptySide::Left).unwrap();
        assert_eq!(words(&non_overlapping(&f, 3).unwrap()), ["001"]);

        let f = fam(4, &[("0 1", "2 3")]);
        assert_eq!(words(&non_overlapping(&f, 2).unwrap()), ["02", "03", "12", "13"]);

        let f = fam(2, &[("0", "1")]);
        assert_eq!(words(&non_overlapping(&f, 2).unwrap()), ["01"]);
        assert!(matches!(non_overlapping(&f, 3), Err(ConstructionError::Depth { needed: 2, found: 1 })));
    }

    #[test]
    fn one_k_examples() {
        let f = fam(2, &[("0", "1"), ("", "01")]);
        let c = overlap_free_1k(&f, 4, 2).unwrap();
        assert_eq!(words(&c), ["0001", "0011"]);
        assert_eq!(code_size_1k(&f, 4, 2).unwrap(), BigUint::from(2u32));

        let c = overlap_free_1k(&example(), 4, 2).unwrap();
        assert!(c.contains(&Word::parse("0212", a(3)).unwrap()));
        assert!(verify_overlap_free(&c, 1, 2).unwrap().is_ok());
        let want = oracle_1k(&example(), 4, 2);
        assert_eq!(words(&c).into_iter().collect::<BTreeSet<_>>(), want);
        assert_eq!(c.len(), 10);
    }

    #[test]
    fn one_k_at_k_plus_one_is_construction_1() {
        for f in FamilyEnumerator::new(a(2), 4) {
            for k in 1..=4 {
                let c2 = overlap_free_1k(&f, k + 1, k).unwrap();
                let c1 = non_overlapping(&f, k + 1).unwrap();
                assert_eq!(c1.words(), c2.words());
            }
        }
    }

    #[test]
    fn one_k_matches_factorization_oracle() {
        let strict = MaterializeOptions::strict();
        for (q, depth) in [(2, 5), (3, 3)] {
            for f in FamilyEnumerator::new(a(q), depth) {
                for n in 2..=6usize {
                    for k in 1..n {
                        if k > depth {
                            continue;
                        }
                        let c = Construction::OneK { n, k }
                            .materialize(&f, &strict)
                            .unwrap_or_else(|e| panic!("{f} n={n} k={k}: {e}"));
                        assert_eq!(BigUint::from(c.len()), code_size_1k(&f, n, k).unwrap());
                        assert!(verify_overlap_free(&c, 1, k).unwrap().is_ok());
                        if q == 2 || n <= 5 {
                            assert_eq!(
                                words(&c).into_iter().collect::<BTreeSet<_>>(),
                                oracle_1k(&f, n, k),
                                "{f} n={n} k={k}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn wmu_examples() {
        let f = fam(2, &[("0", "1"), ("", "01")]);
        let c = wmu_expanded(&f, 3, 1).unwrap();
        assert_eq!(words(&c), ["0010", "0011"]);
        assert!(verify_overlap_free(&c, 2, 3).unwrap().is_ok());

        let c0 = wmu_expanded(&f, 3, 0).unwrap();
        assert_eq!(c0.words(), non_overlapping(&f, 3).unwrap().words());

        let f = fam(2, &[("0", "1"), ("01", "")]);
        assert_eq!(words(&wmu_expanded(&f, 3, 1).unwrap()), ["0110", "0111"]);
        assert!(wmu_expanded(&f, 3, 2).is_err());
    }

    #[test]
    fn pad_examples() {
        let x = CodeSet::parse_words(a(2), 3, "001").unwrap();
        let c = pad_t1t2(&x, 2, 3).unwrap();
        assert_eq!(words(&c), ["0010", "0011"]);
        assert!(verify_overlap_free(&c, 2, 3).unwrap().is_ok());

        assert_eq!(pad_t1t2(&x, 1, 2).unwrap().words(), x.words());

        let x = CodeSet::parse_words(a(2), 4, "0001 0011").unwrap();
        let c = pad_t1t2(&x, 2, 2).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.n(), 5);
        assert!(verify_overlap_free(&c, 2, 2).unwrap().is_ok());

        let bad = CodeSet::parse_words(a(2), 3, "010").unwrap();
        assert!(matches!(pad_t1t2(&bad, 2, 3), Err(ConstructionError::Precondition { .. })));
    }

    #[test]
    fn expanded_examples() {
        let c = t1t2_expanded(&example(), 4, 2, 2).unwrap();
        assert_eq!(c.len(), 10);
        assert!(c.contains(&Word::parse("0212", a(3)).unwrap()));
        for p in ["012", "112", "022"] {
            for s in 0..3u8 {
                let mut w = Word::parse(p, a(3)).unwrap().into_symbols();
                w.push(s);
                assert!(c.contains(&Word::new(w).unwrap()));
            }
        }
        assert!(verify_overlap_free(&c, 2, 2).unwrap().is_ok());

        let f = fam(2, &[("0", "1"), ("", "01")]);
        assert_eq!(words(&t1t2_expanded(&f, 4, 2, 2).unwrap()), ["0010", "0011"]);

        for g in FamilyEnumerator::new(a(2), 4) {
            for n in 3..=6 {
                for t2 in 1..n {
                    if t2 > 4 {
                        continue;
                    }
                    assert_eq!(
                        t1t2_expanded(&g, n, 1, t2).unwrap().words(),
                        overlap_free_1k(&g, n, t2).unwrap().words()
                    );
                }
            }
        }
    }

    #[test]
    fn expanded_terms_can_repeat() {
        let f = fam(2, &[("0", "1"), ("", "01"), ("001", "")]);
        let c = Construction::ExpandedT1T2 { n: 6, t1: 2, t2: 3 };
        assert!(!c.disjoint_terms());
        let code = c.materialize(&f, &MaterializeOptions::strict()).unwrap();
        assert!(code.contains(&Word::parse("001011", a(2)).unwrap()));
        assert!(c.term_size_sum(&f).unwrap() > BigUint::from(code.len()));
        assert_eq!(c.size(&f).unwrap(), BigUint::from(code.len()));
        assert!(verify_overlap_free(&code, 2, 3).unwrap().is_ok());
    }

    #[test]
    fn simultaneous_examples() {
        let f = fam(2, &[("0", "1")]);
        let c = simultaneous(&f, 4, 1).unwrap();
        assert_eq!(words(&c), ["0101", "0111"]);
        assert!(verify_overlap_free(&c, 1, 1).unwrap().is_ok());
        assert!(verify_overlap_free(&c, 3, 3).unwrap().is_ok());

        let f = balanced_family(a(2), 1, 2, EmptySide::Left).unwrap();
        let c = simultaneous(&f, 5, 2).unwrap();
        assert_eq!(words(&c), ["00101", "00111"]);
        assert!(verify_overlap_free(&c, 1, 2).unwrap().is_ok());
        assert!(verify_overlap_free(&c, 3, 4).unwrap().is_ok());

        assert!(simultaneous(&f, 4, 2).is_err());
    }

    #[test]
    fn lift_and_project() {
        let c = CodeSet::parse_words(a(2), 4, "0011").unwrap().with_window(OverlapWindow::new(1, 2, 4).unwrap());
        let lifted = lift_code(&c, 5).unwrap();
        assert_eq!(words(&lifted), ["00011", "00111"]);
        assert!(verify_overlap_free(&lifted, 1, 2).unwrap().is_ok());
        assert_eq!(lifted.window(), Some(OverlapWindow::new(1, 2, 5).unwrap()));

        let six = lift_code(&c, 6).unwrap();
        assert_eq!(six.len(), 4);
        assert_eq!(project_code(&six, 2).unwrap().words(), c.words());
        assert!(project_code(&c, 2).is_err());
    }

    #[test]
    fn strict_mode_accepts_every_construction() {
        let strict = MaterializeOptions::strict();
        for f in FamilyEnumerator::new(a(2), 4) {
            for n in 2..=5 {
                Construction::NonOverlapping { n }.materialize(&f, &strict).unwrap();
                for k in 0..=n.saturating_sub(2) {
                    Construction::Wmu { n, k }.materialize(&f, &strict).unwrap();
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let f = balanced_family(a(3), 2, 6, EmptySide::Left).unwrap();
        let opts = MaterializeOptions { cap: 10, ..Default::default() };
        let err = Construction::OneK { n: 7, k: 6 }.materialize(&f, &opts).unwrap_err();
        assert!(matches!(err, ConstructionError::TooLarge { .. }));
        let (code, report) = run(Construction::OneK { n: 7, k: 6 }, &f, &opts).unwrap();
        assert!(code.is_none());
        assert_eq!(report.materialized, None);
        assert!(report.formula_size > BigUint::from(10u32));
    }

    #[test]
    fn spec_roundtrip() {
        let spec: ConstructionSpec = serde_json::from_str(r#"{"kind":"ExpandedT1T2","n":4,"t1":2,"t2":2}"#).unwrap();
        assert_eq!(spec.construction().unwrap(), Construction::ExpandedT1T2 { n: 4, t1: 2, t2: 2 });
        let spec: ConstructionSpec = serde_json::from_str(r#"{"kind":"WMU","n":3,"k":1}"#).unwrap();
        assert_eq!(spec.construction().unwrap(), Construction::Wmu { n: 3, k: 1 });
        let spec = ConstructionSpec { kind: ConstructionKind::OneK, n: 4, k: None, t1: None, t2: None };
        assert!(spec.construction().is_err());
    }
}
