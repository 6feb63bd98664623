//! Layered partition families `(L_i, R_i)`, their enumeration, and the
//! l/r decomposition of words over a family.
//!
//! Level 1 splits the alphabet into two non-empty parts. Every level `i >= 2`
//! splits `union over j in [1, i-1] of L_j R_(i-j)` into two (possibly empty)
//! disjoint parts. All constructions in [`crate::constructions`] are driven
//! by such a family.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::word::{verify_overlap_free, Alphabet, CodeSet, OverlapWitness, Verdict, Word, WordError};

/// Default cap on family depth.
pub const DEFAULT_MAX_DEPTH: usize = 12;

/// Ground sets wider than this many words are not enumerated.
const MAX_GROUND_BITS: usize = 40;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Level {
    pub left: BTreeSet<Word>,
    pub right: BTreeSet<Word>,
}

impl Level {
    pub fn new(left: BTreeSet<Word>, right: BTreeSet<Word>) -> Self {
        Level { left, right }
    }

    pub fn union_len(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::Left => 'l',
            Side::Right => 'r',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Clause {
    LeftEmpty,
    RightEmpty,
    BadWord(Word),
    NotDisjoint(Word),
    /// A word of the required union that neither side contains.
    Missing(Word),
    /// A word on one side that is not in the required union.
    Extraneous(Word),
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::LeftEmpty => write!(f, "L is empty"),
            Clause::RightEmpty => write!(f, "R is empty"),
            Clause::BadWord(w) => write!(f, "word {w} has the wrong length or alphabet"),
            Clause::NotDisjoint(w) => write!(f, "{w} lies in both L and R"),
            Clause::Missing(w) => write!(f, "union differs from the required set: {w} is unhoused"),
            Clause::Extraneous(w) => {
                write!(f, "union differs from the required set: {w} does not belong")
            }
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("level {level}: {clause}")]
pub struct FamilyViolation {
    pub level: usize,
    pub clause: Clause,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error(transparent)]
    Violation(#[from] FamilyViolation),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("family depth must be at least 1")]
    ZeroDepth,
    #[error("depth {depth} exceeds the configured maximum {max}")]
    TooDeep { depth: usize, max: usize },
    #[error("x = {x} outside [1, q-1] for q = {q}")]
    SplitOutOfRange { x: usize, q: usize },
    #[error("code is not (1,{k})-overlap-free: {witness}")]
    NotOverlapFree { k: usize, witness: OverlapWitness },
    #[error("cannot derive a family from an empty code")]
    EmptyCode,
    #[error("depth {k} must lie in [1, n-1] for block length {n}")]
    DepthForLength { k: usize, n: usize },
    #[error("{word} does not start in L_1 and end in R_1")]
    NotDecomposable { word: Word },
}

/// Concatenation `AB` of two word sets.
pub fn concat_sets(a: &BTreeSet<Word>, b: &BTreeSet<Word>) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            out.insert(x.concat(y));
        }
    }
    out
}

/// The set `union over j in [1, i-1] of L_j R_(i-j)` for level `i >= 2`.
fn required_union(levels: &[Level], i: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for j in 1..i {
        out.extend(concat_sets(&levels[j - 1].left, &levels[i - j - 1].right));
    }
    out
}

fn alphabet_set(alphabet: Alphabet) -> BTreeSet<Word> {
    alphabet.symbols().map(|s| Word::from_vec_unchecked(vec![s])).collect()
}

/// Checks the partition constraints level by level and reports the first
/// failing level and clause.
pub fn validate(alphabet: Alphabet, levels: &[Level]) -> Result<(), FamilyViolation> {
    for (idx, level) in levels.iter().enumerate() {
        let i = idx + 1;
        let fail = |clause| Err(FamilyViolation { level: i, clause });
        for w in level.left.iter().chain(&level.right) {
            if w.len() != i || w.symbols().iter().any(|&s| !alphabet.contains(s)) {
                return fail(Clause::BadWord(w.clone()));
            }
        }
        if i == 1 {
            if level.left.is_empty() {
                return fail(Clause::LeftEmpty);
            }
            if level.right.is_empty() {
                return fail(Clause::RightEmpty);
            }
        }
        if let Some(w) = level.left.intersection(&level.right).next() {
            return fail(Clause::NotDisjoint(w.clone()));
        }
        let required = if i == 1 { alphabet_set(alphabet) } else { required_union(&levels[..idx], i) };
        if let Some(w) = required.iter().find(|w| !level.left.contains(*w) && !level.right.contains(*w)) {
            return fail(Clause::Missing(w.clone()));
        }
        if let Some(w) = level.left.iter().chain(&level.right).find(|w| !required.contains(*w)) {
            return fail(Clause::Extraneous(w.clone()));
        }
    }
    Ok(())
}

/// A validated partition family of depth `k >= 1` (levels `1..=k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionFamily {
    alphabet: Alphabet,
    levels: Vec<Level>,
}

impl PartitionFamily {
    pub fn try_new(alphabet: Alphabet, levels: Vec<Level>) -> Result<Self, FamilyError> {
        if levels.is_empty() {
            return Err(FamilyError::ZeroDepth);
        }
        validate(alphabet, &levels)?;
        Ok(PartitionFamily { alphabet, levels })
    }

    /// Builds a family from base-36 word lists, level by level.
    pub fn from_text_levels(alphabet: Alphabet, levels: &[(&str, &str)]) -> Result<Self, FamilyError> {
        let parse = |s: &str| -> Result<BTreeSet<Word>, WordError> {
            s.split_whitespace().map(|t| Word::parse(t, alphabet)).collect()
        };
        let levels =
            levels.iter().map(|(l, r)| Ok(Level::new(parse(l)?, parse(r)?))).collect::<Result<Vec<_>, WordError>>()?;
        PartitionFamily::try_new(alphabet, levels)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn q(&self) -> usize {
        self.alphabet.q()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Level `i` (1-based).
    pub fn level(&self, i: usize) -> &Level {
        &self.levels[i - 1]
    }

    pub fn left(&self, i: usize) -> &BTreeSet<Word> {
        &self.levels[i - 1].left
    }

    pub fn right(&self, i: usize) -> &BTreeSet<Word> {
        &self.levels[i - 1].right
    }

    pub fn side(&self, i: usize, side: Side) -> &BTreeSet<Word> {
        match side {
            Side::Left => self.left(i),
            Side::Right => self.right(i),
        }
    }

    /// Which side of level `|w|` contains `w`, if any.
    pub fn classify(&self, w: &Word) -> Option<Side> {
        let level = self.levels.get(w.len().checked_sub(1)?)?;
        if level.left.contains(w) {
            Some(Side::Left)
        } else if level.right.contains(w) {
            Some(Side::Right)
        } else {
            None
        }
    }

    /// The first `k` levels, which again form a valid family.
    pub fn truncated(&self, k: usize) -> PartitionFamily {
        assert!((1..=self.depth()).contains(&k));
        PartitionFamily { alphabet: self.alphabet, levels: self.levels[..k].to_vec() }
    }

    /// `union over j of L_j R_(i-j)`: the set level `i` has to split. Defined
    /// for `2 <= i <= depth + 1`.
    pub fn ground(&self, i: usize) -> BTreeSet<Word> {
        if i == 1 {
            return alphabet_set(self.alphabet);
        }
        assert!(i <= self.depth() + 1, "ground set of level {i} needs depth {}", i - 1);
        required_union(&self.levels, i)
    }
}

impl fmt::Display for PartitionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<Word>| s.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ");
        for (idx, level) in self.levels.iter().enumerate() {
            if idx > 0 {
                write!(f, "; ")?;
            }
            write!(f, "L{0}={{{1}}} R{0}={{{2}}}", idx + 1, join(&level.left), join(&level.right))?;
        }
        Ok(())
    }
}

/// Which side keeps its higher levels empty in [`balanced_family`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EmptySide {
    /// `R_i = {}` for `i > 1`, so `L_i = L_1 R_1^(i-1)`; `|R_1| = x`.
    Right,
    /// `L_i = {}` for `i > 1`, so `R_i = L_1^(i-1) R_1`; `|L_1| = x`.
    Left,
}

/// The two-parameter family used by the balanced lower bounds. The `x`-sized
/// part of level 1 takes the symbols `0..x`.
pub fn balanced_family(
    alphabet: Alphabet,
    x: usize,
    k: usize,
    empty: EmptySide,
) -> Result<PartitionFamily, FamilyError> {
    let q = alphabet.q();
    if x < 1 || x >= q {
        return Err(FamilyError::SplitOutOfRange { x, q });
    }
    if k == 0 {
        return Err(FamilyError::ZeroDepth);
    }
    let small: BTreeSet<Word> = (0..x as u8).map(|s| Word::from_vec_unchecked(vec![s])).collect();
    let large: BTreeSet<Word> = (x as u8..q as u8).map(|s| Word::from_vec_unchecked(vec![s])).collect();
    let (l1, r1) = match empty {
        EmptySide::Right => (large, small),
        EmptySide::Left => (small, large),
    };
    let mut levels = vec![Level::new(l1.clone(), r1.clone())];
    for i in 2..=k {
        let prev = &levels[i - 2];
        let level = match empty {
            EmptySide::Right => Level::new(concat_sets(&prev.left, &r1), BTreeSet::new()),
            EmptySide::Left => Level::new(BTreeSet::new(), concat_sets(&l1, &prev.right)),
        };
        levels.push(level);
    }
    PartitionFamily::try_new(alphabet, levels)
}

/// Enumerates every valid family of depth `k` exactly once.
///
/// Levels are filled left to right; within a level, the left part is chosen
/// by a binary counter over the sorted ground set (bit `b` set puts the
/// `b`-th word in `L`). An optional budget caps the number of families;
/// when it cuts the stream short, [`FamilyEnumerator::is_truncated`] is set.
#[derive(Debug)]
pub struct FamilyEnumerator {
    alphabet: Alphabet,
    k: usize,
    budget: Option<u64>,
    yielded: u64,
    truncated: bool,
    started: bool,
    done: bool,
    levels: Vec<Level>,
    frames: Vec<Frame>,
}

#[derive(Debug)]
struct Frame {
    ground: Vec<Word>,
    mask: u64,
    end: u64,
}

impl Frame {
    fn level(&self) -> Level {
        let mut level = Level::default();
        for (b, w) in self.ground.iter().enumerate() {
            if self.mask >> b & 1 == 1 {
                level.left.insert(w.clone());
            } else {
                level.right.insert(w.clone());
            }
        }
        level
    }
}

impl FamilyEnumerator {
    pub fn new(alphabet: Alphabet, k: usize) -> Self {
        FamilyEnumerator {
            alphabet,
            k,
            budget: None,
            yielded: 0,
            truncated: false,
            started: false,
            done: k == 0,
            levels: Vec::new(),
            frames: Vec::new(),
        }
    }

    /// Enumerates the depth-`k` extensions of `base`.
    pub fn extending(base: &PartitionFamily, k: usize) -> Self {
        let mut e = FamilyEnumerator::new(base.alphabet, k);
        if k < base.depth() {
            e.done = true;
        }
        e.levels = base.levels.clone();
        e
    }

    pub fn with_budget(mut self, max_families: u64) -> Self {
        self.budget = Some(max_families);
        self
    }

    /// Set when the budget (or an oversized ground set) cut the stream short.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn yielded(&self) -> u64 {
        self.yielded
    }

    fn push_frame(&mut self) -> bool {
        let i = self.levels.len() + 1;
        let (ground, start, end) = if i == 1 {
            let g: Vec<Word> = alphabet_set(self.alphabet).into_iter().collect();
            let full = 1u64 << g.len();
            (g, 1, full - 1)
        } else {
            let g: Vec<Word> = required_union(&self.levels, i).into_iter().collect();
            if g.len() > MAX_GROUND_BITS {
                log::warn!("level {i} ground set has {} words; enumeration stopped", g.len());
                self.truncated = true;
                return false;
            }
            let end = 1u64 << g.len();
            (g, 0, end)
        };
        let frame = Frame { ground, mask: start, end };
        self.levels.push(frame.level());
        self.frames.push(frame);
        true
    }

    fn descend(&mut self) -> bool {
        while self.levels.len() < self.k {
            if !self.push_frame() {
                return false;
            }
        }
        true
    }

    fn advance(&mut self) -> bool {
        while let Some(frame) = self.frames.last_mut() {
            self.levels.pop();
            frame.mask += 1;
            if frame.mask < frame.end {
                let level = frame.level();
                self.levels.push(level);
                return self.descend();
            }
            self.frames.pop();
        }
        false
    }
}

impl Iterator for FamilyEnumerator {
    type Item = PartitionFamily;

    fn next(&mut self) -> Option<PartitionFamily> {
        if self.done {
            return None;
        }
        let ok = if self.started {
            self.advance()
        } else {
            self.started = true;
            self.descend()
        };
        if !ok {
            self.done = true;
            return None;
        }
        if self.budget.is_some_and(|b| self.yielded >= b) {
            self.truncated = true;
            self.done = true;
            return None;
        }
        self.yielded += 1;
        Some(PartitionFamily { alphabet: self.alphabet, levels: self.levels.clone() })
    }
}

/// All families of depth `k`, or `None` if more than `max` exist.
pub fn all_families(alphabet: Alphabet, k: usize, max: u64) -> Option<Vec<PartitionFamily>> {
    let mut e = FamilyEnumerator::new(alphabet, k).with_budget(max);
    let all: Vec<_> = e.by_ref().collect();
    (!e.is_truncated()).then_some(all)
}

/// Number of families of depth `k`, computed from level sizes alone.
pub fn count_families(q: usize, k: usize) -> num_bigint::BigUint {
    use num_bigint::BigUint;
    use num_traits::{One, Zero};

    fn binomial(n: usize, r: usize) -> BigUint {
        let mut acc = BigUint::one();
        for i in 0..r {
            acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
        }
        acc
    }
    fn rec(sizes: &mut Vec<(usize, usize)>, k: usize) -> BigUint {
        let i = sizes.len() + 1;
        if i > k {
            return BigUint::one();
        }
        let m: usize = (1..i).map(|j| sizes[j - 1].0 * sizes[i - j - 1].1).sum();
        let mut total = BigUint::zero();
        for a in 0..=m {
            sizes.push((a, m - a));
            total += binomial(m, a) * rec(sizes, k);
            sizes.pop();
        }
        total
    }
    if k == 0 {
        return BigUint::zero();
    }
    let mut total = BigUint::zero();
    for a in 1..q {
        let mut sizes = vec![(a, q - a)];
        total += binomial(q, a) * rec(&mut sizes, k);
    }
    total
}

/// A uniformly drawn split at every level (level 1 conditioned on both
/// parts being non-empty). Not uniform over families.
pub fn random_family<R: Rng + ?Sized>(alphabet: Alphabet, k: usize, rng: &mut R) -> PartitionFamily {
    assert!(k >= 1);
    let q = alphabet.q();
    let mut levels: Vec<Level> = Vec::with_capacity(k);
    let mask = rng.gen_range(1..(1u64 << q) - 1);
    let frame = Frame { ground: alphabet_set(alphabet).into_iter().collect(), mask, end: 0 };
    levels.push(frame.level());
    for i in 2..=k {
        let mut level = Level::default();
        for w in required_union(&levels, i) {
            if rng.gen_bool(0.5) {
                level.left.insert(w);
            } else {
                level.right.insert(w);
            }
        }
        levels.push(level);
    }
    PartitionFamily { alphabet, levels }
}

/// Derives the family whose level-`i` left part is the set of length-`i`
/// codeword prefixes inside the level's ground set.
pub fn family_from_code(code: &CodeSet, k: usize) -> Result<PartitionFamily, FamilyError> {
    let n = code.n();
    if k < 1 || k >= n {
        return Err(FamilyError::DepthForLength { k, n });
    }
    if code.is_empty() {
        return Err(FamilyError::EmptyCode);
    }
    if let Verdict::Witness(witness) = verify_overlap_free(code, 1, k)? {
        return Err(FamilyError::NotOverlapFree { k, witness });
    }
    let alphabet = code.alphabet();
    let mut levels: Vec<Level> = Vec::with_capacity(k);
    for i in 1..=k {
        let ground = if i == 1 { alphabet_set(alphabet) } else { required_union(&levels, i) };
        let prefixes: BTreeSet<&[u8]> = code.iter().map(|w| w.prefix(i)).collect();
        let (left, right): (BTreeSet<Word>, BTreeSet<Word>) =
            ground.into_iter().partition(|x| prefixes.contains(x.symbols()));
        levels.push(Level::new(left, right));
    }
    PartitionFamily::try_new(alphabet, levels)
}

/// One factor of a decomposition: a subword `w[start..start+len]` housed in
/// `L_len` or `R_len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub side: Side,
    pub start: usize,
    pub len: usize,
}

/// The sequence `p_0(w), p_1(w), ...` of l/r decompositions of a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionTrace {
    pub word: Word,
    pub steps: Vec<Vec<Block>>,
}

impl DecompositionTrace {
    pub fn labels(&self) -> Vec<String> {
        self.steps.iter().map(|s| s.iter().map(|b| b.side.letter()).collect()).collect()
    }

    pub fn last(&self) -> &[Block] {
        self.steps.last().expect("trace has at least p_0")
    }

    /// Number of `lr` occurrences left in the final decomposition.
    pub fn final_lr_count(&self) -> usize {
        self.last().windows(2).filter(|p| p[0].side == Side::Left && p[1].side == Side::Right).count()
    }
}

/// Runs the l/r reduction to its fixed point.
///
/// Each step rewrites every `lr` occurrence whose subword has length at most
/// the family depth into `l` or `r` according to the level that houses the
/// subword. Occurrences of `lr` never share a letter, so all rewrites of one
/// step are applied together, scanning left to right.
pub fn decompose(w: &Word, family: &PartitionFamily) -> Result<DecompositionTrace, FamilyError> {
    let k = family.depth();
    let side_of = |s: u8| {
        if family.left(1).iter().any(|x| x.first() == s) {
            Side::Left
        } else {
            Side::Right
        }
    };
    if w.len() < 2 || side_of(w.first()) != Side::Left || side_of(w.last()) != Side::Right {
        return Err(FamilyError::NotDecomposable { word: w.clone() });
    }
    let p0: Vec<Block> =
        w.symbols().iter().enumerate().map(|(start, &s)| Block { side: side_of(s), start, len: 1 }).collect();
    let mut steps = vec![p0];
    loop {
        let current = steps.last().unwrap();
        let mut next = Vec::with_capacity(current.len());
        let mut changed = false;
        let mut i = 0;
        while i < current.len() {
            let b = current[i];
            if i + 1 < current.len() && b.side == Side::Left && current[i + 1].side == Side::Right {
                let len = b.len + current[i + 1].len;
                if len <= k {
                    let sub = Word::from_vec_unchecked(w.symbols()[b.start..b.start + len].to_vec());
                    let side =
                        family.classify(&sub).expect("valid family houses every L_i R_j word of length <= depth");
                    next.push(Block { side, start: b.start, len });
                    changed = true;
                    i += 2;
                    continue;
                }
            }
            next.push(b);
            i += 1;
        }
        if !changed {
            break;
        }
        steps.push(next);
    }
    Ok(DecompositionTrace { word: w.clone(), steps })
}
