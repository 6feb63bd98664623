//! Exhaustive search: maximum codes, maximality tests, and the
//! family-level maximality certificate.

pub mod bitset;
pub mod clique;
pub mod graph;
pub mod roles;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::constructions::{overlap_free_1k, ConstructionError};
use crate::exec::Execution;
use crate::family::{family_from_code, FamilyError, PartitionFamily, Side};
use crate::word::{conflicts, verify_overlap_free, Alphabet, CodeSet, OverlapWindow, Word, WordError};

pub use bitset::Bitset;
pub use clique::{Budget, CliqueOutcome};
pub use graph::{self_compatible, CompatibilityGraph};

pub const DEFAULT_VERTEX_CAP: usize = 1 << 20;
pub const DEFAULT_MEMORY_CAP: usize = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("q^n for q={q}, n={n} exceeds the vertex cap {cap}")]
    TooLarge { q: usize, n: usize, cap: usize },
    #[error("adjacency for {vertices} vertices needs {bytes} bytes, cap is {cap}")]
    Memory { vertices: usize, bytes: usize, cap: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("search budget exhausted")]
    Budget,
}

/// Which exact method `max_code` uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Roles when `n >= 2 t2` and the enumeration is small, clique otherwise.
    #[default]
    Auto,
    Clique,
    Roles,
}

/// Role enumeration is preferred over clique search up to this many bits.
const AUTO_ROLE_BITS: usize = 20;

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub budget: Budget,
    pub exec: Execution,
    pub strategy: Strategy,
    /// Split by first/last letter classes when `t1 = 1`.
    pub symmetry: bool,
    pub vertex_cap: usize,
    pub memory_cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: Budget::unlimited(),
            exec: Execution::default(),
            strategy: Strategy::Auto,
            symmetry: true,
            vertex_cap: DEFAULT_VERTEX_CAP,
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

impl SearchOptions {
    pub fn with_nodes(mut self, nodes: u64) -> Self {
        self.budget.nodes = Some(nodes);
        self
    }

    pub fn with_time(mut self, time: Duration) -> Self {
        self.budget.time = Some(time);
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn without_symmetry(mut self) -> Self {
        self.symmetry = false;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub size: usize,
    pub witness: CodeSet,
    pub exact: bool,
    /// Proven upper bound on the maximum; equals `size` when exact.
    pub upper_bound: u64,
    pub method: Strategy,
    /// Clique expansions, or role assignments for the role method.
    pub nodes_expanded: u64,
    pub vertices: usize,
}

/// `floor(s/2) ceil(s/2)`.
fn half_product(s: u64) -> u64 {
    (s / 2) * s.div_ceil(2)
}

/// Upper bound from keeping a single overlap length `t` of the window.
///
/// With one length, a code is fixed by roles L/R on `Σ^t`. If `n >= 2t`
/// its size is `|L| |R| q^(n-2t)`. Otherwise a word is a length-`t` prefix
/// in L and a length-`t` suffix in R sharing their middle `m = 2t - n`
/// letters, so the size is `Σ_z a_z b_z` over `z ∈ Σ^m`, where `a_z`
/// counts L strings ending in `z` and `b_z` R strings starting with `z`.
/// Each string feeds exactly one of these counts, each count is at most
/// `q^(n-t)`, and packing the `q^t` strings into as few keys as possible
/// maximises the sum.
pub fn single_length_upper(q: usize, n: usize, t: usize) -> Option<u64> {
    let q = q as u64;
    let total = q.checked_pow(t as u32)?;
    if n >= 2 * t {
        return half_product(total).checked_mul(q.checked_pow((n - 2 * t) as u32)?);
    }
    let cap = 2 * q.checked_pow((n - t) as u32)?;
    (total / cap).checked_mul(half_product(cap))?.checked_add(half_product(total % cap))
}

/// Best single-length bound over the window.
pub fn relaxation_upper(q: usize, n: usize, t1: usize, t2: usize) -> Option<u64> {
    (t1..=t2).filter_map(|t| single_length_upper(q, n, t)).min()
}

/// Candidate classes to search. With `t1 = 1` the first letters and last
/// letters of a code are disjoint; relabelling symbols and reversing words
/// (both preserve overlap-freeness) let us assume the first letters are
/// `0..a` and the last letters lie in `a..q`, for some `a <= q/2`.
fn classes(q: usize, t1: usize, symmetry: bool) -> Vec<Option<usize>> {
    if symmetry && t1 == 1 {
        (1..=q / 2).map(Some).collect()
    } else {
        vec![None]
    }
}

fn in_class(w: &Word, class: Option<usize>) -> bool {
    match class {
        Some(a) => (w.first() as usize) < a && (w.last() as usize) >= a,
        None => true,
    }
}

fn class_set(g: &CompatibilityGraph, class: Option<usize>) -> Bitset {
    let mut b = Bitset::new(g.len());
    for (i, w) in g.words().iter().enumerate() {
        if in_class(w, class) {
            b.insert(i);
        }
    }
    b
}

/// Maximum `(t1, t2)`-overlap-free code of length `n` over `q` symbols.
///
/// The size comes from a branch-and-bound pass (parallel over top-level
/// branches when `opts.exec` says so). The witness is then recomputed by a
/// sequential search for the first clique of that size, so the reported
/// code does not depend on thread scheduling.
pub fn max_code(q: usize, n: usize, t1: usize, t2: usize, opts: &SearchOptions) -> Result<SearchOutcome, SearchError> {
    let alphabet = Alphabet::new(q)?;
    let window = OverlapWindow::new(t1, t2, n)?;
    let use_roles = match opts.strategy {
        Strategy::Roles => true,
        Strategy::Clique => false,
        Strategy::Auto => n >= 2 * t2 && roles::role_bits(q, t1, t2).is_some_and(|b| b <= AUTO_ROLE_BITS),
    };
    if use_roles {
        let out = roles::max_code_roles(q, n, t1, t2)?;
        return Ok(SearchOutcome {
            size: out.witness.len(),
            upper_bound: out.size,
            witness: out.witness,
            exact: true,
            method: Strategy::Roles,
            nodes_expanded: out.assignments,
            vertices: 0,
        });
    }
    let classes = classes(q, t1, opts.symmetry);
    let keep = |w: &Word| classes.iter().any(|&c| in_class(w, c));
    let g = CompatibilityGraph::build(alphabet, n, t1, t2, keep, opts.vertex_cap, opts.memory_cap, opts.exec)?;
    let class_sets: Vec<Bitset> = classes.iter().map(|&c| class_set(&g, c)).collect();

    let mut best: Vec<usize> = Vec::new();
    for set in &class_sets {
        let greedy = clique::greedy_clique(g.adjacency(), set);
        if greedy.len() > best.len() {
            best = greedy;
        }
    }
    let mut exact = true;
    let mut nodes = 0u64;
    for set in &class_sets {
        let out = clique::max_clique(g.adjacency(), set, best.len(), None, &opts.budget, opts.exec);
        nodes += out.nodes;
        exact &= out.exact;
        if out.clique.len() > best.len() {
            best = out.clique;
        }
    }
    let size = best.len();
    if exact && opts.exec.is_parallel() {
        for set in &class_sets {
            let out = clique::find_clique(g.adjacency(), set, size, &opts.budget);
            nodes += out.nodes;
            if out.clique.len() == size {
                best = out.clique;
                break;
            }
        }
    }
    let upper_bound = if exact {
        size as u64
    } else {
        let colouring = class_sets.iter().map(|set| clique::colour_bound(g.adjacency(), set)).max().unwrap_or(0);
        relaxation_upper(q, n, t1, t2).map_or(colouring as u64, |r| r.min(colouring as u64))
    };
    // a bound met by the incumbent proves it optimal
    let exact = exact || upper_bound == size as u64;
    let words = best.iter().map(|&i| g.word(i).clone());
    let witness = CodeSet::from_words(alphabet, n, words)?.with_window(window);
    debug_assert!(verify_overlap_free(&witness, t1, t2).map(|v| v.is_ok()).unwrap_or(false));
    Ok(SearchOutcome {
        size,
        witness,
        exact,
        upper_bound,
        method: Strategy::Clique,
        nodes_expanded: nodes,
        vertices: g.len(),
    })
}

/// Answer to "is every code at most `bound` words?".
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BoundCheck {
    Holds,
    Exceeded {
        witness: CodeSet,
    },
    /// The budget ran out first.
    Unknown,
}

/// All permutations of `0..q`.
fn permutations(q: usize) -> Vec<Vec<u8>> {
    fn extend(cur: &mut Vec<u8>, q: usize, out: &mut Vec<Vec<u8>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for s in 0..q as u8 {
            if !cur.contains(&s) {
                cur.push(s);
                extend(cur, q, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(q), q, &mut out);
    out
}

/// Largest alphabet for which all symbol relabellings are used.
const MAX_RELABEL_Q: usize = 6;

/// Vertex orbits under symbol relabelling and reversal, both of which map
/// overlap-free codes to overlap-free codes. Orbits come in order of
/// decreasing degree.
fn vertex_orbits(g: &CompatibilityGraph) -> Vec<Vec<usize>> {
    let q = g.alphabet().q();
    let maps = if q <= MAX_RELABEL_Q { permutations(q) } else { vec![(0..q as u8).collect()] };
    let mut orbit_of = vec![usize::MAX; g.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for v in 0..g.len() {
        if orbit_of[v] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut orbit = Vec::new();
        for map in &maps {
            let image: Vec<u8> = g.word(v).symbols().iter().map(|&x| map[x as usize]).collect();
            for reverse in [false, true] {
                let mut w = image.clone();
                if reverse {
                    w.reverse();
                }
                if let Some(u) = g.index_of(&Word::from_vec_unchecked(w)) {
                    if orbit_of[u] == usize::MAX {
                        orbit_of[u] = id;
                        orbit.push(u);
                    }
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    orbits.sort_by_key(|o| (std::cmp::Reverse(g.degree(o[0])), o[0]));
    orbits
}

/// What is left of `total` after `spent`.
fn remaining(total: &Budget, start: Instant, nodes: u64) -> Budget {
    Budget {
        nodes: total.nodes.map(|n| n.saturating_sub(nodes)),
        time: total.time.map(|t| t.saturating_sub(start.elapsed())),
    }
}

/// Decides whether the maximum code is at most `bound` by searching only
/// for larger cliques, which is far cheaper than [`max_code`] when `bound`
/// sits above the optimum.
///
/// With `opts.symmetry` the search is split by vertex orbits under symbol
/// relabelling and reversal: a larger code either meets the first orbit,
/// and then an image of it contains the orbit's representative, or avoids
/// that orbit entirely, which is again a symmetric condition.
pub fn check_upper_bound(
    q: usize,
    n: usize,
    t1: usize,
    t2: usize,
    bound: usize,
    opts: &SearchOptions,
) -> Result<BoundCheck, SearchError> {
    let alphabet = Alphabet::new(q)?;
    let window = OverlapWindow::new(t1, t2, n)?;
    let g = CompatibilityGraph::build(alphabet, n, t1, t2, |_| true, opts.vertex_cap, opts.memory_cap, opts.exec)?;
    let exceeded = |clique: &[usize]| -> Result<BoundCheck, SearchError> {
        let words = clique.iter().map(|&i| g.word(i).clone());
        let witness = CodeSet::from_words(alphabet, n, words)?.with_window(window);
        Ok(BoundCheck::Exceeded { witness })
    };
    if bound == 0 {
        return if g.is_empty() { Ok(BoundCheck::Holds) } else { exceeded(&[0]) };
    }
    let all = Bitset::full(g.len());
    if !opts.symmetry {
        let out = clique::max_clique(g.adjacency(), &all, bound, Some(bound + 1), &opts.budget, opts.exec);
        return if out.clique.len() > bound {
            exceeded(&out.clique)
        } else if out.exact {
            Ok(BoundCheck::Holds)
        } else {
            Ok(BoundCheck::Unknown)
        };
    }
    let start = Instant::now();
    let mut nodes = 0u64;
    let mut allowed = all;
    for orbit in vertex_orbits(&g) {
        let r = orbit[0];
        let candidates = g.adjacency()[r].intersection(&allowed);
        if candidates.count() >= bound {
            let budget = remaining(&opts.budget, start, nodes);
            let out = clique::max_clique(g.adjacency(), &candidates, bound - 1, Some(bound), &budget, opts.exec);
            nodes += out.nodes;
            if out.clique.len() >= bound {
                let mut clique = out.clique;
                clique.push(r);
                clique.sort_unstable();
                return exceeded(&clique);
            }
            if !out.exact {
                return Ok(BoundCheck::Unknown);
            }
        }
        for v in orbit {
            allowed.remove(v);
        }
    }
    Ok(BoundCheck::Holds)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Maximality {
    Maximal,
    Extension { word: Word },
}

impl Maximality {
    pub fn is_maximal(&self) -> bool {
        matches!(self, Maximality::Maximal)
    }
}

fn fits(code: &CodeSet, w: &Word, t1: usize, t2: usize) -> bool {
    self_compatible(w, t1, t2) && code.iter().all(|c| !conflicts(c.symbols(), w.symbols(), t1, t2))
}

fn check_code(code: &CodeSet, t1: usize, t2: usize) -> Result<(), SearchError> {
    match verify_overlap_free(code, t1, t2)? {
        crate::word::Verdict::Ok => Ok(()),
        crate::word::Verdict::Witness(w) => Err(SearchError::Precondition(format!("code is not overlap-free: {w}"))),
    }
}

/// Whether no word of `Σ^n ∖ C` can be added; otherwise the lexicographically
/// first word that can.
pub fn is_maximal(code: &CodeSet, t1: usize, t2: usize) -> Result<Maximality, SearchError> {
    check_code(code, t1, t2)?;
    let n = code.n();
    let alphabet = code.alphabet();
    let total = alphabet.word_count(n).filter(|&c| c <= DEFAULT_VERTEX_CAP as u64).ok_or(SearchError::TooLarge {
        q: alphabet.q(),
        n,
        cap: DEFAULT_VERTEX_CAP,
    })?;
    for i in 0..total {
        let w = Word::from_index(i, alphabet, n);
        if !code.contains(&w) && fits(code, &w, t1, t2) {
            return Ok(Maximality::Extension { word: w });
        }
    }
    Ok(Maximality::Maximal)
}

/// Adds words in lexicographic order while the code stays overlap-free.
pub fn greedy_complete(code: &CodeSet, t1: usize, t2: usize) -> Result<CodeSet, SearchError> {
    check_code(code, t1, t2)?;
    let n = code.n();
    let alphabet = code.alphabet();
    let total = alphabet.word_count(n).filter(|&c| c <= DEFAULT_VERTEX_CAP as u64).ok_or(SearchError::TooLarge {
        q: alphabet.q(),
        n,
        cap: DEFAULT_VERTEX_CAP,
    })?;
    let mut out = code.clone();
    for i in 0..total {
        let w = Word::from_index(i, alphabet, n);
        if !out.contains(&w) && fits(&out, &w, t1, t2) {
            out.insert(w)?;
        }
    }
    Ok(out)
}

fn prefixes(code: &CodeSet, t: usize) -> BTreeSet<&[u8]> {
    code.iter().map(|w| w.prefix(t)).collect()
}

fn suffixes(code: &CodeSet, t: usize) -> BTreeSet<&[u8]> {
    code.iter().map(|w| w.suffix(t)).collect()
}

/// The first `(t, side, x)` with `x ∈ L_t` not a prefix of `C` or
/// `x ∈ R_t` not a suffix of `C`, skipping `t = skip`.
fn unrealized(f: &PartitionFamily, code: &CodeSet, k: usize, skip: Option<usize>) -> Option<(usize, Side, Word)> {
    for t in (1..=k).filter(|&t| Some(t) != skip) {
        let pre = prefixes(code, t);
        if let Some(x) = f.left(t).iter().find(|x| !pre.contains(x.symbols())) {
            return Some((t, Side::Left, x.clone()));
        }
        let suf = suffixes(code, t);
        if let Some(x) = f.right(t).iter().find(|x| !suf.contains(x.symbols())) {
            return Some((t, Side::Right, x.clone()));
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Certificate {
    CertifiedMaximal,
    /// `x` at level `t` is not realised as a prefix (left) or suffix (right);
    /// the code is then not maximal.
    ConditionFailure {
        t: usize,
        side: Side,
        x: Word,
    },
    /// The middle level holds a single word; see [`binary_edge_check`].
    Inconclusive,
}

fn middle_union(f: &PartitionFamily, n: usize) -> Option<BTreeSet<Word>> {
    n.is_multiple_of(2).then(|| f.left(n / 2).union(f.right(n / 2)).cloned().collect())
}

fn check_half_depth(n: usize, k: usize, f: &PartitionFamily) -> Result<(), SearchError> {
    if 2 * k < n {
        return Err(SearchError::Unsupported(format!("k={k} < n/2 for n={n}")));
    }
    if k >= n {
        return Err(SearchError::Unsupported(format!("k={k} >= n={n}")));
    }
    if f.depth() < k {
        return Err(ConstructionError::Depth { needed: k, found: f.depth() }.into());
    }
    Ok(())
}

/// Decides maximality of the `(1,k)` code built from `f` from the family
/// alone, where the prefix/suffix realisation condition is decisive.
pub fn maximality_certificate(f: &PartitionFamily, n: usize, k: usize) -> Result<Certificate, SearchError> {
    check_half_depth(n, k, f)?;
    let f = f.truncated(k);
    let code = overlap_free_1k(&f, n, k)?;
    Ok(match unrealized(&f, &code, k, None) {
        None => Certificate::CertifiedMaximal,
        Some(_) if middle_union(&f, n).is_some_and(|m| m.len() == 1) => Certificate::Inconclusive,
        Some((t, side, x)) => Certificate::ConditionFailure { t, side, x },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeClause {
    pub clause: &'static str,
    pub applicable: bool,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeReport {
    pub applicable: bool,
    pub middle: Option<Word>,
    pub clauses: Vec<EdgeClause>,
}

impl EdgeReport {
    pub fn all_hold(&self) -> bool {
        self.clauses.iter().all(|c| !c.applicable || c.holds)
    }
}

fn concat_all(parts: &[&BTreeSet<Word>]) -> BTreeSet<Word> {
    parts
        .iter()
        .fold(BTreeSet::from([Word::from_vec_unchecked(Vec::new())]), |acc, s| crate::family::concat_sets(&acc, s))
}

/// Clauses (ii)/(iii) of the binary edge case, written for prefixes; the
/// suffix version is obtained by passing mirrored arguments.
fn chain_clause(
    clause: &'static str,
    f: &PartitionFamily,
    code: &CodeSet,
    n: usize,
    k: usize,
    side: Side,
    u: &Word,
) -> EdgeClause {
    let h = n / 2;
    let realized: BTreeSet<Vec<u8>> = match side {
        Side::Left => (1..=k).flat_map(|t| prefixes(code, t)).map(<[u8]>::to_vec).collect(),
        Side::Right => (1..=k).flat_map(|t| suffixes(code, t)).map(<[u8]>::to_vec).collect(),
    };
    let own = |i: usize| f.side(i, side);
    let ok = |s: &BTreeSet<Word>| s.iter().all(|w| realized.contains(w.symbols()));
    // orient a chain of factors toward u: L_j L_1 u for prefixes, u R_1 R_j for suffixes
    let chain = |outer: &[&BTreeSet<Word>]| -> BTreeSet<Word> {
        let us = BTreeSet::from([u.clone()]);
        let mut parts: Vec<&BTreeSet<Word>> = outer.to_vec();
        match side {
            Side::Left => {
                parts.push(&us);
                concat_all(&parts)
            }
            Side::Right => {
                parts.reverse();
                parts.insert(0, &us);
                concat_all(&parts)
            }
        }
    };
    if !own(h).contains(u) || realized.contains(u.symbols()) {
        return EdgeClause {
            clause,
            applicable: false,
            holds: true,
            detail: "u is realised or on the other side".into(),
        };
    }
    let mut failures = Vec::new();
    for j in (2..=k.saturating_sub(h)).filter(|&j| !own(j).is_empty()) {
        if !ok(&chain(&[own(j)])) {
            failures.push(format!("level {j} chain not realised"));
        }
    }
    if k > h {
        let direct = ok(&chain(&[own(1)]));
        let fallback = own(h - 1).is_empty()
            && (1..=k - h - 1).filter(|&j| !own(j).is_empty()).all(|j| ok(&chain(&[own(j), own(1)])));
        if !direct && !fallback {
            failures.push("neither the level-1 chain nor its fallback is realised".into());
        }
    }
    EdgeClause {
        clause,
        applicable: true,
        holds: failures.is_empty(),
        detail: if failures.is_empty() { "holds".into() } else { failures.join("; ") },
    }
}

/// Checks the three statements that hold for a maximal `(1,k)` code from
/// `f` whose middle level `L_{n/2} ∪ R_{n/2}` is a single word `u`.
/// A falsified clause is reported, not raised.
pub fn binary_edge_check(f: &PartitionFamily, n: usize, k: usize) -> Result<EdgeReport, SearchError> {
    check_half_depth(n, k, f)?;
    let Some(middle) = middle_union(f, n) else {
        return Ok(EdgeReport { applicable: false, middle: None, clauses: Vec::new() });
    };
    if middle.len() != 1 {
        return Err(SearchError::Precondition(format!("middle level has {} words, expected 1", middle.len())));
    }
    let f = f.truncated(k);
    let code = overlap_free_1k(&f, n, k)?;
    if let Maximality::Extension { word } = is_maximal(&code, 1, k)? {
        return Err(SearchError::Precondition(format!("code is not maximal: {word} extends it")));
    }
    let u = middle.into_iter().next().expect("one word");
    let first = unrealized(&f, &code, k, Some(n / 2));
    let clause_i = EdgeClause {
        clause: "i",
        applicable: true,
        holds: first.is_none(),
        detail: match &first {
            None => "holds".into(),
            Some((t, side, x)) => format!("{x} at level {t} ({}) not realised", side.letter()),
        },
    };
    Ok(EdgeReport {
        applicable: true,
        middle: Some(u.clone()),
        clauses: vec![
            clause_i,
            chain_clause("ii", &f, &code, n, k, Side::Left, &u),
            chain_clause("iii", &f, &code, n, k, Side::Right, &u),
        ],
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundTrip {
    pub maximal_codes: u64,
    pub complete: bool,
    pub counterexample: Option<CodeSet>,
}

impl RoundTrip {
    pub fn ok(&self) -> bool {
        self.complete && self.counterexample.is_none()
    }
}

/// Enumerates every maximal `(1,k)`-overlap-free code of length `n` and
/// checks that each one is rebuilt exactly by the `(1,k)` construction from
/// the family derived from it.
pub fn all_maximal_from_construction(
    q: usize,
    n: usize,
    k: usize,
    budget: &Budget,
    max_vertices: usize,
) -> Result<RoundTrip, SearchError> {
    if 2 * k < n || k >= n {
        return Err(SearchError::Unsupported(format!("need n/2 <= k < n, got k={k}, n={n}")));
    }
    let alphabet = Alphabet::new(q)?;
    let g = CompatibilityGraph::build(
        alphabet,
        n,
        1,
        k,
        |_| true,
        max_vertices,
        DEFAULT_MEMORY_CAP,
        Execution::Sequential,
    )?;
    let mut count = 0u64;
    let mut counterexample = None;
    let mut error = None;
    let complete = clique::maximal_cliques(g.adjacency(), &Bitset::full(g.len()), budget, |c| {
        count += 1;
        let code = match CodeSet::from_words(alphabet, n, c.iter().map(|&i| g.word(i).clone())) {
            Ok(code) => code,
            Err(e) => {
                error = Some(SearchError::from(e));
                return false;
            }
        };
        let rebuilt = family_from_code(&code, k)
            .map_err(SearchError::from)
            .and_then(|f| overlap_free_1k(&f, n, k).map_err(SearchError::from));
        match rebuilt {
            Ok(r) if r.words() == code.words() => true,
            Ok(_) => {
                counterexample = Some(code);
                false
            }
            Err(e) => {
                error = Some(e);
                false
            }
        }
    });
    if let Some(e) = error {
        return Err(e);
    }
    Ok(RoundTrip { maximal_codes: count, complete: complete || counterexample.is_some(), counterexample })
}
