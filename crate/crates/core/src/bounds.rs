//! Upper bounds, lower bounds and exact values for `S(q, n, t1, t2)`, the
//! maximum size of a `(t1,t2)`-overlap-free code of length `n` over `q`
//! letters.
//!
//! Every value carries the id of the rule that produced it. All arithmetic
//! is exact; the one real constant (`e`) is handled through a rational
//! enclosure.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{big_pow, primitive_count, round_half_away, strictly_below};
use crate::word::{OverlapWindow, WordError, MAX_Q};

/// Lower end of a rational enclosure of `e`: `2.718281828 < e`.
pub const E_LOWER: (u64, u64) = (2_718_281_828, 1_000_000_000);
/// Upper end: `e < 2.718281829`.
pub const E_UPPER: (u64, u64) = (2_718_281_829, 1_000_000_000);

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BoundError {
    #[error("alphabet size {0} outside [2, {MAX_Q}]")]
    Alphabet(usize),
    #[error(transparent)]
    Window(#[from] WordError),
    #[error("k = {k} outside the valid range for n = {n}")]
    Range { k: usize, n: usize },
    #[error("inconsistent bounds at {params}: {lower_rule} gives {lower} > {upper} from {upper_rule}")]
    Inverted { params: Params, lower_rule: String, lower: BigUint, upper_rule: String, upper: BigUint },
    #[error("exact value {value} from {rule} at {params} lies outside [{lower}, {upper}]")]
    ExactOutside { params: Params, rule: String, value: BigUint, lower: BigUint, upper: BigUint },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Params {
    pub q: usize,
    pub n: usize,
    pub t1: usize,
    pub t2: usize,
}

impl Params {
    pub fn new(q: usize, n: usize, t1: usize, t2: usize) -> Result<Self, BoundError> {
        if !(2..=MAX_Q).contains(&q) {
            return Err(BoundError::Alphabet(q));
        }
        OverlapWindow::new(t1, t2, n)?;
        Ok(Params { q, n, t1, t2 })
    }

    fn with(self, n: usize, t1: usize, t2: usize) -> Params {
        Params { n, t1, t2, ..self }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q={}, n={}, t1={}, t2={})", self.q, self.n, self.t1, self.t2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
    Exact,
    /// Reported for information only; never used in best bounds.
    Conjectured,
    /// Reported for information only; known to be violated for some
    /// parameters.
    Diagnostic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundEntry {
    #[serde(rename = "id")]
    pub rule: &'static str,
    pub kind: BoundKind,
    #[serde(serialize_with = "crate::bignum::serialize")]
    pub value: BigUint,
    pub note: String,
}

impl BoundEntry {
    fn new(rule: &'static str, kind: BoundKind, value: BigUint, note: impl Into<String>) -> Self {
        BoundEntry { rule, kind, value, note: note.into() }
    }
}

/// Exact maxima established elsewhere (typically by exhaustive search).
#[derive(Clone, Debug, Default)]
pub struct ExactCache {
    values: BTreeMap<Params, u64>,
}

impl ExactCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, p: Params, value: u64) {
        self.values.insert(p, value);
    }

    pub fn get(&self, p: &Params) -> Option<u64> {
        self.values.get(p).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn big(v: usize) -> BigUint {
    BigUint::from(v)
}

/// `floor(k q / (k + 1))`, the size of the larger level-1 part in the
/// balanced construction.
pub fn balanced_split(q: usize, k: usize) -> usize {
    k * q / (k + 1)
}

/// `(q - x) x^k q^(n-k-1)`: size of the balanced `(1,k)` code of length `n`.
pub fn balanced_value(q: usize, n: usize, k: usize, x: usize) -> BigUint {
    big(q - x) * big_pow(x, k) * big_pow(q, n - k - 1)
}

/// The `k` used by the `(t1,t2)` lower bound: the window of the inner
/// `(1,k)` code of length `n - t1 + 1` that is padded by `Sigma^(t1-1)`.
pub fn inner_k(n: usize, t1: usize, t2: usize) -> usize {
    if t1 + t2 <= n {
        t2
    } else {
        n - t1
    }
}

/// The divisor printed with the general placement bound,
/// `floor((2n - t1) / (n - t2))`.
pub fn printed_placement_divisor(n: usize, t1: usize, t2: usize) -> usize {
    (2 * n - t1) / (n - t2)
}

/// Number of admissible codeword placements in a window of length
/// `2n - t1`: starting offsets `k (n - t2)` with `k (n - t2) + n <= 2n - t1`.
pub fn placement_divisor(n: usize, t1: usize, t2: usize) -> usize {
    (n - t1) / (n - t2) + 1
}

/// The general bound evaluated with the printed divisor. Violated by true
/// optima for some parameters (for example `S(2,3,2,2) = 2`), so it is only
/// reported as a diagnostic.
pub fn printed_general_upper(q: usize, n: usize, t1: usize, t2: usize) -> BigUint {
    strictly_below(&big_pow(q, n), &big(printed_placement_divisor(n, t1, t2)))
}

/// Exact value for the window `(1,2)`, `n >= 4`.
pub fn pair_window_exact(q: usize, n: usize) -> BigUint {
    assert!(n >= 4);
    let (r, half) = round_half_away(q as u64, 3);
    assert!(!half, "q/3 never has fractional part 1/2");
    let r = r as usize;
    big(r) * big_pow(q - r, 2) * big_pow(q, n - 3)
}

/// Lower bound for codes that are simultaneously `(1,k)`- and
/// `(n-k,n-1)`-overlap-free, `1 < k < n/2`.
pub fn simultaneous_lower(q: usize, n: usize, k: usize) -> Result<BigUint, BoundError> {
    if k <= 1 || 2 * k >= n {
        return Err(BoundError::Range { k, n });
    }
    let x = q * k / (k + 2);
    Ok(big_pow(x, k) * big_pow(q - x, 2) * big_pow(q, n - k - 2))
}

/// The `k = 1` value `(q-1)^2 q^(n-3)`, `n >= 3`.
pub fn simultaneous_lower_k1(q: usize, n: usize) -> Result<BigUint, BoundError> {
    if n < 3 {
        return Err(BoundError::Range { k: 1, n });
    }
    Ok(big_pow(q - 1, 2) * big_pow(q, n - 3))
}

/// Every applicable upper bound.
pub fn upper_bounds(q: usize, n: usize, t1: usize, t2: usize) -> Result<Vec<BoundEntry>, BoundError> {
    let p = Params::new(q, n, t1, t2)?;
    Ok(upper_entries(p))
}

fn upper_entries(p: Params) -> Vec<BoundEntry> {
    let Params { q, n, t1, t2 } = p;
    let qn = big_pow(q, n);
    let mut out = Vec::new();
    use BoundKind::Upper;

    if t1 == 1 && t2 == n - 1 {
        let value = big_pow(n - 1, n - 1) * &qn / big_pow(n, n);
        out.push(BoundEntry::new("non_overlapping", Upper, value, "floor(((n-1)/n)^(n-1) q^n / n)"));
    }
    if t2 == n - 1 && 2 * t1 <= n {
        let value = &qn / big(2 * n - 2 * t1 + 1);
        out.push(BoundEntry::new(
            "weakly_uncorrelated",
            Upper,
            value,
            "floor(q^n / (2n - 2t1 + 1)), t2 = n-1, t1 <= n/2",
        ));
    }
    if t1 == 1 && 2 * t2 <= n {
        let value = (&qn - big_pow(q, n - t2)) / big(2 * t2);
        out.push(BoundEntry::new("short_window", Upper, value, "floor((q^n - q^(n-t2)) / (2 t2)), t1 = 1, t2 <= n/2"));
    }
    if t1 == 1 && 2 * t2 > n {
        let m = n / 2;
        let value = (&qn - big_pow(q, n - m)) / big(2 * m);
        out.push(BoundEntry::new(
            "short_window_narrowed",
            Upper,
            value,
            "short-window bound at t2' = floor(n/2); a wider window only removes codes",
        ));
    }
    let d = placement_divisor(n, t1, t2);
    out.push(BoundEntry::new(
        "placement",
        Upper,
        strictly_below(&qn, &big(d)),
        format!("largest integer below q^n / {d}, {d} = floor((n-t1)/(n-t2)) + 1 placements"),
    ));
    if t1 == 1 && 2 * t2 >= n {
        let value = primitive_count(q, n) / big(n);
        out.push(BoundEntry::new("primitive", Upper, value, "floor(P_q(n) / n), t1 = 1, t2 >= n/2"));
    }
    if n > 2 * t2 {
        let inner = p.with(2 * t2, t1, t2);
        let (best, rule) = best_of(&upper_entries(inner), BoundKind::Upper);
        let value = big_pow(q, n - 2 * t2) * best;
        out.push(BoundEntry::new(
            "length_reduction",
            Upper,
            value,
            format!("q^(n-2t2) times the best upper bound at length 2t2 ({rule})"),
        ));
    }
    out
}

/// Every applicable constructive lower bound.
pub fn lower_bounds(q: usize, n: usize, t1: usize, t2: usize) -> Result<Vec<BoundEntry>, BoundError> {
    let p = Params::new(q, n, t1, t2)?;
    Ok(lower_entries(p, None))
}

fn lower_entries(p: Params, cache: Option<&ExactCache>) -> Vec<BoundEntry> {
    let Params { q, n, t1, t2 } = p;
    let mut out = Vec::new();
    use BoundKind::Lower;

    let k = inner_k(n, t1, t2);
    let x = balanced_split(q, k);
    if x >= 1 {
        out.push(BoundEntry::new(
            "balanced_partition",
            Lower,
            balanced_value(q, n, k, x),
            format!("(q-x) x^k q^(n-k-1), k = {k}, x = floor(kq/(k+1)) = {x}"),
        ));
    }
    if q < k + 1 {
        let value = big_pow(q - 1, k) * big_pow(q, n - k - 1);
        out.push(BoundEntry::new("balanced_fallback", Lower, value, format!("(q-1)^k q^(n-k-1), k = {k}")));
    }
    if t1 == 1 && n >= 4 && t2 == n - 2 {
        let below = p.with(n - 1, 1, n - 2);
        let (best, rule) = best_lower_at(below, cache);
        out.push(BoundEntry::new(
            "extend_one",
            Lower,
            big(q) * best,
            format!("q times the best lower bound for non-overlapping codes of length n-1 ({rule})"),
        ));
    }
    if t1 == 1 && n >= 6 && t2 == n - 3 {
        let below = p.with(n - 2, 1, n - 3);
        let (best, rule) = best_lower_at(below, cache);
        out.push(BoundEntry::new(
            "extend_two",
            Lower,
            big_pow(q, 2) * best,
            format!("q^2 times the best lower bound for non-overlapping codes of length n-2 ({rule})"),
        ));
    }
    if n > 2 * t2 {
        let inner = p.with(2 * t2, t1, t2);
        let (best, rule) = best_lower_at(inner, cache);
        out.push(BoundEntry::new(
            "length_reduction",
            Lower,
            big_pow(q, n - 2 * t2) * best,
            format!("q^(n-2t2) times the best lower bound at length 2t2 ({rule})"),
        ));
    }
    out
}

fn best_lower_at(p: Params, cache: Option<&ExactCache>) -> (BigUint, &'static str) {
    let mut entries = lower_entries(p, cache);
    entries.extend(exact_entries(p, cache));
    let (value, rule) = best_of(&entries, BoundKind::Lower);
    (value, rule)
}

/// Exact values that follow from a rule or from `cache`.
pub fn exact_values(
    q: usize,
    n: usize,
    t1: usize,
    t2: usize,
    cache: Option<&ExactCache>,
) -> Result<Vec<BoundEntry>, BoundError> {
    let p = Params::new(q, n, t1, t2)?;
    Ok(exact_entries(p, cache))
}

fn exact_entries(p: Params, cache: Option<&ExactCache>) -> Vec<BoundEntry> {
    let Params { q, n, t1, t2 } = p;
    let mut out = Vec::new();
    use BoundKind::Exact;
    if t1 == 1 && t2 == 2 && n >= 4 {
        let r = round_half_away(q as u64, 3).0;
        out.push(BoundEntry::new(
            "pair_window",
            Exact,
            pair_window_exact(q, n),
            format!("r (q-r)^2 q^(n-3), r = round(q/3) = {r}"),
        ));
    }
    if let Some(v) = cache.and_then(|c| c.get(&p)) {
        out.push(BoundEntry::new("search", Exact, BigUint::from(v), "exhaustive search"));
    }
    if n > 2 * t2 {
        let inner = p.with(2 * t2, t1, t2);
        if let Some(e) = exact_entries(inner, cache).into_iter().next() {
            out.push(BoundEntry::new(
                "length_reduction",
                Exact,
                big_pow(q, n - 2 * t2) * e.value,
                format!("q^(n-2t2) times the exact value at length 2t2 ({})", e.rule),
            ));
        }
    }
    out
}

/// The open bound `(k/(k+1))^k q^n / (k+1)` for `(1,k)` codes, floored.
pub fn conjectured_upper(q: usize, n: usize, k: usize) -> BigUint {
    big_pow(k, k) * big_pow(q, n) / big_pow(k + 1, k + 1)
}

fn best_of(entries: &[BoundEntry], kind: BoundKind) -> (BigUint, &'static str) {
    let mut best: Option<(&BigUint, &'static str)> = None;
    for e in entries {
        let usable = match kind {
            BoundKind::Upper => matches!(e.kind, BoundKind::Upper | BoundKind::Exact),
            _ => matches!(e.kind, BoundKind::Lower | BoundKind::Exact),
        };
        if !usable {
            continue;
        }
        let better = match best {
            None => true,
            Some((v, _)) => match kind {
                BoundKind::Upper => &e.value < v,
                _ => &e.value > v,
            },
        };
        if better {
            best = Some((&e.value, e.rule));
        }
    }
    match best {
        Some((v, r)) => (v.clone(), r),
        None => (BigUint::zero(), "trivial"),
    }
}

/// Certification of `lower >= q^n / (e (t2 + 1))`, evaluated with the lower
/// end of the enclosure of `e` (which makes the check sufficient).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EBoundCheck {
    pub divisor: usize,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub q: usize,
    pub n: usize,
    pub t1: usize,
    pub t2: usize,
    #[serde(rename = "rules")]
    pub entries: Vec<BoundEntry>,
    #[serde(serialize_with = "crate::bignum::serialize")]
    pub best_lower: BigUint,
    pub best_lower_rule: &'static str,
    #[serde(serialize_with = "crate::bignum::serialize")]
    pub best_upper: BigUint,
    pub best_upper_rule: &'static str,
    #[serde(serialize_with = "crate::bignum::option::serialize")]
    pub exact: Option<BigUint>,
    pub e_bound: Option<EBoundCheck>,
}

impl BoundReport {
    pub fn params(&self) -> Params {
        Params { q: self.q, n: self.n, t1: self.t1, t2: self.t2 }
    }
}

/// Collects every rule, picks the best bounds, and fails on any inversion.
pub fn bound_report(
    q: usize,
    n: usize,
    t1: usize,
    t2: usize,
    cache: Option<&ExactCache>,
) -> Result<BoundReport, BoundError> {
    let p = Params::new(q, n, t1, t2)?;
    let mut entries = upper_entries(p);
    entries.extend(lower_entries(p, cache));
    let exact = exact_entries(p, cache);
    entries.extend(exact.iter().cloned());

    let (best_upper, best_upper_rule) = best_of(&entries, BoundKind::Upper);
    let (best_lower, best_lower_rule) = best_of(&entries, BoundKind::Lower);
    if best_lower > best_upper {
        return Err(BoundError::Inverted {
            params: p,
            lower_rule: best_lower_rule.into(),
            lower: best_lower,
            upper_rule: best_upper_rule.into(),
            upper: best_upper,
        });
    }
    for e in &exact {
        if e.value < best_lower || e.value > best_upper {
            return Err(BoundError::ExactOutside {
                params: p,
                rule: e.rule.into(),
                value: e.value.clone(),
                lower: best_lower,
                upper: best_upper,
            });
        }
    }
    let exact_value =
        exact.first().map(|e| e.value.clone()).or_else(|| (best_lower == best_upper).then(|| best_lower.clone()));
    if exact.is_empty() && best_lower == best_upper {
        entries.push(BoundEntry::new(
            "sandwich",
            BoundKind::Exact,
            best_lower.clone(),
            format!("{best_lower_rule} meets {best_upper_rule}"),
        ));
    }

    if t1 == 1 {
        entries.push(BoundEntry::new(
            "balanced_conjecture",
            BoundKind::Conjectured,
            conjectured_upper(q, n, t2),
            "open: (k/(k+1))^k q^n / (k+1), k = t2",
        ));
    }
    entries.push(BoundEntry::new(
        "placement_printed",
        BoundKind::Diagnostic,
        printed_general_upper(q, n, t1, t2),
        format!(
            "placement bound with divisor floor((2n-t1)/(n-t2)) = {}; not a valid bound in general",
            printed_placement_divisor(n, t1, t2)
        ),
    ));

    let e_bound = (t1 + t2 <= n && q.is_multiple_of(t2 + 1)).then(|| {
        let lower = lower_entries(p, None)
            .into_iter()
            .find(|e| e.rule == "balanced_partition")
            .map(|e| e.value)
            .unwrap_or_default();
        let (num, den) = E_LOWER;
        let lhs = lower * BigUint::from(num) * big(t2 + 1);
        let rhs = big_pow(q, n) * BigUint::from(den);
        EBoundCheck { divisor: t2 + 1, certified: lhs >= rhs }
    });

    Ok(BoundReport {
        q,
        n,
        t1,
        t2,
        entries,
        best_lower,
        best_lower_rule,
        best_upper,
        best_upper_rule,
        exact: exact_value,
        e_bound,
    })
}
