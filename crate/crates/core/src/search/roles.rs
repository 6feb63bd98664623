//! Exact maxima through prefix/suffix roles, for windows with `n >= 2 t2`.
//!
//! A code is `(t1,t2)`-overlap-free iff, at every length `t` in the window,
//! its set of length-`t` prefixes is disjoint from its set of length-`t`
//! suffixes. Give every string of length `t` a role, L (may start a
//! codeword) or R (may end one). The largest code for fixed roles is every
//! word whose prefixes are all L and whose suffixes are all R. When
//! `n >= 2 t2` the length-`t2` prefix and suffix of a word are independent,
//! so that code has `|A| |B| q^(n - 2 t2)` words, where `A` (resp. `B`) is
//! the set of length-`t2` strings whose prefix (resp. suffix) chain is
//! entirely L (resp. R).
//!
//! Roles below `t2` are enumerated; at length `t2` only strings eligible
//! for both `A` and `B` need a choice, and the best split of those is a
//! one-variable maximisation.

use crate::word::{Alphabet, CodeSet, OverlapWindow, Word};

use super::SearchError;

/// Largest number of role bits below `t2` that will be enumerated.
pub const MAX_ROLE_BITS: usize = 26;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoleOutcome {
    pub size: u64,
    pub witness: CodeSet,
    pub assignments: u64,
}

fn strings(alphabet: Alphabet, t: usize) -> Vec<Word> {
    alphabet.words(t).collect()
}

/// Best split of `d` shared strings: `max_s (a + s)(b + d - s)` and the
/// smallest maximising `s`.
fn best_split(a: u64, b: u64, d: u64) -> (u64, u64) {
    (0..=d).map(|s| ((a + s) * (b + d - s), s)).fold((0, 0), |best, (v, s)| if v > best.0 { (v, s) } else { best })
}

pub fn role_bits(q: usize, t1: usize, t2: usize) -> Option<usize> {
    (t1..t2).try_fold(0usize, |acc, t| q.checked_pow(t as u32).and_then(|x| acc.checked_add(x)))
}

/// Exact maximum for `n >= 2 t2` by role enumeration.
pub fn max_code_roles(q: usize, n: usize, t1: usize, t2: usize) -> Result<RoleOutcome, SearchError> {
    let alphabet = Alphabet::new(q)?;
    let window = OverlapWindow::new(t1, t2, n)?;
    if n < 2 * t2 {
        return Err(SearchError::Unsupported(format!("role solver needs n >= 2 t2, got n={n}, t2={t2}")));
    }
    let bits = role_bits(q, t1, t2)
        .filter(|&b| b <= MAX_ROLE_BITS)
        .ok_or_else(|| SearchError::Unsupported(format!("more than {MAX_ROLE_BITS} role bits below t2={t2}")))?;
    let top = strings(alphabet, t2);
    // per top string: bit indices of its prefixes and suffixes below t2
    let mut offset = 0usize;
    let mut pre_bits = vec![Vec::new(); top.len()];
    let mut suf_bits = vec![Vec::new(); top.len()];
    for t in t1..t2 {
        for (i, x) in top.iter().enumerate() {
            pre_bits[i].push(offset + Word::from_vec_unchecked(x.prefix(t).to_vec()).index(alphabet) as usize);
            suf_bits[i].push(offset + Word::from_vec_unchecked(x.suffix(t).to_vec()).index(alphabet) as usize);
        }
        offset += q.pow(t as u32);
    }
    let pre_mask: Vec<u64> = pre_bits.iter().map(|b| b.iter().fold(0, |m, &i| m | 1 << i)).collect();
    let suf_mask: Vec<u64> = suf_bits.iter().map(|b| b.iter().fold(0, |m, &i| m | 1 << i)).collect();

    // a set bit means role L
    let mut best: Option<(u64, u64, u64)> = None;
    for roles in 0u64..1 << bits {
        let (mut a, mut b, mut d) = (0u64, 0u64, 0u64);
        for i in 0..top.len() {
            let ea = roles & pre_mask[i] == pre_mask[i];
            let eb = roles & suf_mask[i] == 0;
            match (ea, eb) {
                (true, true) => d += 1,
                (true, false) => a += 1,
                (false, true) => b += 1,
                (false, false) => {}
            }
        }
        let (v, s) = best_split(a, b, d);
        if best.is_none_or(|(bv, _, _)| v > bv) {
            best = Some((v, roles, s));
        }
    }
    let (value, roles, s) = best.expect("at least one assignment");
    let mut shared_left = s;
    let mut prefixes = Vec::new();
    let mut suffixes = Vec::new();
    for (i, x) in top.iter().enumerate() {
        let ea = roles & pre_mask[i] == pre_mask[i];
        let eb = roles & suf_mask[i] == 0;
        match (ea, eb) {
            (true, true) if shared_left > 0 => {
                shared_left -= 1;
                prefixes.push(x.clone());
            }
            (true, true) | (false, true) => suffixes.push(x.clone()),
            (true, false) => prefixes.push(x.clone()),
            (false, false) => {}
        }
    }
    let middle: Vec<Word> = strings(alphabet, n - 2 * t2);
    let mut code = CodeSet::new(alphabet, n).with_window(window);
    for p in &prefixes {
        for m in &middle {
            for s in &suffixes {
                let mut w = p.symbols().to_vec();
                w.extend_from_slice(m.symbols());
                w.extend_from_slice(s.symbols());
                code.insert(Word::from_vec_unchecked(w))?;
            }
        }
    }
    let size = value * (q as u64).pow((n - 2 * t2) as u32);
    debug_assert_eq!(code.len() as u64, size);
    Ok(RoleOutcome { size, witness: code, assignments: 1 << bits })
}
