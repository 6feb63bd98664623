//! Number-theoretic counting: Möbius function and primitive words.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Zero};

/// Möbius function: `(-1)^t` for a product of `t` distinct primes, `0` if
/// `d` has a square factor, `1` for `d = 1`.
pub fn mobius(d: u64) -> i8 {
    assert!(d >= 1, "mobius is defined on positive integers");
    let mut rest = d;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest.is_multiple_of(p) {
            rest /= p;
            if rest.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if rest > 1 {
        sign = -sign;
    }
    sign
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn big_pow(base: usize, exp: usize) -> BigUint {
    Pow::pow(BigUint::from(base), exp)
}

/// Number of primitive words of length `n` over `q` letters:
/// `sum over d | n of mu(d) q^(n/d)`.
pub fn primitive_count(q: usize, n: usize) -> BigUint {
    assert!(q >= 2 && n >= 1);
    let total: BigInt = divisors(n as u64)
        .into_iter()
        .map(|d| BigInt::from(mobius(d)) * BigInt::from(big_pow(q, n / d as usize)))
        .sum();
    total.to_biguint().expect("primitive word count is non-negative")
}

/// Same as [`primitive_count`] in 64-bit arithmetic; `None` on overflow.
pub fn primitive_count_u64(q: u64, n: u32) -> Option<u64> {
    let mut total: i128 = 0;
    for d in divisors(n as u64) {
        let term = q.checked_pow(n / d as u32)? as i128;
        total = total.checked_add(mobius(d) as i128 * term)?;
    }
    u64::try_from(total).ok()
}

/// Floor of `num / den` for big unsigned values.
pub fn floor_div(num: &BigUint, den: &BigUint) -> BigUint {
    num / den
}

/// Largest integer strictly below `num / den`.
pub fn strictly_below(num: &BigUint, den: &BigUint) -> BigUint {
    let quotient = num / den;
    if (num % den).is_zero() {
        if quotient.is_zero() {
            BigUint::zero()
        } else {
            quotient - BigUint::one()
        }
    } else {
        quotient
    }
}

/// Rounds `num / den` to the nearest integer, halves away from zero.
/// Returns the value and whether an exact half was hit.
pub fn round_half_away(num: u64, den: u64) -> (u64, bool) {
    let q = num / den;
    let r = num % den;
    let twice = 2 * r;
    if twice >= den {
        (q + 1, twice == den)
    } else {
        (q, false)
    }
}
