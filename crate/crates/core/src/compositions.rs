//! Integer compositions.

use std::fmt;

/// An ordered tuple of positive parts. The empty composition has size 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition(Vec<usize>);

impl Composition {
    pub fn new(parts: Vec<usize>) -> Option<Self> {
        parts.iter().all(|&p| p >= 1).then_some(Composition(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of parts.
    pub fn par(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max_part(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All compositions of `m` in lexicographic order; `[()]` for `m = 0`.
pub fn compositions(m: usize) -> Vec<Composition> {
    compositions_bounded(m, usize::MAX)
}

/// Compositions of `m` whose parts are all at most `max_part`.
pub fn compositions_bounded(m: usize, max_part: usize) -> Vec<Composition> {
    fn rec(rest: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if rest == 0 {
            out.push(Composition(current.clone()));
            return;
        }
        for first in 1..=rest.min(max_part) {
            current.push(first);
            rec(rest - first, max_part, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, max_part, &mut Vec::new(), &mut out);
    out
}
