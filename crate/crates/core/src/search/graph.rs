//! Compatibility graph: vertices are self-compatible words, edges join
//! words with no forbidden overlap in either direction.

use crate::exec::Execution;
use crate::word::{conflicts, has_overlap_in, Alphabet, Word};

use super::bitset::Bitset;
use super::SearchError;

#[derive(Clone, Debug)]
pub struct CompatibilityGraph {
    alphabet: Alphabet,
    n: usize,
    t1: usize,
    t2: usize,
    words: Vec<Word>,
    adj: Vec<Bitset>,
}

/// Whether `w` can be a codeword at all: no `t`-overlap with itself.
pub fn self_compatible(w: &Word, t1: usize, t2: usize) -> bool {
    !has_overlap_in(w.symbols(), w.symbols(), t1, t2)
}

impl CompatibilityGraph {
    /// Builds the graph over all self-compatible words accepted by `keep`,
    /// in lexicographic order.
    pub fn build(
        alphabet: Alphabet,
        n: usize,
        t1: usize,
        t2: usize,
        keep: impl Fn(&Word) -> bool,
        vertex_cap: usize,
        memory_cap: usize,
        exec: Execution,
    ) -> Result<Self, SearchError> {
        let total = alphabet.word_count(n).filter(|&c| c as u128 <= vertex_cap as u128);
        let Some(total) = total else {
            return Err(SearchError::TooLarge { q: alphabet.q(), n, cap: vertex_cap });
        };
        let words: Vec<Word> = (0..total)
            .map(|i| Word::from_index(i, alphabet, n))
            .filter(|w| self_compatible(w, t1, t2) && keep(w))
            .collect();
        let v = words.len();
        let bytes = v.saturating_mul(v.div_ceil(64) * 8);
        if bytes > memory_cap {
            return Err(SearchError::Memory { vertices: v, bytes, cap: memory_cap });
        }
        let adj = exec.map_range(v, |i| {
            let mut row = Bitset::new(v);
            let u = words[i].symbols();
            for (j, w) in words.iter().enumerate() {
                if i != j && !conflicts(u, w.symbols(), t1, t2) {
                    row.insert(j);
                }
            }
            row
        });
        Ok(CompatibilityGraph { alphabet, n, t1, t2, words, adj })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> (usize, usize) {
        (self.t1, self.t2)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.words.binary_search(w).ok()
    }

    pub fn adjacency(&self) -> &[Bitset] {
        &self.adj
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Bitset::count).sum::<usize>() / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graph() {
        let a = Alphabet::new(2).unwrap();
        let g = CompatibilityGraph::build(a, 4, 1, 2, |_| true, 1 << 20, 1 << 30, Execution::Sequential).unwrap();
        // words with no self-overlap of length 1 or 2 start and end differently
        // and are not of the form xyxy
        assert!(g.words().iter().all(|w| w.first() != w.last()));
        assert!(g.index_of(&Word::parse("0101", a).unwrap()).is_none());
        let u = g.index_of(&Word::parse("0001", a).unwrap()).unwrap();
        let v = g.index_of(&Word::parse("0011", a).unwrap()).unwrap();
        assert!(g.adjacent(u, v) && g.adjacent(v, u));
        for i in 0..g.len() {
            assert!(!g.adjacent(i, i));
            for j in 0..g.len() {
                assert_eq!(g.adjacent(i, j), g.adjacent(j, i));
            }
        }
    }

    #[test]
    fn caps() {
        let a = Alphabet::new(3).unwrap();
        let err = CompatibilityGraph::build(a, 14, 1, 2, |_| true, 1 << 20, 1 << 30, Execution::Sequential);
        assert!(matches!(err, Err(SearchError::TooLarge { .. })));
        let err = CompatibilityGraph::build(a, 6, 5, 5, |_| true, 1 << 20, 100, Execution::Sequential);
        assert!(matches!(err, Err(SearchError::Memory { .. })));
    }
}
