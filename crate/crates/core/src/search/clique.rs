//! Maximum-clique branch-and-bound on bitset graphs, with a greedy
//! colouring bound, plus Bron–Kerbosch enumeration of maximal cliques.
//!
//! Vertices are renumbered by non-increasing degree before the search so
//! that colour classes are built in that order.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::exec::Execution;

use super::bitset::Bitset;

/// Limits on a search. Node counts are branch-and-bound expansions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub nodes: Option<u64>,
    pub time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(n: u64) -> Self {
        Budget { nodes: Some(n), time: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueOutcome {
    /// Best clique found, in original vertex numbering, sorted. Empty when
    /// nothing beat the supplied lower bound.
    pub clique: Vec<usize>,
    /// Whether the search ran to completion.
    pub exact: bool,
    pub nodes: u64,
}

/// A subgraph induced by a candidate set, renumbered for the search.
struct Local {
    adj: Vec<Bitset>,
    to_global: Vec<usize>,
}

impl Local {
    fn new(adj: &[Bitset], candidates: &Bitset) -> Self {
        let mut verts: Vec<usize> = candidates.iter().collect();
        let deg: Vec<usize> = verts.iter().map(|&v| adj[v].intersection_count(candidates)).collect();
        let mut idx: Vec<usize> = (0..verts.len()).collect();
        idx.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(verts[a].cmp(&verts[b])));
        verts = idx.iter().map(|&i| verts[i]).collect();
        let m = verts.len();
        let mut pos = vec![usize::MAX; adj.len()];
        for (i, &v) in verts.iter().enumerate() {
            pos[v] = i;
        }
        let local_adj = verts
            .iter()
            .map(|&v| {
                let mut row = Bitset::new(m);
                for u in adj[v].iter() {
                    if pos[u] != usize::MAX {
                        row.insert(pos[u]);
                    }
                }
                row
            })
            .collect();
        Local { adj: local_adj, to_global: verts }
    }

    fn globalize(&self, clique: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = clique.iter().map(|&v| self.to_global[v]).collect();
        out.sort_unstable();
        out
    }
}

/// Greedy colouring of `p` in vertex order. Returns vertices whose colour is
/// at least `kmin`, with their colours, in non-decreasing colour order.
fn color_sort(p: &Bitset, adj: &[Bitset], kmin: usize, order: &mut Vec<usize>, colors: &mut Vec<usize>) {
    order.clear();
    colors.clear();
    let mut uncolored = p.clone();
    let mut k = 0;
    while !uncolored.is_empty() {
        k += 1;
        let mut class = uncolored.clone();
        while let Some(v) = class.first() {
            class.remove(v);
            class.difference_with(&adj[v]);
            uncolored.remove(v);
            if k >= kmin {
                order.push(v);
                colors.push(k);
            }
        }
    }
}

struct Search<'a> {
    adj: &'a [Bitset],
    best: AtomicUsize,
    witness: Mutex<Vec<usize>>,
    nodes: AtomicU64,
    aborted: AtomicBool,
    done: AtomicBool,
    node_limit: u64,
    deadline: Option<Instant>,
    stop_at: usize,
}

impl Search<'_> {
    fn halted(&self) -> bool {
        self.aborted.load(Ordering::Relaxed) || self.done.load(Ordering::Relaxed)
    }

    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.node_limit || (n.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d)) {
            self.aborted.store(true, Ordering::Relaxed);
        }
        !self.halted()
    }

    fn offer(&self, c: &[usize]) {
        if c.len() <= self.best.load(Ordering::Relaxed) {
            return;
        }
        let mut w = self.witness.lock().unwrap();
        if c.len() > self.best.load(Ordering::Relaxed) {
            *w = c.to_vec();
            self.best.store(c.len(), Ordering::Relaxed);
            if c.len() >= self.stop_at {
                self.done.store(true, Ordering::Relaxed);
            }
        }
    }

    fn branch(&self, c: &mut Vec<usize>, v: usize, p: &Bitset) {
        c.push(v);
        let next = p.intersection(&self.adj[v]);
        if next.is_empty() {
            self.offer(c);
        } else {
            self.expand(c, next);
        }
        c.pop();
    }

    fn expand(&self, c: &mut Vec<usize>, mut p: Bitset) {
        if !self.tick() {
            return;
        }
        let kmin = (self.best.load(Ordering::Relaxed) + 1).saturating_sub(c.len()).max(1);
        let mut order = Vec::new();
        let mut colors = Vec::new();
        color_sort(&p, self.adj, kmin, &mut order, &mut colors);
        for idx in (0..order.len()).rev() {
            if c.len() + colors[idx] <= self.best.load(Ordering::Relaxed) || self.halted() {
                return;
            }
            let v = order[idx];
            self.branch(c, v, &p);
            p.remove(v);
        }
    }
}

/// Searches for a clique larger than `lower` among `candidates`; stops early
/// once one of size `stop_at` is found. Top-level branches are spread over
/// `exec`; the incumbent size is shared between them.
pub fn max_clique(
    adj: &[Bitset],
    candidates: &Bitset,
    lower: usize,
    stop_at: Option<usize>,
    budget: &Budget,
    exec: Execution,
) -> CliqueOutcome {
    let local = Local::new(adj, candidates);
    let m = local.to_global.len();
    let search = Search {
        adj: &local.adj,
        best: AtomicUsize::new(lower),
        witness: Mutex::new(Vec::new()),
        nodes: AtomicU64::new(0),
        aborted: AtomicBool::new(false),
        done: AtomicBool::new(false),
        node_limit: budget.nodes.unwrap_or(u64::MAX),
        deadline: budget.time.map(|t| Instant::now() + t),
        stop_at: stop_at.unwrap_or(usize::MAX),
    };
    if m > 0 && search.tick() {
        let mut order = Vec::new();
        let mut colors = Vec::new();
        color_sort(&Bitset::full(m), &local.adj, 1, &mut order, &mut colors);
        let tasks: Vec<usize> = (0..order.len()).rev().collect();
        let run = |&idx: &usize| {
            if colors[idx] < search.best.load(Ordering::Relaxed) || search.halted() {
                return;
            }
            let mut p = Bitset::new(m);
            for &u in &order[..idx] {
                p.insert(u);
            }
            search.branch(&mut Vec::new(), order[idx], &p);
        };
        if exec.is_parallel() {
            exec.for_each(&tasks, run);
        } else {
            // sequential: stop scanning once the colour bound fails
            for idx in &tasks {
                if colors[*idx] < search.best.load(Ordering::Relaxed) || search.halted() {
                    break;
                }
                run(idx);
            }
        }
    }
    let witness = search.witness.into_inner().unwrap();
    CliqueOutcome {
        clique: local.globalize(&witness),
        exact: !search.aborted.load(Ordering::Relaxed),
        nodes: search.nodes.load(Ordering::Relaxed),
    }
}

/// The first clique of exactly `size` met by a sequential search; `None` if
/// none exists or the budget ran out (see `exact`).
pub fn find_clique(adj: &[Bitset], candidates: &Bitset, size: usize, budget: &Budget) -> CliqueOutcome {
    if size == 0 {
        return CliqueOutcome { clique: Vec::new(), exact: true, nodes: 0 };
    }
    let mut out = max_clique(adj, candidates, size - 1, Some(size), budget, Execution::Sequential);
    if out.clique.len() > size {
        out.clique.truncate(size);
    }
    out
}

/// Number of colours in a greedy colouring of `candidates`, an upper bound
/// on any clique inside it.
pub fn colour_bound(adj: &[Bitset], candidates: &Bitset) -> usize {
    let local = Local::new(adj, candidates);
    let m = local.to_global.len();
    let mut order = Vec::new();
    let mut colors = Vec::new();
    color_sort(&Bitset::full(m), &local.adj, 1, &mut order, &mut colors);
    colors.last().copied().unwrap_or(0)
}

/// Greedy clique: scan vertices by non-increasing degree, keep each one
/// adjacent to everything kept so far.
pub fn greedy_clique(adj: &[Bitset], candidates: &Bitset) -> Vec<usize> {
    let local = Local::new(adj, candidates);
    let mut p = Bitset::full(local.to_global.len());
    let mut c = Vec::new();
    while let Some(v) = p.first() {
        c.push(v);
        p.intersect_with(&local.adj[v]);
    }
    local.globalize(&c)
}

/// Enumerates maximal cliques contained in `candidates` (Bron–Kerbosch with
/// Tomita pivoting). `visit` returns `false` to stop. Returns whether the
/// enumeration finished.
pub fn maximal_cliques(
    adj: &[Bitset],
    candidates: &Bitset,
    budget: &Budget,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> bool {
    struct Bk<'a, F> {
        adj: &'a [Bitset],
        visit: F,
        nodes: u64,
        limit: u64,
        deadline: Option<Instant>,
        stop: bool,
    }
    impl<F: FnMut(&[usize]) -> bool> Bk<'_, F> {
        fn run(&mut self, r: &mut Vec<usize>, mut p: Bitset, mut x: Bitset) {
            self.nodes += 1;
            if self.nodes > self.limit || (self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d))
            {
                self.stop = true;
            }
            if self.stop {
                return;
            }
            if p.is_empty() {
                if x.is_empty() {
                    let mut c = r.clone();
                    c.sort_unstable();
                    if !(self.visit)(&c) {
                        self.stop = true;
                    }
                }
                return;
            }
            let pivot = p
                .iter()
                .chain(x.iter())
                .max_by_key(|&u| (p.intersection_count(&self.adj[u]), std::cmp::Reverse(u)))
                .expect("p is non-empty");
            let mut branch = p.clone();
            branch.difference_with(&self.adj[pivot]);
            for v in branch.iter().collect::<Vec<_>>() {
                r.push(v);
                self.run(r, p.intersection(&self.adj[v]), x.intersection(&self.adj[v]));
                r.pop();
                if self.stop {
                    return;
                }
                p.remove(v);
                x.insert(v);
            }
        }
    }
    let n = adj.len();
    let mut p = Bitset::new(n);
    p.union_with(candidates);
    let mut bk = Bk {
        adj,
        visit: &mut visit,
        nodes: 0,
        limit: budget.nodes.unwrap_or(u64::MAX),
        deadline: budget.time.map(|t| Instant::now() + t),
        stop: false,
    };
    bk.run(&mut Vec::new(), p, Bitset::new(n));
    !bk.stop
}
