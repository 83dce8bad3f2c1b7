//! Maximum degree sum over independent sets.
//!
//! `alpha_star(G)` = max { sum of deg(v) for v in S : S independent in G }.
//! Two engines compute it exactly:
//!
//!  * subset enumeration for n <= 20, which also yields the lexicographically
//!    least maximizer;
//!  * a degree-weighted branch-and-bound for larger graphs: branch on the
//!    highest-degree undecided vertex, prune with `current + remaining degree
//!    mass <= best`. The search is exact; a node budget turns runaway
//!    instances into a reported error instead of a hang.
//!
//! Degree-0 vertices never change the objective, so both engines ignore them;
//! this also makes the returned witness minimal in the lexicographic sense.

use thiserror::Error;

use super::Graph;

/// Above this size `alpha_star` switches from enumeration to branch-and-bound.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Default node budget for the branch-and-bound engine. Dense 256-vertex
/// graphs finish well under 10^8 nodes; the default leaves an order of
/// magnitude of headroom before an instance is declared too expensive.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphaStarError {
    #[error("node budget {budget} exhausted; best lower bound so far {best_lower_bound}")]
    BudgetExhausted { budget: u64, best_lower_bound: u64 },
}

/// Exact value plus one maximizing set and the search effort spent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaStarResult {
    pub value: u64,
    /// A maximizing independent set, sorted ascending. The enumeration engine
    /// returns the lexicographically least maximizer; branch-and-bound
    /// returns the first maximizer it proves optimal.
    pub witness: Vec<usize>,
    pub nodes_visited: u64,
}

/// Maximum degree sum over independent sets, dispatching on graph size.
pub fn alpha_star(g: &Graph, node_budget: u64) -> Result<u64, AlphaStarError> {
    alpha_star_witness(g, node_budget).map(|r| r.value)
}

/// Like [`alpha_star`] but also returns a witnessing set.
pub fn alpha_star_witness(g: &Graph, node_budget: u64) -> Result<AlphaStarResult, AlphaStarError> {
    if g.n() <= EXHAUSTIVE_LIMIT {
        Ok(alpha_star_exhaustive(g))
    } else {
        alpha_star_branch_bound(g, node_budget)
    }
}

// ---------------------------------------------------------------------------
// enumeration engine (n <= 20)
// ---------------------------------------------------------------------------

/// Enumerates all vertex subsets. Panics if `n > EXHAUSTIVE_LIMIT`.
pub fn alpha_star_exhaustive(g: &Graph) -> AlphaStarResult {
    let n = g.n();
    assert!(n <= EXHAUSTIVE_LIMIT, "enumeration limited to n <= {EXHAUSTIVE_LIMIT}, got {n}");

    // Vertex v (1-based) maps to bit v-1. Degree-0 vertices are excluded up
    // front: they add nothing and would only create spurious ties.
    let mut adj_mask = vec![0u32; n];
    let mut deg = vec![0u64; n];
    let mut live = 0u32;
    for v in 1..=n {
        deg[v - 1] = g.degree(v) as u64;
        if deg[v - 1] > 0 {
            live |= 1 << (v - 1);
        }
        for &u in g.neighbors(v) {
            adj_mask[v - 1] |= 1 << (u - 1);
        }
    }

    let mut best = 0u64;
    let mut best_mask = 0u32;
    let mut nodes = 0u64;
    let top: u32 = if n == 0 { 0 } else { 1u32 << n };
    let mut mask = 0u32;
    while mask < top {
        nodes += 1;
        let m = mask & live;
        if m == mask {
            let mut independent = true;
            let mut rest = m;
            let mut weight = 0u64;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if adj_mask[b] & m != 0 {
                    independent = false;
                    break;
                }
                weight += deg[b];
            }
            if independent && (weight > best || (weight == best && lex_less(m, best_mask))) {
                best = weight;
                best_mask = m;
            }
        }
        if mask == u32::MAX {
            break; // n == 32 cannot happen, but avoid wrap for safety
        }
        mask += 1;
    }

    AlphaStarResult { value: best, witness: mask_to_set(best_mask), nodes_visited: nodes }
}

fn mask_to_set(mask: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        let b = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out.push(b + 1);
    }
    out
}

/// Lexicographic order on the sorted vertex lists the masks denote.
fn lex_less(a: u32, b: u32) -> bool {
    mask_to_set(a) < mask_to_set(b)
}

// ---------------------------------------------------------------------------
// branch-and-bound engine
// ---------------------------------------------------------------------------

#[inline]
fn word_remove(set: &mut [u64], i: usize) {
    set[i >> 6] &= !(1u64 << (i & 63));
}

#[inline]
fn word_first(set: &[u64]) -> Option<usize> {
    for (w, &word) in set.iter().enumerate() {
        if word != 0 {
            return Some((w << 6) + word.trailing_zeros() as usize);
        }
    }
    None
}

struct Bnb<'a> {
    /// Closed neighborhoods (vertex plus its neighbors), row-major, in the
    /// degree-sorted labeling.
    nbhd: &'a [u64],
    deg: &'a [u64],
    words: usize,
    budget: u64,
    nodes: u64,
    best: u64,
    best_set: Vec<usize>,
    chosen: Vec<usize>,
}

impl Bnb<'_> {
    fn run(&mut self, arena: &mut [Vec<u64>], depth: usize, mut sum: u64, current: u64) -> Result<(), ()> {
        loop {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(());
            }
            if current > self.best {
                self.best = current;
                self.best_set = self.chosen.clone();
            }
            if current + sum <= self.best {
                return Ok(());
            }
            let (head, tail) = arena.split_at_mut(depth + 1);
            let cand = &mut head[depth];
            let v = match word_first(cand) {
                Some(v) => v,
                None => return Ok(()),
            };

            // Include v: drop its closed neighborhood from the candidates.
            let next = &mut tail[0];
            let row = &self.nbhd[v * self.words..(v + 1) * self.words];
            let mut removed_weight = 0u64;
            for w in 0..self.words {
                let removed = cand[w] & row[w];
                next[w] = cand[w] & !row[w];
                let mut word = removed;
                while word != 0 {
                    let b = (w << 6) + word.trailing_zeros() as usize;
                    word &= word - 1;
                    removed_weight += self.deg[b];
                }
            }
            self.chosen.push(v);
            self.run(arena, depth + 1, sum - removed_weight, current + self.deg[v])?;
            // the recursive call may have reused deeper arena rows; ours is intact
            let (head, _) = arena.split_at_mut(depth + 1);
            let cand = &mut head[depth];
            self.chosen.pop();

            // Exclude v and continue at this depth.
            word_remove(cand, v);
            sum -= self.deg[v];
        }
    }
}

/// Branch-and-bound engine, usable at any size (tests cross-check it against
/// enumeration on small graphs).
pub fn alpha_star_branch_bound(g: &Graph, node_budget: u64) -> Result<AlphaStarResult, AlphaStarError> {
    let n = g.n();

    // Relabel by degree descending so "highest-degree undecided vertex" is
    // simply the first remaining candidate. Ties break by original label to
    // keep the search deterministic.
    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let live: Vec<usize> = order.iter().copied().filter(|&v| g.degree(v) > 0).collect();
    let m = live.len();
    let mut pos = vec![usize::MAX; n + 1];
    for (i, &v) in live.iter().enumerate() {
        pos[v] = i;
    }

    let words = m.div_ceil(64).max(1);
    let mut nbhd = vec![0u64; m * words];
    let mut deg = vec![0u64; m];
    let mut total = 0u64;
    for (i, &v) in live.iter().enumerate() {
        deg[i] = g.degree(v) as u64;
        total += deg[i];
        nbhd[i * words + (i >> 6)] |= 1u64 << (i & 63);
        for &u in g.neighbors(v) {
            let j = pos[u];
            nbhd[i * words + (j >> 6)] |= 1u64 << (j & 63);
        }
    }

    let mut root = vec![0u64; words];
    for i in 0..m {
        root[i >> 6] |= 1u64 << (i & 63);
    }
    let mut arena: Vec<Vec<u64>> = vec![vec![0u64; words]; m + 2];
    arena[0] = root;

    let mut search = Bnb {
        nbhd: &nbhd,
        deg: &deg,
        words,
        budget: node_budget,
        nodes: 0,
        best: 0,
        best_set: Vec::new(),
        chosen: Vec::new(),
    };
    let outcome = search.run(&mut arena, 0, total, 0);
    let mut witness: Vec<usize> = search.best_set.iter().map(|&i| live[i]).collect();
    witness.sort_unstable();
    match outcome {
        Ok(()) => Ok(AlphaStarResult { value: search.best, witness, nodes_visited: search.nodes }),
        Err(()) => Err(AlphaStarError::BudgetExhausted {
            budget: node_budget,
            best_lower_bound: search.best,
        }),
    }
}
