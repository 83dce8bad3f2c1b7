//! Erdos-Renyi sampling.

use rand::Rng;

use super::{Graph, GraphError};
use crate::rng::seeded_rng;

/// Samples G(n, p): every unordered pair becomes an edge independently with
/// probability `p`. The pair order (1,2), (1,3), ..., (n-1,n) and the
/// generator are fixed, so a seed fully determines the graph.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    let mut rng = seeded_rng(seed);
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in (u + 1)..=n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}
