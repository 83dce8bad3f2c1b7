//! Simple undirected graphs with 1-based vertex labels, plus the marked-input
//! instance type for the graph collision decision problem.
//!
//! A graph collision instance is a known graph together with a 0/1 marking of
//! its vertices; the question is whether some edge has both endpoints marked.
//! Equivalently: is the marked set *not* independent? The quantity
//! `alpha_star` (maximum degree sum over independent sets, see [`alpha`])
//! controls the cost of everything downstream.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod alpha;
pub mod gnp;
pub mod io;

pub use alpha::{alpha_star, alpha_star_witness, AlphaStarError, DEFAULT_NODE_BUDGET};
pub use gnp::sample_gnp;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("duplicate vertex {0} in set")]
    DuplicateVertex(usize),
    #[error("marking vector has length {got}, expected {expected}")]
    MarkingLength { got: usize, expected: usize },
    #[error("edge probability {0} outside [0, 1]")]
    InvalidProbability(f64),
}

/// Undirected simple graph. Vertices are labeled `1..=n`; edges are stored
/// canonically as `(u, v)` with `u < v`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Rejects out-of-range endpoints,
    /// self-loops, and duplicate edges (in either orientation).
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut canon: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n + 1];
        for &(u, v) in &canon {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, edges: canon, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonically sorted edge list, each edge as `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Sum of degrees over a vertex set (vertices must be in range and
    /// pairwise distinct).
    pub fn degree_sum(&self, s: &[usize]) -> Result<u64, GraphError> {
        let mut seen = vec![false; self.n + 1];
        let mut total = 0u64;
        for &v in s {
            if v == 0 || v > self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
            if seen[v] {
                return Err(GraphError::DuplicateVertex(v));
            }
            seen[v] = true;
            total += self.degree(v) as u64;
        }
        Ok(total)
    }

    /// True when no edge of the graph has both endpoints in `s`.
    pub fn is_independent(&self, s: &[usize]) -> Result<bool, GraphError> {
        let mut member = vec![false; self.n + 1];
        for &v in s {
            if v == 0 || v > self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
            if member[v] {
                return Err(GraphError::DuplicateVertex(v));
            }
            member[v] = true;
        }
        for &v in s {
            // Scanning the sparser side would not change worst-case cost here.
            if self.adj[v].iter().any(|&u| member[u]) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|u| ((u + 1)..=n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is always valid")
    }

    pub fn edgeless(n: usize) -> Self {
        Graph::new(n, []).expect("edgeless graph is always valid")
    }

    /// Path 1 - 2 - ... - n.
    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|u| (u, u + 1))).expect("path graph is always valid")
    }

    /// Star with center 1 and leaves 2..=n.
    pub fn star(n: usize) -> Self {
        Graph::new(n, (2..=n).map(|v| (1, v))).expect("star graph is always valid")
    }
}

/// A graph together with a 0/1 marking of its vertices. `marks[j - 1]` is the
/// bit of vertex `j`.
#[derive(Debug, Clone)]
pub struct GraphCollisionInstance<'g> {
    graph: &'g Graph,
    marks: Vec<bool>,
}

impl<'g> GraphCollisionInstance<'g> {
    pub fn new(graph: &'g Graph, marks: Vec<bool>) -> Result<Self, GraphError> {
        if marks.len() != graph.n() {
            return Err(GraphError::MarkingLength { got: marks.len(), expected: graph.n() });
        }
        Ok(GraphCollisionInstance { graph, marks })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn marks(&self) -> &[bool] {
        &self.marks
    }

    pub fn is_marked(&self, v: usize) -> bool {
        self.marks[v - 1]
    }

    /// The marked set as a sorted vertex list.
    pub fn marked_set(&self) -> Vec<usize> {
        (1..=self.graph.n()).filter(|&v| self.is_marked(v)).collect()
    }

    /// Does some edge have both endpoints marked?
    pub fn has_collision(&self) -> bool {
        self.graph.edges().iter().any(|&(u, v)| self.is_marked(u) && self.is_marked(v))
    }

    /// Sum of degrees of marked vertices. This equals the number of ordered
    /// pairs `(i, j)` with `ij` an edge and `i` marked, the quantity the
    /// pipeline's counting step estimates.
    pub fn marked_degree_sum(&self) -> u64 {
        (1..=self.graph.n())
            .filter(|&v| self.is_marked(v))
            .map(|v| self.graph.degree(v) as u64)
            .sum()
    }
}

/// The promise variant: inputs are restricted to markings whose independent
/// marked set has degree sum at most `k`. The promise never changes the
/// answer, only the witness-size budget of the membership test.
#[derive(Debug, Clone)]
pub struct GraphCollisionPromise<'g> {
    pub graph: &'g Graph,
    pub k: u64,
}

impl<'g> GraphCollisionPromise<'g> {
    /// A marking is inside the promise when it either has a collision or its
    /// (independent) marked set has degree sum at most `k`.
    pub fn contains(&self, inst: &GraphCollisionInstance<'_>) -> bool {
        inst.has_collision() || inst.marked_degree_sum() <= self.k
    }
}

/// Parses a 0/1 string into a marking, `bits[0]` belonging to vertex 1.
pub fn marks_from_str(bits: &str) -> Result<Vec<bool>, GraphError> {
    bits.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(GraphError::MarkingLength { got: 0, expected: 0 }),
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| GraphError::MarkingLength { got: bits.len(), expected: bits.len() })
}
