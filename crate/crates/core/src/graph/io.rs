//! Reading and writing graphs.
//!
//! Two formats are supported:
//!
//!  * plain edge lists: a header line `n m`, then `m` lines `u v`. Lines
//!    starting with `#` are comments; the directive `# base=0` (before the
//!    header) switches endpoint labels to 0-based. Default is 1-based.
//!  * JSON: `{"n": 4, "edges": [[1,2],[3,4]], "base": 1}` with `base`
//!    optional.
//!
//! Writers always emit the canonical form: 1-based labels, edges sorted with
//! `u < v`. Reading back a written graph reproduces it exactly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum GraphIoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("header announced {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("bad JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<u8>,
    edges: Vec<(usize, usize)>,
}

fn rebase(edges: Vec<(usize, usize)>, base: u8) -> Result<Vec<(usize, usize)>, GraphIoError> {
    match base {
        1 => Ok(edges),
        0 => Ok(edges.into_iter().map(|(u, v)| (u + 1, v + 1)).collect()),
        b => Err(GraphIoError::Parse { line: 0, msg: format!("unsupported base {b}") }),
    }
}

pub fn read_edge_list(text: &str) -> Result<Graph, GraphIoError> {
    let mut base: u8 = 1;
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(b) = rest.strip_prefix("base=") {
                if header.is_some() {
                    return Err(GraphIoError::Parse {
                        line: idx + 1,
                        msg: "base directive must precede the header".into(),
                    });
                }
                base = b.trim().parse().map_err(|_| GraphIoError::Parse {
                    line: idx + 1,
                    msg: format!("bad base directive {rest:?}"),
                })?;
            }
            continue;
        }
        let mut nums = line.split_whitespace().map(|tok| {
            tok.parse::<usize>().map_err(|_| GraphIoError::Parse {
                line: idx + 1,
                msg: format!("expected integer, got {tok:?}"),
            })
        });
        let a = nums.next().ok_or_else(|| GraphIoError::Parse {
            line: idx + 1,
            msg: "expected two integers".into(),
        })??;
        let b = nums.next().ok_or_else(|| GraphIoError::Parse {
            line: idx + 1,
            msg: "expected two integers".into(),
        })??;
        if nums.next().is_some() {
            return Err(GraphIoError::Parse { line: idx + 1, msg: "trailing tokens".into() });
        }
        if header.is_none() {
            header = Some((a, b));
        } else {
            edges.push((a, b));
        }
    }
    let (n, m) = header.ok_or(GraphIoError::Parse { line: 0, msg: "missing header".into() })?;
    if edges.len() != m {
        return Err(GraphIoError::EdgeCount { expected: m, found: edges.len() });
    }
    Ok(Graph::new(n, rebase(edges, base)?)?)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn read_json(text: &str) -> Result<Graph, GraphIoError> {
    let parsed: GraphJson = serde_json::from_str(text)?;
    Ok(Graph::new(parsed.n, rebase(parsed.edges, parsed.base.unwrap_or(1))?)?)
}

pub fn write_json(g: &Graph) -> String {
    let doc = GraphJson { n: g.n(), base: None, edges: g.edges().to_vec() };
    serde_json::to_string(&doc).expect("graph serialization cannot fail")
}

/// Accepts either supported format, sniffing JSON by the leading brace.
pub fn read_graph_auto(text: &str) -> Result<Graph, GraphIoError> {
    if text.trim_start().starts_with('{') {
        read_json(text)
    } else {
        read_edge_list(text)
    }
}
