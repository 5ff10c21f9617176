//! Tab-separated edge-list reading and writing.
//!
//! Written files carry three header lines and one tab-separated edge per
//! line:
//!
//! ```text
//! # edges=2
//! # vertices=3
//! # directed=false
//! 1<TAB>2
//! 2<TAB>3
//! ```
//!
//! The reader skips lines starting with `#` or `%` and accepts any two
//! whitespace-separated labels per line.

use std::fmt::Write as _;
use std::io::BufRead;

use super::{GraphError, Interner, Multigraph, VertexId};

/// A parsed graph together with the raw label of each canonical id;
/// `labels[i]` names vertex `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedGraph {
    pub graph: Multigraph,
    pub labels: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn parse_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<ParsedGraph, ReadError> {
    let mut interner = Interner::default();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => {
                let u = interner.intern(a)?;
                let v = interner.intern(b)?;
                edges.push((u, v));
            }
            _ => {
                return Err(GraphError::Parse {
                    line: index + 1,
                    found: trimmed.split_whitespace().count(),
                }
                .into())
            }
        }
    }
    if edges.is_empty() {
        return Err(GraphError::Empty.into());
    }
    let num_vertices = interner.labels_len();
    Ok(ParsedGraph {
        graph: Multigraph::from_parts(edges, directed, num_vertices),
        labels: interner.into_labels(),
    })
}

pub fn write_edge_list(graph: &Multigraph) -> String {
    let mut out = String::with_capacity(32 + graph.num_edges() * 12);
    let _ = writeln!(out, "# edges={}", graph.num_edges());
    let _ = writeln!(out, "# vertices={}", graph.num_vertices());
    let _ = writeln!(out, "# directed={}", graph.is_directed());
    for &(u, v) in graph.edges() {
        let _ = writeln!(out, "{u}\t{v}");
    }
    out
}

impl Interner {
    fn labels_len(&self) -> u32 {
        self.labels.len() as u32
    }
}
