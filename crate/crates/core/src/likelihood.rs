//! Exact probability of a generated network.
//!
//! For a graph with `n` edges, `V` vertices and degrees `deg(v)`,
//!
//! ```text
//! pr(G) = alpha^V (theta/alpha)^{↑V} / theta^{↑2n} * prod_{deg(v) >= 2} (1 - alpha)^{↑(deg(v) - 1)}
//! ```
//!
//! The leading factor `theta` of numerator and denominator is cancelled
//! before taking logs, which leaves
//!
//! ```text
//! sum_{i=1}^{V-1} ln(theta + i alpha) - ln (theta + 1)^{↑(2n-1)} + sum_{deg(v) >= 2} ln (1 - alpha)^{↑(deg(v) - 1)}
//! ```
//!
//! Every factor is positive for `theta > -alpha`, including `theta <= 0`.
//! The value depends only on `n`, `V` and the degree multiset.

use std::collections::HashSet;

use thiserror::Error;

use crate::generator::{EndpointState, Params};
use crate::graph::{DegreeHistogram, Multigraph, VertexId};
use crate::numerics::log_rising;

/// Largest edge count accepted by [`enumerate_graphs`].
pub const MAX_ENUMERATED_EDGES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LikelihoodError {
    #[error("enumeration supports 1..={MAX_ENUMERATED_EDGES} edges, got {0}")]
    EnumerationRange(usize),
}

/// The statistics the closed form depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSummary {
    pub n_edges: u64,
    pub n_vertices: u64,
    /// `(degree, vertex count)` for degrees of at least 2.
    pub repeated_degrees: Vec<(u64, u64)>,
}

impl GraphSummary {
    pub fn of(graph: &Multigraph) -> Self {
        Self::from_histogram(&graph.degree_histogram())
    }

    pub fn from_histogram(hist: &DegreeHistogram) -> Self {
        Self {
            n_edges: hist.total_edges(),
            n_vertices: hist.total_vertices(),
            repeated_degrees: hist.tail(2).collect(),
        }
    }

    /// Log-probability under `params`.
    pub fn log_prob(&self, params: Params) -> f64 {
        let (alpha, theta) = (params.alpha(), params.theta());
        let numerator: f64 = (1..self.n_vertices)
            .map(|i| (theta + i as f64 * alpha).ln())
            .sum();
        let denominator = rising(theta + 1.0, 2 * self.n_edges - 1);
        let degrees: f64 = self
            .repeated_degrees
            .iter()
            .map(|&(k, count)| count as f64 * rising(1.0 - alpha, k - 1))
            .sum();
        numerator - denominator + degrees
    }
}

fn rising(x: f64, j: u64) -> f64 {
    log_rising(x, j).expect("argument is positive for valid parameters")
}

/// Closed-form log-probability of `graph`.
pub fn log_prob_closed(graph: &Multigraph, params: Params) -> f64 {
    GraphSummary::of(graph).log_prob(params)
}

/// Log-probability accumulated endpoint by endpoint, replaying the edges in
/// list order. Labels are canonicalized first.
pub fn log_prob_sequential(graph: &Multigraph, params: Params) -> f64 {
    let canonical;
    let graph = if graph.is_canonical() {
        graph
    } else {
        canonical = graph.canonicalize();
        &canonical
    };
    let mut state = EndpointState::new(params);
    let mut total = 0.0;
    for v in graph.endpoints() {
        total += state
            .endpoint_logprob(v)
            .expect("canonical labels are always legal choices");
        state.observe(v).expect("checked above");
    }
    total
}

/// Every canonical `n`-edge graph the sampler can produce, with its
/// closed-form log-probability.
///
/// Graphs are ordered edge lists, so `[(1,2),(2,1)]` and `[(1,2),(1,2)]`
/// are different outcomes; there are Bell(2n) of them.
pub fn enumerate_graphs(n: usize, params: Params) -> Result<Vec<(Multigraph, f64)>, LikelihoodError> {
    if n == 0 || n > MAX_ENUMERATED_EDGES {
        return Err(LikelihoodError::EnumerationRange(n));
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut prefix = Vec::with_capacity(2 * n);
    extend(&mut prefix, 0, 2 * n, &mut |endpoints: &[VertexId]| {
        let edges = endpoints.chunks_exact(2).map(|e| (e[0], e[1])).collect();
        let graph = Multigraph::new(edges, false).expect("growth strings are gap-free");
        if seen.insert(graph.clone()) {
            let lp = log_prob_closed(&graph, params);
            out.push((graph, lp));
        }
    });
    Ok(out)
}

/// Walks all restricted growth strings of length `len`: each entry is at
/// most one more than the running maximum.
fn extend<F: FnMut(&[VertexId])>(prefix: &mut Vec<VertexId>, max: VertexId, len: usize, visit: &mut F) {
    if prefix.len() == len {
        visit(prefix);
        return;
    }
    for v in 1..=max + 1 {
        prefix.push(v);
        extend(prefix, max.max(v), len, visit);
        prefix.pop();
    }
}
