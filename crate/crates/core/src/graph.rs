//! Multigraph data model, degree accounting and projection to simple graphs.
//!
//! Vertices are 1-based consecutive integers. A self-loop `(v, v)` adds 2 to
//! the degree of `v`. Undirected edges keep the order in which their
//! endpoints arrived; only projection treats `(u, v)` and `(v, u)` as equal.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

mod io;

pub use io::{parse_edge_list, write_edge_list, ParsedGraph, ReadError};

/// 1-based vertex label.
pub type VertexId = u32;

/// An edge as `(first endpoint, second endpoint)` in arrival order.
pub type Edge = (VertexId, VertexId);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no edges")]
    Empty,
    #[error("vertex id 0 is not allowed; ids start at 1")]
    ZeroVertex,
    #[error("vertex {0} has no incident edge")]
    IsolatedVertex(VertexId),
    #[error("line {line}: expected 2 vertex labels, found {found}")]
    Parse { line: usize, found: usize },
    #[error("more than {} distinct vertices", VertexId::MAX)]
    TooManyVertices,
}

/// Ordered edge list over vertices `1..=num_vertices`, every one of which has
/// at least one incident edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multigraph {
    edges: Vec<Edge>,
    directed: bool,
    num_vertices: u32,
}

impl Multigraph {
    /// Builds a graph from edges whose ids must cover `1..=max id` without
    /// gaps.
    pub fn new(edges: Vec<Edge>, directed: bool) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut max_id = 0;
        for &(u, v) in &edges {
            if u == 0 || v == 0 {
                return Err(GraphError::ZeroVertex);
            }
            max_id = max_id.max(u).max(v);
        }
        let mut seen = vec![false; max_id as usize];
        for &(u, v) in &edges {
            seen[u as usize - 1] = true;
            seen[v as usize - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(GraphError::IsolatedVertex(missing as VertexId + 1));
        }
        Ok(Self {
            edges,
            directed,
            num_vertices: max_id,
        })
    }

    /// Caller guarantees the invariants (used by the generator, whose labels
    /// are canonical by construction).
    pub(crate) fn from_parts(edges: Vec<Edge>, directed: bool, num_vertices: u32) -> Self {
        debug_assert!(!edges.is_empty());
        Self {
            edges,
            directed,
            num_vertices,
        }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices as usize
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Endpoints in arrival order: `u1, v1, u2, v2, ...`.
    pub fn endpoints(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.edges.iter().flat_map(|&(u, v)| [u, v])
    }

    /// True when ids are ordered by first appearance along the endpoint
    /// sequence.
    pub fn is_canonical(&self) -> bool {
        let mut next = 1;
        for v in self.endpoints() {
            if v == next {
                next += 1;
            } else if v > next {
                return false;
            }
        }
        true
    }

    /// Relabels vertices by first appearance. A no-op on canonical graphs.
    pub fn canonicalize(&self) -> Multigraph {
        let mut relabel = vec![0 as VertexId; self.num_vertices as usize];
        let mut next = 0;
        let mut map = |v: VertexId| {
            let slot = &mut relabel[v as usize - 1];
            if *slot == 0 {
                next += 1;
                *slot = next;
            }
            *slot
        };
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let u = map(u);
                let v = map(v);
                (u, v)
            })
            .collect();
        Multigraph::from_parts(edges, self.directed, self.num_vertices)
    }

    /// Degree of every vertex; entry `i` belongs to vertex `i + 1`.
    pub fn degree_sequence(&self) -> Vec<u64> {
        let mut degrees = vec![0u64; self.num_vertices as usize];
        for v in self.endpoints() {
            degrees[v as usize - 1] += 1;
        }
        degrees
    }

    pub fn degree_histogram(&self) -> DegreeHistogram {
        let mut hist = DegreeHistogram::from_degrees(self.degree_sequence());
        hist.total_edges = self.edges.len() as u64;
        hist
    }

    /// Collapses parallel edges (and repeated self-loops) to one copy, kept
    /// at its first occurrence.
    pub fn project_simple(&self) -> Multigraph {
        let mut seen = HashSet::with_capacity(self.edges.len());
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| {
                let key = if self.directed || u <= v { (u, v) } else { (v, u) };
                seen.insert(key)
            })
            .collect();
        Multigraph::from_parts(edges, self.directed, self.num_vertices)
    }

    /// True when no edge repeats (under the graph's orientation convention).
    pub fn is_simple(&self) -> bool {
        self.project_simple().num_edges() == self.num_edges()
    }
}

/// Vertex counts by degree, `N_n(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHistogram {
    counts: BTreeMap<u64, u64>,
    total_vertices: u64,
    total_edges: u64,
}

impl DegreeHistogram {
    /// Histogram of an arbitrary degree sample. Zero degrees are dropped and
    /// `total_edges` is half the degree sum, rounded down.
    pub fn from_degrees<I: IntoIterator<Item = u64>>(degrees: I) -> Self {
        let mut counts = BTreeMap::new();
        let mut total_vertices = 0;
        let mut total_degree = 0;
        for k in degrees.into_iter().filter(|&k| k > 0) {
            *counts.entry(k).or_insert(0) += 1;
            total_vertices += 1;
            total_degree += k;
        }
        Self {
            counts,
            total_vertices,
            total_edges: total_degree / 2,
        }
    }

    /// Histogram from `(degree, count)` pairs; zero degrees and zero counts
    /// are dropped.
    pub fn from_counts<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Self {
        let mut counts = BTreeMap::new();
        for (k, c) in pairs {
            if k > 0 && c > 0 {
                *counts.entry(k).or_insert(0) += c;
            }
        }
        let total_vertices = counts.values().sum();
        let total_degree: u64 = counts.iter().map(|(k, c)| k * c).sum();
        Self {
            counts,
            total_vertices,
            total_edges: total_degree / 2,
        }
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn count(&self, k: u64) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn total_vertices(&self) -> u64 {
        self.total_vertices
    }

    pub fn total_edges(&self) -> u64 {
        self.total_edges
    }

    pub fn max_degree(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    /// `p_n(k) = N_n(k) / N_n`.
    pub fn proportion(&self, k: u64) -> f64 {
        if self.total_vertices == 0 {
            return 0.0;
        }
        self.count(k) as f64 / self.total_vertices as f64
    }

    /// `(k, Pr(degree >= k))` at every observed degree, ascending.
    pub fn ccdf(&self) -> Vec<(u64, f64)> {
        let total = self.total_vertices as f64;
        let mut at_least = self.total_vertices;
        let mut out = Vec::with_capacity(self.counts.len());
        for (&k, &c) in &self.counts {
            out.push((k, at_least as f64 / total));
            at_least -= c;
        }
        out
    }

    /// Degrees `>= kmin` with their counts.
    pub fn tail(&self, kmin: u64) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.range(kmin..).map(|(&k, &c)| (k, c))
    }
}

/// Label interning used by the parser: maps raw labels to canonical ids.
#[derive(Debug, Default)]
pub(crate) struct Interner {
    ids: HashMap<String, VertexId>,
    labels: Vec<String>,
}

impl Interner {
    pub(crate) fn intern(&mut self, label: &str) -> Result<VertexId, GraphError> {
        if let Some(&id) = self.ids.get(label) {
            return Ok(id);
        }
        let id = VertexId::try_from(self.labels.len() + 1).map_err(|_| GraphError::TooManyVertices)?;
        self.ids.insert(label.to_owned(), id);
        self.labels.push(label.to_owned());
        Ok(id)
    }

    pub(crate) fn into_labels(self) -> Vec<String> {
        self.labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(edges: &[Edge], directed: bool) -> Multigraph {
        Multigraph::new(edges.to_vec(), directed).unwrap()
    }

    #[test]
    fn self_loop_counts_twice() {
        assert_eq!(g(&[(1, 1)], false).degree_sequence(), vec![2]);
        assert_eq!(g(&[(1, 2), (2, 3)], false).degree_sequence(), vec![1, 2, 1]);
        assert_eq!(g(&[(1, 2), (1, 2)], false).degree_sequence(), vec![2, 2]);
    }

    #[test]
    fn histogram_examples() {
        let h = g(&[(1, 1)], false).degree_histogram();
        assert_eq!(h.counts().iter().collect::<Vec<_>>(), vec![(&2, &1)]);
        assert_eq!(h.total_vertices(), 1);
        assert_eq!(h.total_edges(), 1);

        let h = g(&[(1, 2), (2, 3)], false).degree_histogram();
        assert_eq!(h.count(1), 2);
        assert_eq!(h.count(2), 1);
        assert_eq!(h.ccdf(), vec![(1, 1.0), (2, 1.0 / 3.0)]);
        assert!((h.proportion(1) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Multigraph::new(vec![], false), Err(GraphError::Empty));
        assert_eq!(Multigraph::new(vec![(0, 1)], false), Err(GraphError::ZeroVertex));
        assert_eq!(
            Multigraph::new(vec![(1, 3)], false),
            Err(GraphError::IsolatedVertex(2))
        );
    }

    #[test]
    fn projection_examples() {
        let p = g(&[(1, 2), (1, 2), (2, 2)], false).project_simple();
        assert_eq!(p.edges(), &[(1, 2), (2, 2)]);
        assert_eq!(p.num_vertices(), 2);

        let p = g(&[(1, 2), (2, 1)], true).project_simple();
        assert_eq!(p.edges(), &[(1, 2), (2, 1)]);
        let p = g(&[(1, 2), (2, 1)], false).project_simple();
        assert_eq!(p.edges(), &[(1, 2)]);

        let simple = g(&[(1, 2), (2, 3), (3, 3)], false);
        assert_eq!(simple.project_simple(), simple);
        assert!(simple.is_simple());
    }

    #[test]
    fn self_loops_collapse() {
        let p = g(&[(1, 1), (1, 1), (1, 2)], false).project_simple();
        assert_eq!(p.edges(), &[(1, 1), (1, 2)]);
    }

    #[test]
    fn canonical_form() {
        let a = g(&[(3, 1), (2, 3)], false);
        assert!(!a.is_canonical());
        let c = a.canonicalize();
        assert_eq!(c.edges(), &[(1, 2), (3, 1)]);
        assert!(c.is_canonical());
        assert_eq!(c.canonicalize(), c);
    }

    fn arb_graph() -> impl Strategy<Value = Multigraph> {
        (1u32..12, any::<bool>())
            .prop_flat_map(|(v, directed)| {
                (
                    prop::collection::vec((1..=v, 1..=v), 1..40),
                    Just(directed),
                )
            })
            .prop_map(|(edges, directed)| {
                // Relabel so ids are gap-free.
                let mut interner = Interner::default();
                let edges = edges
                    .into_iter()
                    .map(|(u, v)| {
                        (
                            interner.intern(&u.to_string()).unwrap(),
                            interner.intern(&v.to_string()).unwrap(),
                        )
                    })
                    .collect();
                Multigraph::new(edges, directed).unwrap()
            })
    }

    proptest! {
        #[test]
        fn handshake(graph in arb_graph()) {
            let total: u64 = graph.degree_sequence().iter().sum();
            prop_assert_eq!(total, 2 * graph.num_edges() as u64);
            let h = graph.degree_histogram();
            prop_assert_eq!(h.counts().values().sum::<u64>(), h.total_vertices());
            prop_assert_eq!(h.counts().iter().map(|(k, c)| k * c).sum::<u64>(), 2 * h.total_edges());
        }

        #[test]
        fn projection_idempotent(graph in arb_graph()) {
            let once = graph.project_simple();
            prop_assert_eq!(once.project_simple(), once.clone());
            prop_assert_eq!(once.num_vertices(), graph.num_vertices());
            prop_assert!(once.is_canonical() == graph.is_canonical());
        }

        #[test]
        fn canonicalize_fixes_canonical(graph in arb_graph()) {
            let c = graph.canonicalize();
            prop_assert!(c.is_canonical());
            prop_assert_eq!(c.canonicalize(), c.clone());
            let mut a = graph.degree_sequence();
            let mut b = c.degree_sequence();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
        }
    }
}
