//! Multigraph storage and the preferential-attachment graph `PA_t(m, δ)`.
//!
//! Vertex ids are 1-based throughout. Every edge is stored oriented from the
//! younger endpoint to the older one (`source >= target`); `source == target`
//! is a self-loop, which contributes 2 to its vertex's degree and appears once
//! in that vertex's adjacency list.

mod grow;
mod io;
mod sampler;

pub use grow::{collapse, grow_pa1, grow_pam_direct, grow_pam_direct_with, PaGrower};
pub use io::{read_graph, write_graph, HEADER_MAGIC};
pub use sampler::{AttachmentSampler, FenwickSampler, NaiveSampler, SamplerKind};

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::params::Params;

/// One edge, oriented from the younger to the older endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: u32,
    pub target: u32,
}

impl Edge {
    /// Orients `{a, b}` as (max, min).
    pub fn new(a: usize, b: usize) -> Self {
        let (s, t) = if a >= b { (a, b) } else { (b, a) };
        Self {
            source: s as u32,
            target: t as u32,
        }
    }

    #[inline]
    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// Undirected multigraph on `1..=n` with CSR adjacency, degrees and prefix
/// degree sums, all computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<Edge>,
    degree: Vec<u64>,
    prefix: Vec<u64>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Multigraph {
    /// Builds a multigraph from an arbitrary edge list; pairs are re-oriented
    /// so that `source >= target`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(Error::OutOfRange { index: v, len: n });
                }
            }
            edges.push(Edge::new(a, b));
        }
        Ok(Self::from_oriented(n, edges))
    }

    /// `edges` must already satisfy `1 <= target <= source <= n`.
    pub(crate) fn from_oriented(n: usize, edges: Vec<Edge>) -> Self {
        let mut degree = vec![0u64; n + 1];
        let mut slots = vec![0usize; n + 2];
        for e in &edges {
            debug_assert!(e.target >= 1 && e.source >= e.target && e.source as usize <= n);
            let (s, t) = (e.source as usize, e.target as usize);
            degree[s] += 1;
            degree[t] += 1;
            slots[s] += 1;
            if s != t {
                slots[t] += 1;
            }
        }
        let mut offsets = vec![0usize; n + 2];
        for v in 1..=n {
            offsets[v + 1] = offsets[v] + slots[v];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; offsets[n + 1]];
        for e in &edges {
            let (s, t) = (e.source as usize, e.target as usize);
            neighbors[fill[s]] = e.target;
            fill[s] += 1;
            if s != t {
                neighbors[fill[t]] = e.source;
                fill[t] += 1;
            }
        }
        for v in 1..=n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        let mut prefix = vec![0u64; n + 1];
        for v in 1..=n {
            prefix[v] = prefix[v - 1] + degree[v];
        }
        Self {
            n,
            edges,
            degree,
            prefix,
            offsets,
            neighbors,
        }
    }

    /// Number of vertices.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in insertion (creation) order.
    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn check_vertex(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            Err(Error::OutOfRange {
                index: i,
                len: self.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn degree(&self, i: usize) -> Result<u64> {
        self.check_vertex(i)?;
        Ok(self.degree[i])
    }

    /// `S_i = Σ_{j<=i} degree(j)`.
    pub fn prefix_degree_sum(&self, i: usize) -> Result<u64> {
        self.check_vertex(i)?;
        Ok(self.prefix[i])
    }

    /// Degrees indexed by vertex id; slot 0 is unused and zero.
    #[inline]
    pub fn degrees(&self) -> &[u64] {
        &self.degree
    }

    /// Adjacency multiset of `v`, sorted by neighbour id. Parallel edges
    /// repeat the neighbour; a self-loop lists `v` once.
    ///
    /// Panics if `v` is out of range.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Number of self-loops at `v`.
    pub fn self_loops(&self, v: usize) -> usize {
        self.neighbors(v).iter().filter(|&&w| w as usize == v).count()
    }

    pub fn total_degree(&self) -> u64 {
        self.prefix[self.n]
    }
}

/// A realisation of `PA_t(m, δ)`.
///
/// Immutable once built; safe to share read-only between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct PaGraph {
    params: Params,
    graph: Multigraph,
}

impl PaGraph {
    /// Assembles a graph from an edge list in creation order: edges
    /// `(k-1)m+1 ..= km` must all be thrown by vertex `k` to some vertex
    /// `<= k`.
    pub fn from_edges(params: Params, edges: Vec<Edge>) -> Result<Self> {
        let m = params.m();
        if edges.is_empty() || edges.len() % m != 0 {
            return Err(Error::InvalidParameter(format!(
                "edge count {} is not a positive multiple of m={m}",
                edges.len()
            )));
        }
        let t = edges.len() / m;
        for (idx, e) in edges.iter().enumerate() {
            let owner = idx / m + 1;
            if e.source as usize != owner {
                return Err(Error::InvalidParameter(format!(
                    "edge {} has source {} but vertex {owner} should throw it",
                    idx + 1,
                    e.source
                )));
            }
            if e.target == 0 || e.target > e.source {
                return Err(Error::InvalidParameter(format!(
                    "edge {} = ({}, {}) violates 1 <= target <= source",
                    idx + 1,
                    e.source,
                    e.target
                )));
            }
        }
        Ok(Self {
            params,
            graph: Multigraph::from_oriented(t, edges),
        })
    }

    pub(crate) fn from_trusted(params: Params, edges: Vec<Edge>) -> Self {
        let t = edges.len() / params.m();
        Self {
            params,
            graph: Multigraph::from_oriented(t, edges),
        }
    }

    #[inline]
    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Number of vertices.
    #[inline]
    pub fn t(&self) -> usize {
        self.graph.n()
    }

    #[inline]
    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    /// Text serialisation in the `pa-graph v1` format.
    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        write_graph(self, &mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

impl Deref for PaGraph {
    type Target = Multigraph;

    fn deref(&self) -> &Multigraph {
        &self.graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_counts_twice_and_lists_once() {
        let g = Multigraph::from_pairs(2, &[(1, 1), (2, 1), (2, 1)]).unwrap();
        assert_eq!(g.degree(1).unwrap(), 4);
        assert_eq!(g.degree(2).unwrap(), 2);
        assert_eq!(g.neighbors(1), &[1, 2, 2]);
        assert_eq!(g.neighbors(2), &[1, 1]);
        assert_eq!(g.self_loops(1), 1);
        assert_eq!(g.prefix_degree_sum(2).unwrap(), 6);
    }

    #[test]
    fn out_of_range_queries() {
        let g = Multigraph::from_pairs(3, &[(2, 1), (3, 2)]).unwrap();
        assert!(matches!(g.degree(0), Err(Error::OutOfRange { .. })));
        assert!(g.prefix_degree_sum(4).is_err());
        assert!(Multigraph::from_pairs(3, &[(4, 1)]).is_err());
    }

    #[test]
    fn pa_from_edges_validates_ownership() {
        let p = Params::new(2, 0.0).unwrap();
        let ok = vec![Edge::new(1, 1), Edge::new(1, 1), Edge::new(2, 1), Edge::new(2, 2)];
        let g = PaGraph::from_edges(p, ok).unwrap();
        assert_eq!(g.t(), 2);
        assert_eq!(g.total_degree(), 8);
        let bad = vec![Edge::new(1, 1), Edge::new(2, 1)];
        assert!(PaGraph::from_edges(p, bad).is_err());
        let odd = vec![Edge::new(1, 1)];
        assert!(PaGraph::from_edges(p, odd).is_err());
    }
}
