//! Witness trees and witness structures: the certificates behind late
//! infections, and the weight functions used to bound their counts.
//!
//! In a percolation trace, `x` is a *parent* of `y` when they are adjacent,
//! `x` was infected in round `τ >= 1` and `y` by round `τ - 1`. A witness
//! structure rooted at `v` is a subgraph in which
//!
//! 1. every vertex except `v` has a parent,
//! 2. the leaves `L = S ∩ I_0` are non-empty,
//! 3. every parent has exactly `r` edges to children, and
//! 4. the depth of the structure equals the round in which `v` was infected.

mod tree;
mod weight;

pub use tree::{TreeNode, Valuation, WitnessTreeSpec};
pub use weight::{
    bound_check, contract, exponent_ledger, ledger_total, weight_f, write_weight_csv,
    BoundReport, NodeLedger,
};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::percolation::{PercolationResult, NEVER};

/// `min { d : dγ > 1 }`.
pub fn compute_d0(gamma: f64) -> Result<usize> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma={gamma} outside (0, 1)")));
    }
    let mut d = 1;
    while d as f64 * gamma <= 1.0 {
        d += 1;
    }
    Ok(d)
}

/// For every susceptible vertex, the number of depth-1 witness trees rooted
/// there: ways to pick one edge to each of `r` distinct infected neighbours.
/// Infected vertices get 0. Indexed by vertex id; slot 0 is unused.
pub fn count_depth1_witness_trees(graph: &Multigraph, infected: &[bool], r: usize) -> Vec<u128> {
    let n = graph.n();
    let mut counts = vec![0u128; n + 1];
    let mut esp = vec![0u128; r + 1];
    for v in 1..=n {
        if infected[v] {
            continue;
        }
        esp.fill(0);
        esp[0] = 1;
        let nb = graph.neighbors(v);
        let mut k = 0;
        while k < nb.len() {
            let w = nb[k];
            let mut run = 1;
            while k + run < nb.len() && nb[k + run] == w {
                run += 1;
            }
            k += run;
            if w as usize == v || !infected[w as usize] {
                continue;
            }
            for s in (1..=r).rev() {
                esp[s] += esp[s - 1] * run as u128;
            }
        }
        counts[v] = esp[r];
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStructure {
    pub root: usize,
    /// Round in which the root was infected.
    pub tau: u32,
    /// Sorted vertex set.
    pub vertices: Vec<usize>,
    /// `(parent, child)` pairs; parallel edges repeat.
    pub edges: Vec<(usize, usize)>,
    pub depth: BTreeMap<usize, u32>,
    /// `S ∩ I_0`, sorted.
    pub leaves: Vec<usize>,
}

impl WitnessStructure {
    pub fn max_depth(&self) -> u32 {
        self.depth.values().copied().max().unwrap_or(0)
    }

    /// Checks conditions (1)–(4) against the graph and the percolation trace,
    /// recomputing depths by fixed-point relaxation.
    pub fn validate(&self, graph: &Multigraph, result: &PercolationResult) -> Result<()> {
        let fail = |msg: String| Err(Error::Witness(msg));
        let round = |v: usize| result.state.round_infected(v);
        let in_s = |v: usize| self.vertices.binary_search(&v).is_ok();
        if !in_s(self.root) || round(self.root) != self.tau || self.tau == 0 {
            return fail(format!("root {} is not a round-{} vertex of S", self.root, self.tau));
        }
        let mut multiplicity: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut child_edges: BTreeMap<usize, usize> = BTreeMap::new();
        let mut has_parent = vec![false; self.vertices.len()];
        for &(x, y) in &self.edges {
            if !in_s(x) || !in_s(y) {
                return fail(format!("edge ({x}, {y}) leaves the vertex set"));
            }
            let (rx, ry) = (round(x), round(y));
            if rx == NEVER || rx == 0 || ry == NEVER || ry >= rx {
                return fail(format!("({x}, {y}) is not a parent-child pair (rounds {rx}, {ry})"));
            }
            *multiplicity.entry((x, y)).or_default() += 1;
            *child_edges.entry(x).or_default() += 1;
            has_parent[self.vertices.binary_search(&y).unwrap()] = true;
        }
        for (&(x, y), &c) in &multiplicity {
            let available = graph.neighbors(x).iter().filter(|&&w| w as usize == y).count();
            if c > available {
                return fail(format!("{c} copies of ({x}, {y}) but the graph has {available}"));
            }
        }
        for (k, &v) in self.vertices.iter().enumerate() {
            if v != self.root && !has_parent[k] {
                return fail(format!("condition (1): vertex {v} has no parent"));
            }
        }
        let leaves: Vec<usize> = self.vertices.iter().copied().filter(|&v| round(v) == 0).collect();
        if leaves.is_empty() {
            return fail("condition (2): no initially infected vertex".into());
        }
        if leaves != self.leaves {
            return fail("leaf set differs from S ∩ I_0".into());
        }
        for (&x, &c) in &child_edges {
            if c != result.r {
                return fail(format!("condition (3): parent {x} has {c} child edges, not {}", result.r));
            }
        }
        let mut depth: BTreeMap<usize, u32> = self.vertices.iter().map(|&v| (v, 0)).collect();
        loop {
            let mut changed = false;
            for &(x, y) in &self.edges {
                let cand = depth[&x] + 1;
                if cand > depth[&y] {
                    depth.insert(y, cand);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if depth != self.depth {
            return fail("recorded depths disagree with the parent relation".into());
        }
        let max = depth.values().copied().max().unwrap_or(0);
        if max != self.tau {
            return fail(format!("condition (4): depth {max} but root infected in round {}", self.tau));
        }
        Ok(())
    }
}

/// Reconstructs a witness structure for `v` from a percolation trace.
///
/// Every infected vertex `x` in the structure keeps `r` edges to vertices
/// infected strictly before it: one to the smallest-id neighbour infected in
/// round `τ(x) - 1` (which exists, since `x` was not infected a round
/// earlier), then the smallest remaining ids. The chain through round
/// `τ - 1, τ - 2, ...` gives the structure depth `τ(v)`.
pub fn find_witness_structure(
    graph: &Multigraph,
    result: &PercolationResult,
    v: usize,
) -> Result<WitnessStructure> {
    graph.check_vertex(v)?;
    let state = &result.state;
    let tau = state.round_infected(v);
    if tau == NEVER {
        return Err(Error::Witness(format!("vertex {v} was never infected")));
    }
    if tau == 0 {
        return Err(Error::Witness(format!("vertex {v} is initially infected")));
    }
    let r = result.r;
    let mut chosen: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        if chosen.contains_key(&x) {
            continue;
        }
        let k = state.round_infected(x);
        let earlier: Vec<usize> = graph
            .neighbors(x)
            .iter()
            .map(|&w| w as usize)
            .filter(|&w| w != x && state.round_infected(w) < k)
            .collect();
        let chain = earlier
            .iter()
            .position(|&w| state.round_infected(w) == k - 1)
            .ok_or_else(|| Error::Witness(format!("vertex {x} has no neighbour from round {}", k - 1)))?;
        let mut kids = vec![earlier[chain]];
        kids.extend(
            earlier
                .iter()
                .enumerate()
                .filter(|&(idx, _)| idx != chain)
                .map(|(_, &w)| w)
                .take(r - 1),
        );
        if kids.len() < r {
            return Err(Error::Witness(format!(
                "vertex {x} has only {} earlier-infected edges, threshold {r}",
                kids.len()
            )));
        }
        kids.sort_unstable();
        for &w in &kids {
            if state.round_infected(w) > 0 && !chosen.contains_key(&w) {
                stack.push(w);
            }
        }
        chosen.insert(x, kids);
    }

    let mut vertices: Vec<usize> = chosen.keys().copied().collect();
    vertices.extend(chosen.values().flatten().copied());
    vertices.sort_unstable();
    vertices.dedup();
    let edges: Vec<(usize, usize)> = chosen
        .iter()
        .flat_map(|(&x, kids)| kids.iter().map(move |&y| (x, y)))
        .collect();

    let mut parents: Vec<usize> = chosen.keys().copied().collect();
    parents.sort_by_key(|&x| std::cmp::Reverse(state.round_infected(x)));
    let mut depth: BTreeMap<usize, u32> = vertices.iter().map(|&u| (u, 0)).collect();
    for x in parents {
        let dx = depth[&x];
        for &y in &chosen[&x] {
            let slot = depth.get_mut(&y).expect("child is in S");
            *slot = (*slot).max(dx + 1);
        }
    }
    let leaves = vertices
        .iter()
        .copied()
        .filter(|&u| state.round_infected(u) == 0)
        .collect();
    Ok(WitnessStructure {
        root: v,
        tau,
        vertices,
        edges,
        depth,
        leaves,
    })
}
