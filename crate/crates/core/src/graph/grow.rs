use rand::Rng;

use super::sampler::{AttachmentSampler, FenwickSampler, NaiveSampler, SamplerKind};
use super::{Edge, PaGraph};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::rng::{RngStream, StreamRng};

/// Incremental builder for `PA_t(m, δ)` using the sub-step rule: at time
/// `t`, sub-step `j` attaches the new edge to an older vertex `i` with weight
/// `D_i(t, j-1) + δ`, or to `t` itself with weight `D_t(t, j-1) + 1 + jδ/m`,
/// over the normaliser `(2m+δ)(t-1) + 2j - 1 + jδ/m`.
///
/// Exposes the current degrees between steps, which is what the urn coupling
/// needs (`D_i(i)` is read right after vertex `i` is added).
pub struct PaGrower<S = FenwickSampler> {
    params: Params,
    sampler: S,
    degree: Vec<u64>,
    edges: Vec<Edge>,
    rng: StreamRng,
}

impl<S: AttachmentSampler> PaGrower<S> {
    pub fn new(params: Params, capacity: usize, stream: RngStream) -> Self {
        let mut degree = Vec::with_capacity(capacity + 1);
        degree.push(0);
        Self {
            params,
            sampler: S::with_capacity(capacity, params.delta()),
            degree,
            edges: Vec::with_capacity(capacity * params.m()),
            rng: stream.rng(),
        }
    }

    /// Current number of vertices.
    #[inline]
    pub fn t(&self) -> usize {
        self.degree.len() - 1
    }

    /// Current degree of vertex `i` (1-based). Panics if `i` does not exist.
    #[inline]
    pub fn degree(&self, i: usize) -> u64 {
        assert!(i >= 1, "vertex ids start at 1");
        self.degree[i]
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degree
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Adds the next vertex and its `m` edges.
    pub fn step(&mut self) {
        let m = self.params.m();
        let delta = self.params.delta();
        let t = self.t() + 1;
        self.degree.push(0);
        for j in 1..=m {
            let old_weight = self.sampler.total_weight();
            let self_weight = self.degree[t] as f64 + 1.0 + j as f64 * delta / m as f64;
            debug_assert!({
                let norm = (2.0 * m as f64 + delta) * (t - 1) as f64 + (2 * j - 1) as f64
                    + j as f64 * delta / m as f64;
                (old_weight + self_weight - norm).abs() <= 1e-9 * norm.max(1.0)
            });
            let u = self.rng.random::<f64>() * (old_weight + self_weight);
            if u < old_weight {
                let target = self.sampler.find(u);
                self.sampler.add_degree(target, 1);
                self.degree[target] += 1;
                self.degree[t] += 1;
                self.edges.push(Edge {
                    source: t as u32,
                    target: target as u32,
                });
            } else {
                self.degree[t] += 2;
                self.edges.push(Edge {
                    source: t as u32,
                    target: t as u32,
                });
            }
        }
        self.sampler.push_vertex(self.degree[t]);
    }

    /// Steps until the graph has `t` vertices.
    pub fn grow_to(&mut self, t: usize) {
        while self.t() < t {
            self.step();
        }
    }

    pub fn finish(self) -> PaGraph {
        PaGraph::from_trusted(self.params, self.edges)
    }
}

fn check_t(t: usize) -> Result<()> {
    if t == 0 {
        Err(Error::InvalidParameter("t must be at least 1".into()))
    } else if t > u32::MAX as usize {
        Err(Error::InvalidParameter(format!("t={t} exceeds the u32 vertex id range")))
    } else {
        Ok(())
    }
}

/// `PA_t(m, δ)` by the direct sub-step construction, Fenwick-backed.
pub fn grow_pam_direct(t: usize, params: Params, stream: RngStream) -> Result<PaGraph> {
    grow_pam_direct_with(SamplerKind::Fenwick, t, params, stream)
}

/// As [`grow_pam_direct`] with an explicit sampler. Both samplers consume
/// the stream identically and return identical graphs.
pub fn grow_pam_direct_with(
    kind: SamplerKind,
    t: usize,
    params: Params,
    stream: RngStream,
) -> Result<PaGraph> {
    check_t(t)?;
    Ok(match kind {
        SamplerKind::Naive => {
            let mut g = PaGrower::<NaiveSampler>::new(params, t, stream);
            g.grow_to(t);
            g.finish()
        }
        SamplerKind::Fenwick => {
            let mut g = PaGrower::<FenwickSampler>::new(params, t, stream);
            g.grow_to(t);
            g.finish()
        }
    })
}

/// `PA_t(1, δ)`: vertex `t+1` self-loops with probability
/// `(1+δ)/(t(2+δ)+(1+δ))` and otherwise joins `i` with probability
/// `(D_i(t)+δ)/(t(2+δ)+(1+δ))`. This is the `m = 1` case of the sub-step
/// rule, so the same grower is used.
pub fn grow_pa1(t: usize, delta: f64, stream: RngStream) -> Result<PaGraph> {
    let params = Params::new(1, delta)?;
    grow_pam_direct(t, params, stream)
}

/// Contracts consecutive blocks of `m_target` vertices of a `PA_{mt}(1, δ/m)`
/// graph into super-vertices, keeping every loop and multi-edge. The result
/// is a `PA_t(m, δ)` graph.
pub fn collapse(pa1: &PaGraph, m_target: usize) -> Result<PaGraph> {
    if pa1.params().m() != 1 {
        return Err(Error::InvalidParameter(format!(
            "collapse expects an m=1 graph, got m={}",
            pa1.params().m()
        )));
    }
    if m_target == 0 || pa1.t() % m_target != 0 {
        return Err(Error::InvalidParameter(format!(
            "t={} is not divisible by m={m_target}",
            pa1.t()
        )));
    }
    let params = Params::new(m_target, pa1.params().delta() * m_target as f64)?;
    let block = |v: u32| (v - 1) / m_target as u32 + 1;
    let edges = pa1
        .edges()
        .iter()
        .map(|e| Edge {
            source: block(e.source),
            target: block(e.target),
        })
        .collect();
    Ok(PaGraph::from_trusted(params, edges))
}
