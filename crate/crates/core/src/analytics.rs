//! Statistics over generated graphs: degree laws, prefix-sum scaling and
//! the structural rarities (loops, parallel edges, short cycles) that the
//! percolation analysis relies on.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Multigraph, PaGrower};
use crate::params::Params;
use crate::percolation::{run_rounds, seed_infection};
use crate::rng::{derive_seed, RngStream};
use crate::thresholds;

/// Stream for trial `k` of a repeated experiment seeded by `base`.
pub fn trial_stream(base: RngStream, k: u64) -> RngStream {
    RngStream::new(derive_seed(&[base.seed, base.stream, k]), 0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub histogram: BTreeMap<u64, u64>,
    /// `(d, fraction of vertices with degree >= d)` for each observed `d`.
    pub ccdf: Vec<(u64, f64)>,
    /// `(i, D_i)` for the requested probe indices.
    pub probes: Vec<(usize, u64)>,
}

impl DegreeStats {
    /// Builds stats for a degree sample (not indexed by vertex).
    pub fn from_degrees(degrees: &[u64]) -> Self {
        let mut histogram = BTreeMap::new();
        for &d in degrees {
            *histogram.entry(d).or_insert(0u64) += 1;
        }
        let total = degrees.len() as f64;
        let mut remaining = degrees.len() as u64;
        let mut ccdf = Vec::with_capacity(histogram.len());
        for (&d, &c) in &histogram {
            ccdf.push((d, remaining as f64 / total));
            remaining -= c;
        }
        Self {
            histogram,
            ccdf,
            probes: Vec::new(),
        }
    }

    /// Stats for a `PA_t(m, δ)` graph; checks mass `t`, monotone ccdf and
    /// minimum degree `m`.
    pub fn from_graph(graph: &Multigraph, m: usize, probes: &[usize]) -> Result<Self> {
        let mut stats = Self::from_degrees(&graph.degrees()[1..]);
        stats.probes = probes
            .iter()
            .map(|&i| Ok((i, graph.degree(i)?)))
            .collect::<Result<_>>()?;
        let mass: u64 = stats.histogram.values().sum();
        assert_eq!(mass as usize, graph.n(), "histogram mass");
        assert!(stats.ccdf.windows(2).all(|w| w[0].1 >= w[1].1), "ccdf monotone");
        if let Some((&dmin, _)) = stats.histogram.iter().next() {
            assert!(dmin >= m as u64, "minimum degree {dmin} below m={m}");
        }
        Ok(stats)
    }

    pub fn len(&self) -> u64 {
        self.histogram.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.histogram.is_empty()
    }

    /// Fraction of vertices with degree `>= d`.
    pub fn ccdf_at(&self, d: u64) -> f64 {
        let total = self.len() as f64;
        self.histogram.range(d..).map(|(_, &c)| c).sum::<u64>() as f64 / total
    }

    /// CSV with header `degree,count,ccdf`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "degree,count,ccdf")?;
        for (&(d, frac), (_, &c)) in self.ccdf.iter().zip(&self.histogram) {
            writeln!(out, "{d},{c},{frac}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Continuous-approximation MLE `1 + n / Σ ln(d_k / (dmin - 1/2))` over
/// degrees `>= dmin`.
pub fn estimate_power_law_exponent(stats: &DegreeStats, dmin: u64) -> Result<f64> {
    if dmin == 0 {
        return Err(Error::InvalidParameter("dmin must be positive".into()));
    }
    let tail: Vec<(u64, u64)> = stats.histogram.range(dmin..).map(|(&d, &c)| (d, c)).collect();
    let n: u64 = tail.iter().map(|&(_, c)| c).sum();
    if n < thresholds::MIN_TAIL_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{n} samples with degree >= {dmin}, need {}",
            thresholds::MIN_TAIL_SAMPLES
        )));
    }
    if stats.histogram.len() == 1 {
        return Err(Error::InsufficientData("all degrees are equal".into()));
    }
    let shift = dmin as f64 - 0.5;
    let log_sum: f64 = tail.iter().map(|&(d, c)| c as f64 * (d as f64 / shift).ln()).sum();
    Ok(1.0 + n as f64 / log_sum)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    /// Estimate of γ.
    pub slope: f64,
    /// Estimate of `log a` in `E[D_i(t)] ≈ a (t/i)^γ`.
    pub intercept: f64,
    /// `(i, mean D_i(t))` per probe.
    pub means: Vec<(usize, f64)>,
}

impl ScalingFit {
    /// CSV with header `i,t_over_i,mean_degree`.
    pub fn write_csv<W: Write>(&self, t: usize, mut out: W) -> Result<()> {
        writeln!(out, "i,t_over_i,mean_degree")?;
        for &(i, mean) in &self.means {
            writeln!(out, "{i},{},{mean}", t as f64 / i as f64)?;
        }
        writeln!(out, "# slope={} intercept={}", self.slope, self.intercept)?;
        out.flush()?;
        Ok(())
    }
}

/// Least-squares line through `(x, y)`: returns `(slope, intercept)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Runs `f` once per trial in parallel and returns the results in trial
/// order.
fn per_trial<R: Send, F>(trials: u64, stream: RngStream, f: F) -> Vec<R>
where
    F: Fn(RngStream) -> R + Sync + Send,
{
    (0..trials).into_par_iter().map(|k| f(trial_stream(stream, k))).collect()
}

/// Regresses `log mean D_i(t)` on `log(t/i)` over independent graphs.
pub fn gamma_scaling_fit(
    params: Params,
    t: usize,
    probes: &[usize],
    trials: u64,
    stream: RngStream,
) -> Result<ScalingFit> {
    if probes.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 probe indices, got {}",
            probes.len()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if let Some(&bad) = probes.iter().find(|&&i| i == 0 || i * 100 > t) {
        return Err(Error::InvalidParameter(format!("probe {bad} outside 1..=t/100")));
    }
    let rows = per_trial(trials, stream, |s| {
        let mut g: PaGrower = PaGrower::new(params, t, s);
        g.grow_to(t);
        probes.iter().map(|&i| g.degree(i)).collect::<Vec<u64>>()
    });
    let means: Vec<(usize, f64)> = probes
        .iter()
        .enumerate()
        .map(|(k, &i)| (i, rows.iter().map(|r| r[k] as f64).sum::<f64>() / trials as f64))
        .collect();
    let points: Vec<(f64, f64)> = means
        .iter()
        .map(|&(i, mean)| ((t as f64 / i as f64).ln(), mean.ln()))
        .collect();
    let (slope, intercept) = linear_fit(&points);
    Ok(ScalingFit {
        slope,
        intercept,
        means,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrefixReport {
    pub i: usize,
    pub t: usize,
    /// `S_i(t) / (t^γ i^{1-γ})` per trial, in trial order.
    pub normalized: Vec<f64>,
    pub mean: f64,
    /// Empirical 1st percentile of the normalised sums.
    pub p01: f64,
}

impl PrefixReport {
    /// Lower tail stays above a fixed fraction of the mean.
    pub fn lower_tail_ok(&self) -> bool {
        self.p01 > thresholds::PREFIX_LOWER_TAIL_FRACTION * self.mean
    }

    /// Mean lies in the frozen constant band.
    pub fn mean_in_band(&self) -> bool {
        let (lo, hi) = thresholds::PREFIX_MEAN_BAND;
        (lo..=hi).contains(&self.mean)
    }

    /// CSV with header `i,t,trials,mean,p01`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "i,t,trials,mean,p01")?;
        writeln!(out, "{},{},{},{},{}", self.i, self.t, self.normalized.len(), self.mean, self.p01)?;
        out.flush()?;
        Ok(())
    }
}

/// Empirical quantile by the nearest-rank rule.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

pub fn prefix_sum_concentration(
    params: Params,
    i: usize,
    t: usize,
    trials: u64,
    stream: RngStream,
) -> Result<PrefixReport> {
    if i == 0 || i > t {
        return Err(Error::InvalidParameter(format!("need 1 <= i <= t (i={i}, t={t})")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let gamma = params.gamma();
    let norm = (t as f64).powf(gamma) * (i as f64).powf(1.0 - gamma);
    let normalized = per_trial(trials, stream, |s| {
        let mut g: PaGrower = PaGrower::new(params, t, s);
        g.grow_to(t);
        g.degrees()[1..=i].iter().sum::<u64>() as f64 / norm
    });
    let mean = normalized.iter().sum::<f64>() / trials as f64;
    let mut sorted = normalized.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(PrefixReport {
        i,
        t,
        p01: quantile(&sorted, 0.01),
        normalized,
        mean,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub self_loops: u64,
    /// Vertices carrying two or more self-loops, sorted.
    pub multi_loop_vertices: Vec<usize>,
    /// Vertex pairs joined by two or more edges.
    pub parallel_pairs: u64,
    /// `cycles[k]` counts cycles of length `k` for `2 <= k <= K`; slots 0
    /// and 1 stay zero. Parallel edges give distinct cycles.
    pub cycles: Vec<u64>,
}

impl Census {
    pub fn vertices_with_2plus_self_loops(&self) -> usize {
        self.multi_loop_vertices.len()
    }

    pub fn cycles_up_to(&self, k: usize) -> u64 {
        self.cycles.iter().take(k + 1).sum()
    }

    /// CSV with header `self_loops,multi_loop_vertices,parallel_pairs,c2,...,cK`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let k = self.cycles.len().saturating_sub(1);
        let cols: Vec<String> = (2..=k).map(|j| format!("c{j}")).collect();
        writeln!(out, "self_loops,multi_loop_vertices,parallel_pairs,{}", cols.join(","))?;
        let vals: Vec<String> = self.cycles.iter().skip(2).map(u64::to_string).collect();
        writeln!(
            out,
            "{},{},{},{}",
            self.self_loops,
            self.multi_loop_vertices.len(),
            self.parallel_pairs,
            vals.join(",")
        )?;
        out.flush()?;
        Ok(())
    }
}

/// Exact counts of loops, parallel pairs and cycles of length up to `k`.
///
/// Cycles of length `>= 3` are enumerated once each by a depth-first search
/// that starts at the cycle's smallest vertex and only fixes one of the two
/// traversal directions; each is weighted by the product of its edge
/// multiplicities.
pub fn structure_census(graph: &Multigraph, k: usize) -> Result<Census> {
    if k > thresholds::MAX_CENSUS_CYCLE {
        return Err(Error::InvalidParameter(format!(
            "cycle length {k} above {}",
            thresholds::MAX_CENSUS_CYCLE
        )));
    }
    let n = graph.n();
    let mut simple: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n + 1];
    let mut self_loops = 0;
    let mut multi_loop_vertices = Vec::new();
    let mut parallel_pairs = 0;
    let mut two_cycles = 0;
    for v in 1..=n {
        let nb = graph.neighbors(v);
        let mut idx = 0;
        while idx < nb.len() {
            let w = nb[idx] as usize;
            let mut c = 1;
            while idx + c < nb.len() && nb[idx + c] as usize == w {
                c += 1;
            }
            idx += c;
            if w == v {
                self_loops += c as u64;
                if c >= 2 {
                    multi_loop_vertices.push(v);
                }
            } else {
                simple[v].push((w, c as u64));
                if w > v && c >= 2 {
                    parallel_pairs += 1;
                    two_cycles += (c * (c - 1) / 2) as u64;
                }
            }
        }
    }
    let mut cycles = vec![0u64; k.max(1) + 1];
    if k >= 2 {
        cycles[2] = two_cycles;
    }
    if k >= 3 {
        let mut path = Vec::with_capacity(k);
        let mut on_path = vec![false; n + 1];
        for s in 1..=n {
            path.push(s);
            on_path[s] = true;
            extend_cycles(&simple, s, 1, k, &mut path, &mut on_path, &mut cycles);
            on_path[s] = false;
            path.pop();
        }
    }
    Ok(Census {
        self_loops,
        multi_loop_vertices,
        parallel_pairs,
        cycles,
    })
}

fn extend_cycles(
    simple: &[Vec<(usize, u64)>],
    start: usize,
    weight: u64,
    k: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    cycles: &mut [u64],
) {
    let last = *path.last().expect("non-empty path");
    for &(w, c) in &simple[last] {
        if w == start && path.len() >= 3 && path[1] < last {
            cycles[path.len()] += weight * c;
        }
        if w <= start || on_path[w] || path.len() == k {
            continue;
        }
        path.push(w);
        on_path[w] = true;
        extend_cycles(simple, start, weight * c, k, path, on_path, cycles);
        on_path[w] = false;
        path.pop();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointEdgeReport {
    pub i: usize,
    pub js: Vec<usize>,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    /// `Π 1 / (i^γ j^{1-γ})`.
    pub product: f64,
    /// `(estimate / product)^{1/k}`; `None` for an empty list or no hits.
    pub m_hat: Option<f64>,
    pub inconclusive: bool,
}

impl JointEdgeReport {
    /// CSV with header `i,js,samples,hits,estimate,product,m_hat,inconclusive`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "i,js,samples,hits,estimate,product,m_hat,inconclusive")?;
        let js: Vec<String> = self.js.iter().map(usize::to_string).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            self.i,
            js.join(";"),
            self.samples,
            self.hits,
            self.estimate,
            self.product,
            self.m_hat.map(|x| x.to_string()).unwrap_or_default(),
            self.inconclusive
        )?;
        out.flush()?;
        Ok(())
    }
}

/// Monte-Carlo estimate of `P(every j in js throws an edge to i)`.
///
/// The event only involves vertices up to `max(js)`, so each sample grows
/// the graph to that size rather than to `t_small`.
pub fn joint_edge_prob_mc(
    params: Params,
    i: usize,
    js: &[usize],
    t_small: usize,
    samples: u64,
    stream: RngStream,
) -> Result<JointEdgeReport> {
    if t_small > thresholds::JOINT_EDGE_MAX_T {
        return Err(Error::InvalidParameter(format!(
            "t_small={t_small} above {}",
            thresholds::JOINT_EDGE_MAX_T
        )));
    }
    if js.len() > 3 {
        return Err(Error::InvalidParameter(format!("at most 3 targets, got {}", js.len())));
    }
    if i == 0 {
        return Err(Error::InvalidParameter("i must be at least 1".into()));
    }
    if let Some(&bad) = js.iter().find(|&&j| j <= i || j > t_small) {
        return Err(Error::InvalidParameter(format!("need i < j <= t_small, got j={bad}")));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let gamma = params.gamma();
    let product: f64 = js
        .iter()
        .map(|&j| 1.0 / ((i as f64).powf(gamma) * (j as f64).powf(1.0 - gamma)))
        .product();
    if js.is_empty() {
        return Ok(JointEdgeReport {
            i,
            js: Vec::new(),
            samples,
            hits: samples,
            estimate: 1.0,
            product,
            m_hat: None,
            inconclusive: false,
        });
    }
    let horizon = *js.iter().max().expect("non-empty");
    let hits: u64 = per_trial(samples, stream, |s| {
        let mut g: PaGrower = PaGrower::new(params, horizon, s);
        g.grow_to(horizon);
        let edges = g.edges();
        let m = params.m();
        let all = js.iter().all(|&j| {
            edges[(j - 1) * m..j * m].iter().any(|e| e.target as usize == i)
        });
        u64::from(all)
    })
    .into_iter()
    .sum();
    let estimate = hits as f64 / samples as f64;
    let m_hat = (hits > 0).then(|| (estimate / product).powf(1.0 / js.len() as f64));
    Ok(JointEdgeReport {
        i,
        js: js.to_vec(),
        samples,
        hits,
        estimate,
        product,
        m_hat,
        inconclusive: hits == 0 && samples < thresholds::JOINT_EDGE_CONCLUSIVE_SAMPLES,
    })
}

/// Seeds with probability `p`, runs one round, and returns the infected
/// fraction among vertices `1..=kappa`.
pub fn core_round1_check(
    graph: &Multigraph,
    r: usize,
    p: f64,
    stream: RngStream,
    kappa: usize,
) -> Result<f64> {
    if kappa == 0 || kappa > graph.n() {
        return Err(Error::InvalidParameter(format!("kappa={kappa} outside 1..={}", graph.n())));
    }
    let initial = seed_infection(graph.n(), p, stream)?;
    let res = run_rounds(graph, r, &initial, Some(1))?;
    let hit = (1..=kappa).filter(|&v| res.state.is_infected(v)).count();
    Ok(hit as f64 / kappa as f64)
}
