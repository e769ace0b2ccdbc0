//! r-threshold bootstrap percolation with synchronous rounds.
//!
//! A susceptible vertex becomes infected in round `τ` when at least `r` of
//! its edge-endpoints lead to vertices infected by round `τ - 1`. Parallel
//! edges count with multiplicity; self-loops never count.

use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::rng::RngStream;

/// `round_infected` value for vertices that are never infected.
pub const NEVER: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub enum Seeding {
    /// Every vertex independently with probability `p`.
    Probability(f64),
    /// A fixed initial set of 1-based vertex ids.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercolationConfig {
    pub r: usize,
    pub seeding: Seeding,
    pub stream: RngStream,
}

impl PercolationConfig {
    pub fn new(r: usize, seeding: Seeding, stream: RngStream) -> Result<Self> {
        check_r(r)?;
        if let Seeding::Probability(p) = seeding {
            check_probability(p)?;
        }
        Ok(Self { r, seeding, stream })
    }

    /// Draws (or copies) the initial set for a graph on `t` vertices.
    pub fn initial_set(&self, t: usize) -> Result<Vec<usize>> {
        match &self.seeding {
            Seeding::Probability(p) => seed_infection(t, *p, self.stream),
            Seeding::Explicit(set) => Ok(set.clone()),
        }
    }

    pub fn execute(&self, graph: &Multigraph) -> Result<PercolationResult> {
        let initial = self.initial_set(graph.n())?;
        run(graph, self.r, &initial)
    }
}

fn check_r(r: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!("threshold r={r} must be at least 2")));
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Per-vertex infection record. Index 0 is unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfectionState {
    infected: Vec<bool>,
    round_infected: Vec<u32>,
    round: u32,
}

impl InfectionState {
    fn new(n: usize) -> Self {
        Self {
            infected: vec![false; n + 1],
            round_infected: vec![NEVER; n + 1],
            round: 0,
        }
    }

    #[inline]
    pub fn is_infected(&self, v: usize) -> bool {
        self.infected[v]
    }

    /// Round in which `v` was infected: 0 for the initial set, [`NEVER`] if
    /// it stayed susceptible.
    #[inline]
    pub fn round_infected(&self, v: usize) -> u32 {
        self.round_infected[v]
    }

    /// Infection flags indexed by vertex id.
    #[inline]
    pub fn infected(&self) -> &[bool] {
        &self.infected
    }

    /// Last productive round.
    #[inline]
    pub fn round(&self) -> u32 {
        self.round
    }

    /// Sorted ids of all infected vertices.
    pub fn infected_set(&self) -> Vec<usize> {
        (1..self.infected.len()).filter(|&v| self.infected[v]).collect()
    }

    /// Vertices infected by the end of round `tau`.
    pub fn infected_by(&self, tau: u32) -> Vec<usize> {
        (1..self.round_infected.len())
            .filter(|&v| self.round_infected[v] <= tau)
            .collect()
    }

    fn infect(&mut self, v: usize, round: u32) {
        debug_assert!(!self.infected[v]);
        self.infected[v] = true;
        self.round_infected[v] = round;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercolationResult {
    pub r: usize,
    pub initial: usize,
    pub final_count: usize,
    /// Number of rounds that infected at least one vertex.
    pub rounds: u32,
    /// `new_per_round[τ - 1]` vertices were infected in round `τ`.
    pub new_per_round: Vec<usize>,
    pub full: bool,
    pub state: InfectionState,
}

impl PercolationResult {
    /// `|I_f| / |I_0|`, defined as 1 for an empty initial set.
    pub fn growth_ratio(&self) -> f64 {
        if self.initial == 0 {
            1.0
        } else {
            self.final_count as f64 / self.initial as f64
        }
    }
}

/// Each of the `t` vertices independently with probability `p`, sorted.
pub fn seed_infection(t: usize, p: f64, stream: RngStream) -> Result<Vec<usize>> {
    check_probability(p)?;
    if p == 0.0 {
        return Ok(Vec::new());
    }
    if p == 1.0 {
        return Ok((1..=t).collect());
    }
    let mut rng = stream.rng();
    Ok((1..=t).filter(|_| rng.random::<f64>() < p).collect())
}

/// Edge-endpoints at `v` whose other end is an infected vertex other than `v`.
pub fn infected_incident_edges(graph: &Multigraph, v: usize, infected: &[bool]) -> Result<usize> {
    graph.check_vertex(v)?;
    Ok(graph
        .neighbors(v)
        .iter()
        .filter(|&&w| w as usize != v && infected[w as usize])
        .count())
}

pub fn run(graph: &Multigraph, r: usize, initial: &[usize]) -> Result<PercolationResult> {
    run_rounds(graph, r, initial, None)
}

/// As [`run`], but stops after at most `max_rounds` rounds when given.
pub fn run_rounds(
    graph: &Multigraph,
    r: usize,
    initial: &[usize],
    max_rounds: Option<u32>,
) -> Result<PercolationResult> {
    check_r(r)?;
    let n = graph.n();
    let mut state = InfectionState::new(n);
    let mut frontier = Vec::with_capacity(initial.len());
    for &v in initial {
        graph.check_vertex(v)?;
        if !state.infected[v] {
            state.infect(v, 0);
            frontier.push(v);
        }
    }
    let initial_count = frontier.len();
    let mut count = vec![0u32; n + 1];
    let mut candidates = Vec::new();
    let mut new_per_round = Vec::new();
    let mut total = initial_count;

    loop {
        for &u in &frontier {
            for &w in graph.neighbors(u) {
                let w = w as usize;
                if w == u || state.infected[w] {
                    continue;
                }
                count[w] += 1;
                if count[w] as usize == r {
                    candidates.push(w);
                }
            }
        }
        if candidates.is_empty() || max_rounds.is_some_and(|k| state.round >= k) {
            break;
        }
        let round = state.round + 1;
        candidates.sort_unstable();
        for &v in &candidates {
            state.infect(v, round);
        }
        state.round = round;
        total += candidates.len();
        new_per_round.push(candidates.len());
        std::mem::swap(&mut frontier, &mut candidates);
        candidates.clear();
    }

    debug_assert!(state.round as usize <= n);
    Ok(PercolationResult {
        r,
        initial: initial_count,
        final_count: total,
        rounds: state.round,
        new_per_round,
        full: total == n,
        state,
    })
}

/// `⌈r / (r - m) · i0⌉` when `r > m`; no bound otherwise.
pub fn folklore_bound(r: usize, m: usize, i0: usize) -> Option<usize> {
    (r > m).then(|| (r * i0).div_ceil(r - m))
}

/// Whether `result` respects the folklore bound (vacuously true for `r <= m`).
pub fn satisfies_folklore_bound(r: usize, m: usize, result: &PercolationResult) -> bool {
    folklore_bound(r, m, result.initial).is_none_or(|b| result.final_count <= b)
}

/// Reads one vertex id per line; blank lines and `#` comments are skipped.
/// Ids are validated against `t`, sorted and deduplicated.
pub fn read_initial_set<R: BufRead>(input: R, t: usize) -> Result<Vec<usize>> {
    let mut set = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let s = line.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        let v: usize = s
            .parse()
            .map_err(|e| Error::parse(idx + 1, format!("bad vertex id {s:?}: {e}")))?;
        if v == 0 || v > t {
            return Err(Error::parse(idx + 1, format!("vertex {v} outside 1..={t}")));
        }
        set.push(v);
    }
    set.sort_unstable();
    set.dedup();
    Ok(set)
}

pub fn write_initial_set<W: Write>(set: &[usize], mut out: W) -> Result<()> {
    for v in set {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    Ok(())
}
