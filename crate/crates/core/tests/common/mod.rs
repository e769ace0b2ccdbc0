//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::HashMap;

/// Bootstrap percolation by recomputing every count from scratch each
/// round. Returns the infection round per vertex (`None` = never), 1-based.
pub fn brute_force_percolation(
    n: usize,
    edges: &[(usize, usize)],
    r: usize,
    initial: &[usize],
) -> Vec<Option<u32>> {
    let mut round = vec![None; n + 1];
    for &v in initial {
        round[v] = Some(0);
    }
    let mut tau = 0;
    loop {
        tau += 1;
        let mut counts = vec![0usize; n + 1];
        for &(a, b) in edges {
            if a == b {
                continue;
            }
            if round[a].is_some() {
                counts[b] += 1;
            }
            if round[b].is_some() {
                counts[a] += 1;
            }
        }
        let fresh: Vec<usize> = (1..=n).filter(|&v| round[v].is_none() && counts[v] >= r).collect();
        if fresh.is_empty() {
            return round;
        }
        for v in fresh {
            round[v] = Some(tau);
        }
    }
}

pub type DegreeLaw = HashMap<Vec<u64>, f64>;

/// Exact law of the degree sequence of the sequential model with `m`
/// edges per vertex, tracked by dynamic programming over degree vectors.
///
/// Edge `j` of vertex `s` joins older `i` with weight `D_i + δ` and closes a
/// loop with weight `D_s + 1 + jδ/m`.
pub fn exact_degree_law(t: usize, m: usize, delta: f64) -> DegreeLaw {
    let mut law: DegreeLaw = HashMap::from([(Vec::new(), 1.0)]);
    for s in 1..=t {
        let mut next = DegreeLaw::new();
        for (deg, p) in law {
            let mut d = deg.clone();
            d.push(0);
            next.insert(d, p);
        }
        law = next;
        for j in 1..=m {
            let mut next = DegreeLaw::new();
            for (deg, p) in &law {
                let own = deg[s - 1] as f64;
                let loop_w = own + 1.0 + j as f64 * delta / m as f64;
                let mut weights: Vec<f64> = deg[..s - 1].iter().map(|&d| d as f64 + delta).collect();
                weights.push(loop_w);
                let total: f64 = weights.iter().sum();
                for (target, w) in weights.iter().enumerate() {
                    let mut d = deg.clone();
                    d[s - 1] += 1;
                    d[target] += 1;
                    *next.entry(d).or_insert(0.0) += p * w / total;
                }
            }
            law = next;
        }
    }
    law
}

/// Exact law of the block-summed degree sequence of the `m = 1` model on
/// `m t` vertices with offset `δ/m`.
pub fn exact_collapsed_law(t: usize, m: usize, delta: f64) -> DegreeLaw {
    let fine = exact_degree_law(m * t, 1, delta / m as f64);
    let mut law = DegreeLaw::new();
    for (deg, p) in fine {
        let coarse: Vec<u64> = deg.chunks(m).map(|c| c.iter().sum()).collect();
        *law.entry(coarse).or_insert(0.0) += p;
    }
    law
}

pub fn tv_laws(a: &DegreeLaw, b: &DegreeLaw) -> f64 {
    let mut keys: Vec<&Vec<u64>> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

pub fn empirical_law(counts: &HashMap<Vec<u64>, u64>) -> DegreeLaw {
    let n: u64 = counts.values().sum();
    counts.iter().map(|(k, &c)| (k.clone(), c as f64 / n as f64)).collect()
}

/// `E[D_i(t)]` for every `i`, by the linear recursion of the sequential
/// model; slot 0 unused.
pub fn expected_degrees(t: usize, m: usize, delta: f64) -> Vec<f64> {
    let mf = m as f64;
    let mut e = vec![0.0; t + 1];
    for s in 1..=t {
        for j in 1..=m {
            let total = (2.0 * mf + delta) * (s - 1) as f64 + 2.0 * j as f64 - 1.0 + j as f64 * delta / mf;
            let loop_w = e[s] + 1.0 + j as f64 * delta / mf;
            for d in e[1..s].iter_mut() {
                *d += (*d + delta) / total;
            }
            e[s] += 1.0 + loop_w / total;
        }
    }
    e
}

/// `∫_j^t x^{-1-α} dx`.
pub fn integral_k0(alpha: f64, j: f64, t: f64) -> f64 {
    (j.powf(-alpha) - t.powf(-alpha)) / alpha
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
