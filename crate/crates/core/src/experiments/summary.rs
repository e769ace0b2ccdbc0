use std::io::{BufRead, Write};

use super::{TrialResult, SWEEP_HEADER, TIMING_COLUMN};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub t: usize,
    pub m: usize,
    pub delta: f64,
    pub r: usize,
    pub a: f64,
    pub lambda: f64,
    pub trials: usize,
    pub full_fraction: f64,
    pub ratio_q1: f64,
    pub ratio_median: f64,
    pub ratio_q3: f64,
    pub max_rounds: u32,
}

/// Linear-interpolation quantile of sorted data.
fn interpolated(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Reads a sweep CSV; the header must match exactly, with or without the
/// timing column.
pub fn read_sweep_csv<R: BufRead>(input: R) -> Result<Vec<TrialResult>> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::parse(1, "empty file"))??;
    let timing = if header == SWEEP_HEADER {
        false
    } else if header == format!("{SWEEP_HEADER},{TIMING_COLUMN}") {
        true
    } else {
        return Err(Error::parse(1, format!("unexpected header {header:?}")));
    };
    let width = if timing { 13 } else { 12 };
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != width {
            return Err(Error::parse(lineno, format!("expected {width} fields, found {}", f.len())));
        }
        fn field<T: std::str::FromStr>(s: &str, name: &str, lineno: usize) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            s.parse().map_err(|e| Error::parse(lineno, format!("bad {name} {s:?}: {e}")))
        }
        let full = match f[11] {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(Error::parse(lineno, format!("bad full flag {other:?}"))),
        };
        rows.push(TrialResult {
            t: field(f[0], "t", lineno)?,
            m: field(f[1], "m", lineno)?,
            delta: field(f[2], "delta", lineno)?,
            r: field(f[3], "r", lineno)?,
            a: field(f[4], "a", lineno)?,
            lambda: field(f[5], "lambda", lineno)?,
            trial: field(f[6], "trial", lineno)?,
            seed: field(f[7], "seed", lineno)?,
            i0: field(f[8], "i0", lineno)?,
            i_f: field(f[9], "if", lineno)?,
            rounds: field(f[10], "rounds", lineno)?,
            full,
            wall_ms: if timing { Some(field(f[12], TIMING_COLUMN, lineno)?) } else { None },
        });
    }
    Ok(rows)
}

/// One summary per sweep point, in order of first appearance.
pub fn summarize(rows: &[TrialResult]) -> Vec<PointSummary> {
    let key = |r: &TrialResult| (r.t, r.m, r.delta.to_bits(), r.r, r.a.to_bits(), r.lambda.to_bits());
    let mut groups: Vec<(_, Vec<&TrialResult>)> = Vec::new();
    for row in rows {
        let k = key(row);
        match groups.iter_mut().find(|(gk, _)| *gk == k) {
            Some((_, g)) => g.push(row),
            None => groups.push((k, vec![row])),
        }
    }
    groups
        .into_iter()
        .map(|(_, g)| {
            let mut ratios: Vec<f64> = g.iter().map(|r| r.ratio()).collect();
            ratios.sort_by(f64::total_cmp);
            let first = g[0];
            PointSummary {
                t: first.t,
                m: first.m,
                delta: first.delta,
                r: first.r,
                a: first.a,
                lambda: first.lambda,
                trials: g.len(),
                full_fraction: g.iter().filter(|r| r.full).count() as f64 / g.len() as f64,
                ratio_q1: interpolated(&ratios, 0.25),
                ratio_median: interpolated(&ratios, 0.5),
                ratio_q3: interpolated(&ratios, 0.75),
                max_rounds: g.iter().map(|r| r.rounds).max().unwrap_or(0),
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(summaries: &[PointSummary], mut out: W) -> Result<()> {
    writeln!(
        out,
        "t,m,delta,r,a,lambda,trials,full_fraction,ratio_q1,ratio_median,ratio_q3,max_rounds"
    )?;
    for s in summaries {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            s.t,
            s.m,
            s.delta,
            s.r,
            s.a,
            s.lambda,
            s.trials,
            s.full_fraction,
            s.ratio_q1,
            s.ratio_median,
            s.ratio_q3,
            s.max_rounds
        )?;
    }
    out.flush()?;
    Ok(())
}
