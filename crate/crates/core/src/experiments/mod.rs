//! Phase-transition sweeps: many independent (graph, initial set) trials per
//! sweep point, written as one CSV row per trial.

mod config;
mod summary;

pub use config::{config_to_args, parse_config_file};
pub use summary::{read_sweep_csv, summarize, write_summary_csv, PointSummary};

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::grow_pam_direct;
use crate::params::Params;
use crate::percolation::{run, seed_infection};
use crate::rng::{derive_seed, RngStream};

/// Sweep CSV header, without the optional timing column.
pub const SWEEP_HEADER: &str = "t,m,delta,r,a,lambda,trial,seed,i0,if,rounds,full";

/// Name of the optional timing column.
pub const TIMING_COLUMN: &str = "wall_ms";

/// A growth function of `t`: a constant or `(log t)^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Omega {
    Value(f64),
    LogPower(u32),
}

impl Omega {
    pub fn at(&self, t: usize) -> f64 {
        match *self {
            Omega::Value(v) => v,
            Omega::LogPower(k) => (t as f64).ln().powi(k as i32),
        }
    }
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Omega::Value(v) => write!(f, "{v}"),
            Omega::LogPower(1) => f.write_str("log"),
            Omega::LogPower(k) => write!(f, "log^{k}"),
        }
    }
}

impl FromStr for Omega {
    type Err = Error;

    /// `log`, `log^k` or a positive number.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "log" {
            return Ok(Omega::LogPower(1));
        }
        if let Some(k) = s.strip_prefix("log^") {
            let k = k.parse().map_err(|e| Error::Config(format!("bad omega {s:?}: {e}")))?;
            return Ok(Omega::LogPower(k));
        }
        let v: f64 = s.parse().map_err(|e| Error::Config(format!("bad omega {s:?}: {e}")))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("omega must be positive, got {v}")));
        }
        Ok(Omega::Value(v))
    }
}

/// How the expected initial infection `a(t)` relates to `a_c(t) = t^{1-γ}`.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedingRule {
    /// `a = λ a_c`, one sweep point per λ.
    Lambda(Vec<f64>),
    /// `a = ω a_c`.
    Above(Omega),
    /// `a = a_c / ω`.
    Below(Omega),
}

impl SeedingRule {
    /// Multipliers `a / a_c`, one per sweep point.
    pub fn multipliers(&self, t: usize) -> Vec<f64> {
        match self {
            SeedingRule::Lambda(ls) => ls.clone(),
            SeedingRule::Above(w) => vec![w.at(t)],
            SeedingRule::Below(w) => vec![1.0 / w.at(t)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Supercritical,
    SubcriticalI,
    SubcriticalII,
    SubcriticalIII,
    Critical,
    LambdaGrid,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Supercritical,
        Preset::SubcriticalI,
        Preset::SubcriticalII,
        Preset::SubcriticalIII,
        Preset::Critical,
        Preset::LambdaGrid,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Supercritical => "supercritical",
            Preset::SubcriticalI => "subcritical-i",
            Preset::SubcriticalII => "subcritical-ii",
            Preset::SubcriticalIII => "subcritical-iii",
            Preset::Critical => "critical",
            Preset::LambdaGrid => "lambda-grid",
        }
    }

    /// The preset's default seeding rule.
    pub fn default_seeding(&self) -> SeedingRule {
        match self {
            Preset::Supercritical => SeedingRule::Above(Omega::LogPower(1)),
            Preset::SubcriticalI | Preset::SubcriticalIII => SeedingRule::Below(Omega::LogPower(1)),
            Preset::SubcriticalII => SeedingRule::Below(Omega::LogPower(2)),
            Preset::Critical => SeedingRule::Lambda(vec![1.0]),
            Preset::LambdaGrid => SeedingRule::Lambda(vec![0.1, 0.3, 1.0, 3.0, 10.0, 30.0]),
        }
    }

    /// Checks the hypotheses the preset stands for.
    pub fn check(&self, params: &Params, r: usize, seeding: &SeedingRule) -> Result<()> {
        let m = params.m();
        let gamma = params.gamma();
        let fail = |msg: String| Err(Error::Config(format!("preset {}: {msg}", self.name())));
        match self {
            Preset::Supercritical => {
                if r >= m {
                    return fail(format!("needs r < m (r={r}, m={m})"));
                }
                if !matches!(seeding, SeedingRule::Above(_)) {
                    return fail("seeding must be a = ω a_c".into());
                }
            }
            Preset::SubcriticalI => {
                if r > m || r as f64 * gamma <= 1.0 {
                    return fail(format!("needs r <= m and rγ > 1 (r={r}, m={m}, γ={gamma})"));
                }
                if !matches!(seeding, SeedingRule::Below(_)) {
                    return fail("seeding must be a = a_c / ω".into());
                }
            }
            Preset::SubcriticalII => {
                if r > m || r < 3 {
                    return fail(format!("needs 3 <= r <= m (r={r}, m={m})"));
                }
                if !matches!(seeding, SeedingRule::Below(_)) {
                    return fail("seeding must be a = a_c / ω".into());
                }
            }
            Preset::SubcriticalIII => {
                if r != 2 || r > m {
                    return fail(format!("needs r = 2 <= m (r={r}, m={m})"));
                }
                if seeding != &SeedingRule::Below(Omega::LogPower(1)) {
                    return fail("seeding must be a = a_c / log t".into());
                }
            }
            Preset::Critical => {
                if r < 3 || r > m {
                    return fail(format!("needs 3 <= r <= m (r={r}, m={m})"));
                }
                if !matches!(seeding, SeedingRule::Lambda(_)) {
                    return fail("seeding must be a = λ a_c".into());
                }
            }
            Preset::LambdaGrid => {
                if !matches!(seeding, SeedingRule::Lambda(_)) {
                    return fail("seeding must be a = λ a_c".into());
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub t: usize,
    pub params: Params,
    pub r: usize,
    pub seeding: SeedingRule,
    pub trials: u64,
    pub base_seed: u64,
    pub preset: Option<Preset>,
    /// Adds a wall-time column to the CSV.
    pub timing: bool,
}

impl SweepConfig {
    pub fn new(t: usize, params: Params, r: usize, seeding: SeedingRule, trials: u64, base_seed: u64) -> Result<Self> {
        let cfg = Self {
            t,
            params,
            r,
            seeding,
            trials,
            base_seed,
            preset: None,
            timing: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// A preset with its default seeding rule.
    pub fn preset(preset: Preset, t: usize, params: Params, r: usize, trials: u64, base_seed: u64) -> Result<Self> {
        let mut cfg = Self::new(t, params, r, preset.default_seeding(), trials, base_seed)?;
        cfg.preset = Some(preset);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::Config("t must be positive".into()));
        }
        if self.r < 2 {
            return Err(Error::Config(format!("r={} must be at least 2", self.r)));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let ms = self.seeding.multipliers(self.t);
        if ms.is_empty() {
            return Err(Error::Config("empty λ grid".into()));
        }
        if let Some(bad) = ms.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Config(format!("seeding multiplier {bad} must be positive")));
        }
        if let Some(p) = self.preset {
            p.check(&self.params, self.r, &self.seeding)?;
        }
        Ok(())
    }

    /// `a_c(t) = t^{1-γ}`.
    pub fn critical_seed(&self) -> f64 {
        self.params.critical_seed(self.t)
    }

    /// `(λ, a)` per sweep point.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let ac = self.critical_seed();
        self.seeding.multipliers(self.t).into_iter().map(|l| (l, l * ac)).collect()
    }
}

/// Seed of trial `trial` at sweep point `point`.
pub fn trial_seed(base: u64, point: usize, trial: u64) -> u64 {
    derive_seed(&[base, point as u64, trial])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub t: usize,
    pub m: usize,
    pub delta: f64,
    pub r: usize,
    pub a: f64,
    pub lambda: f64,
    pub trial: u64,
    pub seed: u64,
    pub i0: usize,
    pub i_f: usize,
    pub rounds: u32,
    pub full: bool,
    pub wall_ms: Option<f64>,
}

impl TrialResult {
    /// `|I_f| / |I_0|`, 1 for an empty initial set.
    pub fn ratio(&self) -> f64 {
        if self.i0 == 0 {
            1.0
        } else {
            self.i_f as f64 / self.i0 as f64
        }
    }
}

/// Runs a single trial: fresh graph on stream 0, initial set on stream 1.
pub fn run_trial(params: Params, t: usize, r: usize, a: f64, lambda: f64, trial: u64, seed: u64) -> Result<TrialResult> {
    let start = Instant::now();
    let graph = grow_pam_direct(t, params, RngStream::new(seed, 0))?;
    let p = (a / t as f64).min(1.0);
    let initial = seed_infection(t, p, RngStream::new(seed, 1))?;
    let res = run(&graph, r, &initial)?;
    Ok(TrialResult {
        t,
        m: params.m(),
        delta: params.delta(),
        r,
        a,
        lambda,
        trial,
        seed,
        i0: res.initial,
        i_f: res.final_count,
        rounds: res.rounds,
        full: res.full,
        wall_ms: Some(start.elapsed().as_secs_f64() * 1e3),
    })
}

/// All trials of all sweep points, in `(point, trial)` order regardless of
/// scheduling. Runs on the current rayon pool.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let points = config.points();
    let tasks: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|p| (0..config.trials).map(move |k| (p, k)))
        .collect();
    tasks
        .into_par_iter()
        .map(|(p, k)| {
            let (lambda, a) = points[p];
            let seed = trial_seed(config.base_seed, p, k);
            let mut row = run_trial(config.params, config.t, config.r, a, lambda, k, seed)?;
            if !config.timing {
                row.wall_ms = None;
            }
            Ok(row)
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[TrialResult], timing: bool, mut out: W) -> Result<()> {
    if timing {
        writeln!(out, "{SWEEP_HEADER},{TIMING_COLUMN}")?;
    } else {
        writeln!(out, "{SWEEP_HEADER}")?;
    }
    for row in rows {
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            row.t,
            row.m,
            row.delta,
            row.r,
            row.a,
            row.lambda,
            row.trial,
            row.seed,
            row.i0,
            row.i_f,
            row.rounds,
            u8::from(row.full)
        )?;
        if timing {
            write!(out, ",{:.3}", row.wall_ms.unwrap_or(0.0))?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize, delta: f64) -> Params {
        Params::new(m, delta).unwrap()
    }

    #[test]
    fn omega_parsing() {
        assert_eq!("log".parse::<Omega>().unwrap(), Omega::LogPower(1));
        assert_eq!("log^2".parse::<Omega>().unwrap(), Omega::LogPower(2));
        assert_eq!("3.5".parse::<Omega>().unwrap(), Omega::Value(3.5));
        assert!("-1".parse::<Omega>().is_err());
        assert!("zero".parse::<Omega>().is_err());
        assert!((Omega::LogPower(2).at(100) - 100f64.ln().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn preset_hypotheses() {
        let p3 = params(3, 0.0);
        assert!(SweepConfig::preset(Preset::Supercritical, 1000, p3, 2, 1, 0).is_ok());
        assert!(SweepConfig::preset(Preset::Supercritical, 1000, p3, 3, 1, 0).is_err());
        assert!(SweepConfig::preset(Preset::SubcriticalI, 1000, p3, 3, 1, 0).is_ok());
        assert!(SweepConfig::preset(Preset::SubcriticalI, 1000, p3, 2, 1, 0).is_err());
        assert!(SweepConfig::preset(Preset::SubcriticalII, 1000, params(4, 0.0), 3, 1, 0).is_ok());
        assert!(SweepConfig::preset(Preset::SubcriticalII, 1000, p3, 2, 1, 0).is_err());
        assert!(SweepConfig::preset(Preset::SubcriticalIII, 1000, p3, 2, 1, 0).is_ok());
        assert!(SweepConfig::preset(Preset::SubcriticalIII, 1000, p3, 3, 1, 0).is_err());
        assert!(SweepConfig::preset(Preset::Critical, 1000, params(4, 0.0), 3, 1, 0).is_ok());
        assert!(SweepConfig::preset(Preset::Critical, 1000, p3, 2, 1, 0).is_err());
        assert!(SweepConfig::preset(Preset::LambdaGrid, 1000, p3, 2, 1, 0).is_ok());
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
    }

    #[test]
    fn zero_trials_is_config_error() {
        let res = SweepConfig::new(100, params(2, 0.0), 2, SeedingRule::Lambda(vec![1.0]), 0, 0);
        assert!(matches!(res, Err(Error::Config(_))));
        let res = SweepConfig::new(100, params(2, 0.0), 2, SeedingRule::Lambda(vec![-1.0]), 1, 0);
        assert!(matches!(res, Err(Error::Config(_))));
    }

    #[test]
    fn sweep_is_reproducible_and_ordered() {
        let cfg = SweepConfig::new(2000, params(2, 0.0), 2, SeedingRule::Lambda(vec![1.0, 5.0]), 4, 11).unwrap();
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a, b);
        let order: Vec<(f64, u64)> = a.iter().map(|r| (r.lambda, r.trial)).collect();
        assert_eq!(order, vec![(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3), (5.0, 0), (5.0, 1), (5.0, 2), (5.0, 3)]);
        let mut csv = Vec::new();
        write_sweep_csv(&a, false, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with(&format!("{SWEEP_HEADER}\n")));
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 9);
    }

    #[test]
    fn trial_rows_are_consistent() {
        let row = run_trial(params(3, 0.0), 3000, 2, 300.0, 1.0, 0, 5).unwrap();
        assert!(row.i_f >= row.i0);
        assert_eq!(row.full, row.i_f == 3000);
        assert!(row.rounds as usize <= 3000);
    }
}
