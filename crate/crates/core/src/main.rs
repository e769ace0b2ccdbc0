use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pa_bootstrap::analytics::{
    core_round1_check, estimate_power_law_exponent, gamma_scaling_fit, joint_edge_prob_mc,
    prefix_sum_concentration, structure_census, DegreeStats,
};
use pa_bootstrap::experiments::{
    config_to_args, parse_config_file, read_sweep_csv, run_sweep, summarize, write_summary_csv,
    write_sweep_csv, Omega, Preset, SeedingRule, SweepConfig,
};
use pa_bootstrap::graph::{collapse, grow_pa1, grow_pam_direct_with, read_graph, write_graph, SamplerKind};
use pa_bootstrap::percolation::{read_initial_set, run, seed_infection, NEVER};
use pa_bootstrap::urns::{coupling_check, urn_pmf, urn_pmf_bruteforce};
use pa_bootstrap::witness::{bound_check, count_depth1_witness_trees, find_witness_structure, weight_f, write_weight_csv, WitnessTreeSpec};
use pa_bootstrap::{thresholds, Error, PaGraph, Params, Result, RngStream, Urn};

#[derive(Parser, Debug)]
#[command(name = "pa-bootstrap", version, about = "Bootstrap percolation on preferential-attachment graphs")]
#[command(args_override_self = true)]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "PA_THREADS", default_value_t = 0)]
    threads: usize,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grow a PA_t(m, δ) graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Run bootstrap percolation on a graph.
    Percolate(PercolateArgs),
    /// Phase-transition sweep, one CSV row per trial.
    Sweep(SweepArgs),
    /// Per-point summary of a sweep CSV.
    Summarize(SummarizeArgs),
    /// Urn pmf table, or the empirical coupling check.
    UrnCheck(UrnArgs),
    /// Degree histogram and power-law exponent.
    DegreeStats(DegreeArgs),
    /// Depth-1 witness tree counts, or one witness structure.
    WitnessCount(WitnessArgs),
    /// Weight function f_0 of a witness tree spec.
    WeightFn(WeightArgs),
    /// Self-loops, parallel edges and short cycles.
    Census(CensusArgs),
    /// Fit of log E[D_i(t)] against log(t/i).
    ScalingFit(ScalingArgs),
    /// Concentration of the prefix degree sum S_i(t).
    PrefixSums(PrefixArgs),
    /// Monte-Carlo probability that i receives edges from every j.
    JointEdges(JointArgs),
    /// Fraction of the oldest vertices infected after one round.
    CoreCheck(CoreArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long, default_value_t = 1000)]
    t: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<Params> {
        Params::new(self.m, self.delta)
    }
}

#[derive(Args, Debug, Clone)]
struct GraphSource {
    /// Read the graph from a file instead of growing one.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

impl GraphSource {
    fn load(&self, seed: u64) -> Result<PaGraph> {
        match &self.graph {
            Some(path) => read_graph(BufReader::new(File::open(path)?)),
            None => grow_pam_direct_with(SamplerKind::Fenwick, self.model.t, self.model.params()?, RngStream::new(seed, 0)),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Construction {
    Direct,
    Collapse,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Sampler {
    Fenwick,
    Naive,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum, default_value_t = Construction::Direct)]
    construction: Construction,
    #[arg(long, value_enum, default_value_t = Sampler::Fenwick)]
    sampler: Sampler,
}

#[derive(Args, Debug)]
struct Seeds {
    /// Infect each vertex independently with this probability.
    #[arg(long, conflicts_with = "initial")]
    p: Option<f64>,
    /// File listing the initially infected vertices.
    #[arg(long)]
    initial: Option<PathBuf>,
}

impl Seeds {
    fn resolve(&self, t: usize, seed: u64) -> Result<Vec<usize>> {
        match (&self.initial, self.p) {
            (Some(path), _) => read_initial_set(BufReader::new(File::open(path)?), t),
            (None, Some(p)) => seed_infection(t, p, RngStream::new(seed, 1)),
            (None, None) => Err(Error::Config("give --p or --initial".into())),
        }
    }
}

#[derive(Args, Debug)]
struct PercolateArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[command(flatten)]
    seeds: Seeds,
    /// Write `vertex,round` for every infected vertex instead of the summary.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 10)]
    trials: u64,
    /// Named preset; pins the hypotheses and the default seeding rule.
    #[arg(long)]
    preset: Option<Preset>,
    /// Comma-separated λ grid for a = λ·a_c.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["above", "below"])]
    lambda: Vec<f64>,
    /// a = ω·a_c; ω is a number, `log` or `log^k`.
    #[arg(long, conflicts_with = "below")]
    above: Option<Omega>,
    /// a = a_c/ω.
    #[arg(long)]
    below: Option<Omega>,
    /// Append a wall-time column.
    #[arg(long)]
    timing: bool,
}

impl SweepArgs {
    fn config(&self, seed: u64) -> Result<SweepConfig> {
        let params = self.model.params()?;
        let explicit = if !self.lambda.is_empty() {
            Some(SeedingRule::Lambda(self.lambda.clone()))
        } else if let Some(w) = self.above {
            Some(SeedingRule::Above(w))
        } else {
            self.below.map(SeedingRule::Below)
        };
        let mut cfg = match (self.preset, explicit) {
            (Some(p), None) => SweepConfig::preset(p, self.model.t, params, self.r, self.trials, seed)?,
            (preset, Some(rule)) => {
                let mut cfg = SweepConfig::new(self.model.t, params, self.r, rule, self.trials, seed)?;
                cfg.preset = preset;
                cfg.validate()?;
                cfg
            }
            (None, None) => return Err(Error::Config("give --preset or a seeding rule".into())),
        };
        cfg.timing = self.timing;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct SummarizeArgs {
    /// Sweep CSV to summarize.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct UrnArgs {
    #[arg(long, default_value_t = 2)]
    i: usize,
    #[arg(long, default_value_t = 10)]
    t: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Print the pmf over d for this initial degree instead of sampling.
    #[arg(long, requires = "n")]
    a: Option<usize>,
    /// Number of draws for the pmf table.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct DegreeArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = thresholds::DEFAULT_DMIN)]
    dmin: u64,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[command(flatten)]
    seeds: Seeds,
    /// Emit the witness structure of this vertex.
    #[arg(long)]
    vertex: Option<usize>,
}

#[derive(Args, Debug)]
struct WeightArgs {
    /// Tree spec file (`id parent up|down childcount valuation` per line).
    #[arg(long, conflicts_with = "all_up")]
    tree: Option<PathBuf>,
    /// Use the all-up tree of this depth.
    #[arg(long)]
    all_up: Option<usize>,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 100_000)]
    t: usize,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// ω as a number, `log` or `log^k` (evaluated at t).
    #[arg(long, default_value = "log")]
    omega: Omega,
    /// Report the bound check instead of f_0.
    #[arg(long)]
    bound: bool,
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Longest cycle length counted.
    #[arg(long, default_value_t = 4)]
    k: usize,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32, 64, 128])]
    probes: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    trials: u64,
}

#[derive(Args, Debug)]
struct PrefixArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 10)]
    i: usize,
    #[arg(long, default_value_t = 100)]
    trials: u64,
}

#[derive(Args, Debug)]
struct JointArgs {
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
    #[arg(long, default_value_t = 1)]
    i: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    js: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    t_small: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
}

#[derive(Args, Debug)]
struct CoreArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 10)]
    kappa: usize,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Index of the subcommand token in `argv`, skipping global options.
fn subcommand_index(argv: &[String]) -> Option<usize> {
    let mut k = 1;
    while k < argv.len() {
        let a = &argv[k];
        if !a.starts_with('-') {
            return Some(k);
        }
        if matches!(a.as_str(), "--seed" | "--threads" | "--out" | "--config") {
            k += 1;
        }
        k += 1;
    }
    None
}

fn config_path(argv: &[String]) -> Option<String> {
    argv.iter().enumerate().find_map(|(k, a)| {
        if a == "--config" {
            argv.get(k + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    })
}

/// Rebuilds argv as `prog sub <config args> <command-line args>` so that
/// the command line wins.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
    let extra = config_to_args(&parse_config_file(&text)?);
    let Some(sub) = subcommand_index(&argv) else {
        return Ok(argv);
    };
    let mut out = vec![argv[0].clone(), argv[sub].clone()];
    out.extend(extra);
    out.extend(argv.iter().enumerate().skip(1).filter(|&(k, _)| k != sub).map(|(_, a)| a.clone()));
    Ok(out)
}

fn execute(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    let mut out = output(&cli.out)?;
    match cli.command {
        Command::Generate(a) => {
            let params = a.model.params()?;
            let stream = RngStream::new(seed, 0);
            let graph = match a.construction {
                Construction::Direct => {
                    let kind = match a.sampler {
                        Sampler::Fenwick => SamplerKind::Fenwick,
                        Sampler::Naive => SamplerKind::Naive,
                    };
                    grow_pam_direct_with(kind, a.model.t, params, stream)?
                }
                Construction::Collapse => {
                    let pa1 = grow_pa1(a.model.t * a.model.m, a.model.delta / a.model.m as f64, stream)?;
                    collapse(&pa1, a.model.m)?
                }
            };
            write_graph(&graph, &mut out)?;
        }
        Command::Percolate(a) => {
            let graph = a.source.load(seed)?;
            let initial = a.seeds.resolve(graph.t(), seed)?;
            let res = run(graph.graph(), a.r, &initial)?;
            if a.trace {
                writeln!(out, "vertex,round")?;
                for v in 1..=graph.t() {
                    let round = res.state.round_infected(v);
                    if round != NEVER {
                        writeln!(out, "{v},{round}")?;
                    }
                }
            } else {
                let p = graph.params();
                writeln!(out, "t,m,delta,r,i0,if,rounds,full")?;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    graph.t(),
                    p.m(),
                    p.delta(),
                    a.r,
                    res.initial,
                    res.final_count,
                    res.rounds,
                    u8::from(res.full)
                )?;
            }
        }
        Command::Sweep(a) => {
            let cfg = a.config(seed)?;
            let rows = run_sweep(&cfg)?;
            write_sweep_csv(&rows, cfg.timing, &mut out)?;
        }
        Command::Summarize(a) => {
            let rows = read_sweep_csv(BufReader::new(File::open(&a.input)?))?;
            write_summary_csv(&summarize(&rows), &mut out)?;
        }
        Command::UrnCheck(a) => {
            let params = Params::new(a.m, a.delta)?;
            if let (Some(init), Some(n)) = (a.a, a.n) {
                let spec = Urn::new(a.i, a.m, a.delta, init)?;
                writeln!(out, "d,pmf,pmf_bruteforce")?;
                for d in 0..=n {
                    let brute = if n <= pa_bootstrap::urns::BRUTEFORCE_MAX_N {
                        urn_pmf_bruteforce(&spec, n, d)?.to_string()
                    } else {
                        String::new()
                    };
                    writeln!(out, "{d},{},{brute}", urn_pmf(&spec, n, d)?)?;
                }
            } else {
                let report = coupling_check(params, a.i, a.t, a.samples, RngStream::new(seed, 0))?;
                report.write_csv(&mut out)?;
                if let Some(tv) = report.max_tv() {
                    eprintln!("max tv over {} qualified bins: {tv:.5}", report.qualified_bins());
                }
            }
        }
        Command::DegreeStats(a) => {
            let graph = a.source.load(seed)?;
            let stats = DegreeStats::from_graph(graph.graph(), graph.params().m(), &[])?;
            stats.write_csv(&mut out)?;
            match estimate_power_law_exponent(&stats, a.dmin) {
                Ok(tau) => eprintln!(
                    "exponent estimate {tau:.4} (model value {:.4})",
                    graph.params().degree_exponent()
                ),
                Err(e) => eprintln!("exponent: {e}"),
            }
        }
        Command::WitnessCount(a) => {
            let graph = a.source.load(seed)?;
            let initial = a.seeds.resolve(graph.t(), seed)?;
            let res = run(graph.graph(), a.r, &initial)?;
            match a.vertex {
                Some(v) => {
                    let ws = find_witness_structure(graph.graph(), &res, v)?;
                    ws.validate(graph.graph(), &res)?;
                    writeln!(out, "parent,child,parent_depth,child_depth")?;
                    for &(x, y) in &ws.edges {
                        writeln!(out, "{x},{y},{},{}", ws.depth[&x], ws.depth[&y])?;
                    }
                }
                None => {
                    let mut infected = vec![false; graph.t() + 1];
                    for &v in &initial {
                        infected[v] = true;
                    }
                    let counts = count_depth1_witness_trees(graph.graph(), &infected, a.r);
                    writeln!(out, "vertex,round,depth1_trees")?;
                    for v in 1..=graph.t() {
                        let round = res.state.round_infected(v);
                        if counts[v] > 0 || round != NEVER {
                            let round = if round == NEVER { String::new() } else { round.to_string() };
                            writeln!(out, "{v},{round},{}", counts[v])?;
                        }
                    }
                }
            }
        }
        Command::WeightFn(a) => {
            let spec = match (&a.tree, a.all_up) {
                (Some(path), _) => WitnessTreeSpec::parse(&std::fs::read_to_string(path)?, a.r)?,
                (None, Some(depth)) => WitnessTreeSpec::all_up(a.r, depth)?,
                (None, None) => return Err(Error::Config("give --tree or --all-up".into())),
            };
            let omega = a.omega.at(a.t);
            if a.bound {
                let rep = bound_check(&spec, a.t, omega, a.gamma)?;
                writeln!(out, "y0,rho,leaves,max_ratio,argmax,ratio_1,ratio_t,head_max,tail_max,bounded")?;
                writeln!(
                    out,
                    "{},{},{},{:e},{},{:e},{:e},{:e},{:e},{}",
                    rep.y0,
                    rep.ledger.rho,
                    rep.ledger.leaves,
                    rep.max_ratio,
                    rep.argmax,
                    rep.ratio_at(1),
                    rep.ratio_at(a.t),
                    rep.head_max,
                    rep.tail_max,
                    rep.bounded(thresholds::BOUND_RATIO_FACTOR)
                )?;
            } else {
                write_weight_csv(&weight_f(&spec, a.t, omega, a.gamma)?, &mut out)?;
            }
        }
        Command::Census(a) => {
            let graph = a.source.load(seed)?;
            structure_census(graph.graph(), a.k)?.write_csv(&mut out)?;
        }
        Command::ScalingFit(a) => {
            let fit = gamma_scaling_fit(a.model.params()?, a.model.t, &a.probes, a.trials, RngStream::new(seed, 0))?;
            fit.write_csv(a.model.t, &mut out)?;
            eprintln!("slope {:.4} (gamma {:.4})", fit.slope, a.model.params()?.gamma());
        }
        Command::PrefixSums(a) => {
            prefix_sum_concentration(a.model.params()?, a.i, a.model.t, a.trials, RngStream::new(seed, 0))?
                .write_csv(&mut out)?;
        }
        Command::JointEdges(a) => {
            let params = Params::new(a.m, a.delta)?;
            joint_edge_prob_mc(params, a.i, &a.js, a.t_small, a.samples, RngStream::new(seed, 0))?.write_csv(&mut out)?;
        }
        Command::CoreCheck(a) => {
            let graph = a.source.load(seed)?;
            let frac = core_round1_check(graph.graph(), a.r, a.p, RngStream::new(seed, 1), a.kappa)?;
            writeln!(out, "kappa,r,p,fraction")?;
            writeln!(out, "{},{},{},{frac}", a.kappa, a.r, a.p)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| execute(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
