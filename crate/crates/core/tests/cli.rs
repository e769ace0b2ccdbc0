use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pa_bootstrap::experiments::{read_sweep_csv, SWEEP_HEADER};
use pa_bootstrap::graph::read_graph;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pa-bootstrap"))
        .args(args)
        .env_remove("PA_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = cli(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_writes_a_readable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.txt");
    ok(&["--seed", "4", "--out", path_str(&file), "generate", "--t", "300", "--m", "3", "--delta", "-1.5"]);
    let g = read_graph(fs::read_to_string(&file).unwrap().as_bytes()).unwrap();
    assert_eq!((g.t(), g.params().m()), (300, 3));
    let again = ok(&["--seed", "4", "generate", "--t", "300", "--m", "3", "--delta", "-1.5"]);
    assert_eq!(again, fs::read_to_string(&file).unwrap());
    let collapsed = ok(&["generate", "--t", "50", "--m", "2", "--construction", "collapse"]);
    assert!(collapsed.starts_with("pa-graph v1 t=50 m=2"));
}

#[test]
fn percolate_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let seeds = dir.path().join("seeds.txt");
    fs::write(&graph, "pa-graph v1 t=3 m=1 delta=0\n1 1\n2 1\n3 1\n").unwrap();
    fs::write(&seeds, "# initial\n1\n").unwrap();
    let text = ok(&["percolate", "--graph", path_str(&graph), "--initial", path_str(&seeds), "--r", "2"]);
    assert_eq!(text, "t,m,delta,r,i0,if,rounds,full\n3,1,0,2,1,1,0,0\n");
    let trace = ok(&["percolate", "--graph", path_str(&graph), "--initial", path_str(&seeds), "--trace"]);
    assert_eq!(trace, "vertex,round\n1,0\n");
}

#[test]
fn sweep_then_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    ok(&["--out", path_str(&csv), "sweep", "--t", "2000", "--m", "3", "--r", "2", "--lambda", "0.5,4", "--trials", "6"]);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with(&format!("{SWEEP_HEADER}\n")));
    assert!(!text.contains('\r'));
    assert_eq!(read_sweep_csv(text.as_bytes()).unwrap().len(), 12);
    let summary = ok(&["summarize", "--input", path_str(&csv)]);
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn threads_do_not_change_output() {
    let args = ["sweep", "--preset", "critical", "--t", "3000", "--m", "4", "--r", "3", "--trials", "8"];
    let one = ok(&[&["--threads", "1"], &args[..]].concat());
    let four = ok(&[&["--threads", "4"], &args[..]].concat());
    assert_eq!(one, four);
    let via_env = Command::new(env!("CARGO_BIN_EXE_pa-bootstrap")).args(args).env("PA_THREADS", "2").output().unwrap();
    assert_eq!(String::from_utf8(via_env.stdout).unwrap(), one);
}

#[test]
fn config_file_with_cli_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sweep settings\nt = 1500\nm = 3\nr = 2\nlambda = 1\ntrials = 2\nseed = 3\n").unwrap();
    let from_file = ok(&["--config", path_str(&cfg), "sweep"]);
    let explicit = ok(&["--seed", "3", "sweep", "--t", "1500", "--m", "3", "--r", "2", "--lambda", "1", "--trials", "2"]);
    assert_eq!(from_file, explicit);
    let overridden = ok(&["--config", path_str(&cfg), "sweep", "--trials", "3"]);
    assert_eq!(overridden.lines().count(), 4);
}

#[test]
fn errors_exit_nonzero() {
    let bad_preset = cli(&["sweep", "--preset", "supercritical", "--m", "2", "--r", "3"]);
    assert!(!bad_preset.status.success());
    assert!(String::from_utf8_lossy(&bad_preset.stderr).contains("config error"));
    let zero_trials = cli(&["sweep", "--lambda", "1", "--trials", "0"]);
    assert!(!zero_trials.status.success());
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "t,m\n1,2\n").unwrap();
    assert!(!cli(&["summarize", "--input", path_str(&bad)]).status.success());
    let unwritable = cli(&["--out", "/nonexistent/dir/x.csv", "generate", "--t", "5"]);
    assert!(!unwritable.status.success());
}

#[test]
fn analysis_subcommands_emit_csv() {
    let urn = ok(&["urn-check", "--i", "2", "--m", "1", "--a", "1", "--n", "3"]);
    assert!(urn.starts_with("d,pmf,pmf_bruteforce\n"));
    assert_eq!(urn.lines().count(), 5);
    let coupling = ok(&["urn-check", "--samples", "20000"]);
    assert!(coupling.starts_with("n,a,samples,tv_distance,status\n"));
    let census = ok(&["census", "--t", "500", "--k", "3"]);
    assert!(census.starts_with("self_loops,multi_loop_vertices,parallel_pairs,c2,c3\n"));
    let deg = ok(&["degree-stats", "--t", "500"]);
    assert!(deg.starts_with("degree,count,ccdf\n"));
    let wit = ok(&["witness-count", "--t", "500", "--p", "0.1"]);
    assert!(wit.starts_with("vertex,round,depth1_trees\n"));
    let weight = ok(&["weight-fn", "--all-up", "1", "--t", "50"]);
    assert_eq!(weight.lines().count(), 51);
    let bound = ok(&["weight-fn", "--all-up", "1", "--t", "500", "--bound"]);
    assert!(bound.lines().nth(1).unwrap().ends_with(",true"));
    let fit = ok(&["scaling-fit", "--t", "2000", "--probes", "2,4,8,16", "--trials", "5"]);
    assert!(fit.starts_with("i,t_over_i,mean_degree\n"));
    let pre = ok(&["prefix-sums", "--t", "500", "--trials", "5"]);
    assert!(pre.starts_with("i,t,trials,mean,p01\n"));
    let joint = ok(&["joint-edges", "--m", "1", "--js", "2", "--t-small", "2", "--samples", "1000"]);
    assert!(joint.starts_with("i,js,samples,hits"));
    let core = ok(&["core-check", "--t", "500", "--p", "1"]);
    assert_eq!(core.lines().nth(1).unwrap(), "10,2,1,1");
}

#[test]
fn witness_structure_of_a_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("tri.txt");
    let seeds = dir.path().join("seeds.txt");
    fs::write(&graph, "pa-graph v1 t=3 m=2 delta=0\n1 1\n1 1\n2 1\n2 2\n3 1\n3 2\n").unwrap();
    fs::write(&seeds, "2\n3\n").unwrap();
    let text = ok(&["witness-count", "--graph", path_str(&graph), "--initial", path_str(&seeds), "--vertex", "1"]);
    assert_eq!(text, "parent,child,parent_depth,child_depth\n1,2,0,1\n1,3,0,1\n");
}
