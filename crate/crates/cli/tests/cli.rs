//! End-to-end checks of the `krho` binary: exit codes, pipes and file formats.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const K4: &str = "4 6 undirected unit\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";
const P5: &str = "5 4 undirected unit\n0 1\n1 2\n2 3\n3 4\n";

fn krho(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_krho"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(text) = stdin {
        pipe.write_all(text.as_bytes()).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn complete_graph_verifies() {
    let o = krho(&["verify", "-", "--k", "1", "--rho", "3"], Some(K4));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "OK");
}

#[test]
fn path_reports_its_violators() {
    let o = krho(&["verify", "--k", "2", "--rho", "3"], Some(P5));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).trim(), "0 4");
}

#[test]
fn shortcuts_pipe_into_verify() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "p5.txt", P5);
    let s = krho(&["shortcut", &graph, "--algo", "dp", "--k", "2", "--rho", "n-1"], None);
    assert_eq!(s.status.code(), Some(0));
    let lines = stdout(&s);
    assert!(!lines.trim().is_empty());
    let v = krho(&["verify", &graph, "--k", "2", "--rho", "4", "--shortcuts", "-"], Some(&lines));
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn shortcut_summary_is_json() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "p5.txt", P5);
    let summary = dir.path().join("s.json");
    let o = krho(
        &["shortcut", &graph, "--algo", "greedy", "--k", "2", "--rho", "4", "--summary", summary.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(v["size"], 3);
    assert_eq!(v["k"], 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(krho(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(krho(&["verify", "--k", "2"], Some(P5)).status.code(), Some(1));
    let bad = krho(&["verify", "--k", "2", "--rho", "3"], Some("not a graph\n"));
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn matrix_market_input() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = "%%MatrixMarket matrix coordinate pattern symmetric\n5 5 4\n2 1\n3 2\n4 3\n5 4\n";
    let graph = write(dir.path(), "p5.mtx", mtx);
    let o = krho(&["verify", &graph, "--k", "2", "--rho", "3"], None);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).trim(), "0 4");
}

#[test]
fn solver_timeout_exits_three() {
    let o = krho(
        &["exact", "--k", "2", "--rho", "4", "--solver-cmd", "sleep 5 # {lp} {sol}", "--timeout", "0.2"],
        Some(P5),
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn exact_backends_agree_on_a_path() {
    let brute = krho(&["exact", "--backend", "bruteforce", "--k", "2", "--rho", "4"], Some(P5));
    let ilp = krho(&["exact", "--k", "2", "--rho", "4", "--timeout", "60"], Some(P5));
    assert_eq!(brute.status.code(), Some(0));
    assert_eq!(ilp.status.code(), Some(0));
    assert_eq!(stdout(&brute).lines().count(), 2);
    assert_eq!(stdout(&ilp).lines().count(), 2);
    let lp = krho(&["exact", "--backend", "lp-only", "--k", "2", "--rho", "4"], Some(P5));
    assert!(stdout(&lp).contains("Subject To"));
}

#[test]
fn lower_bound_sidecar_records_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lb.txt");
    let o = krho(&["gen", "lb-star", "--n", "5", "-o", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("lb.txt.json")).unwrap()).unwrap();
    assert_eq!(side["model"], "lb-star");
    assert_eq!(side["k"], 3);
    assert!(side["rho"].as_u64().unwrap() > 0);
    let graph = std::fs::read_to_string(&out).unwrap();
    assert!(graph.lines().count() as u64 > side["m"].as_u64().unwrap());
}

#[test]
fn generation_is_seeded() {
    let args = |seed: &'static str| ["--seed", seed, "gen", "gilbert", "--n", "30", "--p", "0.2"];
    assert_eq!(stdout(&krho(&args("5"), None)), stdout(&krho(&args("5"), None)));
    assert_ne!(stdout(&krho(&args("5"), None)), stdout(&krho(&args("6"), None)));
}

#[test]
fn experiment_writes_the_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"generator": {"model": "gilbert", "n": [12], "c": 3.0},
        "algorithms": ["greedy", "dp"], "k": [2], "rho": ["n/2"], "seeds": 2}"#;
    let spec = write(dir.path(), "spec.json", spec);
    let run = || krho(&["--deterministic", "experiment", "--spec", &spec], None);
    let o = run();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "model,n,m,k,rho,algo,seed,shortcut_count,millis,status,sigma,blowup");
    assert_eq!(lines.count(), 4);
    assert_eq!(stdout(&run()), csv);
}
