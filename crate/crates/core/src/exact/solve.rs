use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::ball::verify_krho;
use crate::error::{Error, Result};
use crate::exact::ilp::{IlpModel, VarKind};
use crate::exact::lp::write_lp;
use crate::graph::WeightedGraph;
use crate::shortcut::{apply_shortcuts, ShortcutSet};

const POLL: Duration = Duration::from_millis(5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Optimal,
    Timeout,
    Infeasible,
    SolverError,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub objective: Option<u64>,
    #[serde(skip)]
    pub shortcuts: Option<ShortcutSet>,
    /// Seconds from launch to exit or kill.
    pub wall_time: f64,
    /// Solver diagnostics for non-optimal outcomes.
    pub message: Option<String>,
    /// Variable values as reported; empty unless optimal.
    #[serde(skip)]
    pub values: BTreeMap<String, f64>,
}

impl SolveOutcome {
    fn failed(status: SolveStatus, wall_time: f64, message: impl Into<String>) -> Self {
        SolveOutcome {
            status,
            objective: None,
            shortcuts: None,
            wall_time,
            message: Some(message.into()),
            values: BTreeMap::new(),
        }
    }

    /// Relaxation variables at 1 for source `s`.
    pub fn relaxed_count(&self, s: usize) -> usize {
        let prefix = format!("u_s{s}_e");
        self.values
            .iter()
            .filter(|(k, &v)| k.starts_with(&prefix) && v >= 0.5)
            .count()
    }
}

enum Parsed {
    Values(BTreeMap<String, f64>),
    Infeasible,
    Timeout,
}

/// Reads `<name> <value>` lines; `#` and `%` start comments. A comment naming an infeasible or
/// time-limited status overrides the values.
fn parse_solution(text: &str) -> std::result::Result<Parsed, String> {
    let mut values = BTreeMap::new();
    let mut status = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#').or_else(|| line.strip_prefix('%')) {
            let c = comment.to_ascii_lowercase().replace([' ', '_', '-'], "");
            if c.contains("infeasible") {
                status = Some(Parsed::Infeasible);
            } else if c.contains("timelimit") || c.contains("timeout") {
                status = Some(Parsed::Timeout);
            }
            continue;
        }
        let body = line.split(['#', '%']).next().unwrap_or("");
        let mut it = body.split(|c: char| c.is_whitespace() || c == '=').filter(|t| !t.is_empty());
        let (Some(name), Some(value), None) = (it.next(), it.next(), it.next()) else {
            return Err(format!("line {}: expected '<name> <value>'", i + 1));
        };
        let value: f64 = value
            .parse()
            .map_err(|_| format!("line {}: bad value '{value}'", i + 1))?;
        values.insert(name.to_string(), value);
    }
    Ok(status.unwrap_or(Parsed::Values(values)))
}

fn fill(template: &str, lp: &Path, sol: &Path, timeout_s: f64) -> String {
    template
        .replace("{lp}", &lp.display().to_string())
        .replace("{sol}", &sol.display().to_string())
        .replace("{timeout}", &format!("{}", timeout_s.ceil() as u64))
}

/// Writes `model` as LP, runs `solver_cmd` through `sh`, and decodes the solution.
///
/// The template may use `{lp}`, `{sol}` and `{timeout}`. The solver must write `<name> <value>`
/// lines to `{sol}`. The process is killed once `timeout_s` seconds of wall time have passed.
/// An optimal answer is accepted only if the decoded shortcuts make `g` a (k, ρ)-graph.
pub fn solve_external(
    g: &WeightedGraph,
    model: &IlpModel,
    solver_cmd: &str,
    timeout_s: f64,
) -> Result<SolveOutcome> {
    if model.n != g.node_count() {
        return Err(Error::param("model was built for a different graph"));
    }
    if !solver_cmd.contains("{lp}") || !solver_cmd.contains("{sol}") {
        return Err(Error::param(
            "solver command needs {lp} and {sol} placeholders",
        ));
    }
    if timeout_s <= 0.0 {
        return Ok(SolveOutcome::failed(SolveStatus::Timeout, 0.0, "timeout of 0 s"));
    }
    let dir = tempfile::tempdir()?;
    let lp = dir.path().join("model.lp");
    let sol = dir.path().join("model.sol");
    let log_path = dir.path().join("solver.log");
    write_lp(model, &lp)?;
    let cmd = fill(solver_cmd, &lp, &sol, timeout_s);
    log::debug!("launching solver: {cmd}");

    let log_file = File::create(&log_path)?;
    let start = Instant::now();
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(format!("exec {cmd}"))
        .stdin(Stdio::null())
        .stdout(log_file.try_clone()?)
        .stderr(log_file)
        .spawn()?;
    let deadline = Duration::from_secs_f64(timeout_s);
    let exit = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if start.elapsed() >= deadline {
            child.kill().ok();
            child.wait().ok();
            let wall = start.elapsed().as_secs_f64();
            return Ok(SolveOutcome::failed(
                SolveStatus::Timeout,
                wall,
                format!("killed after {timeout_s} s"),
            ));
        }
        std::thread::sleep(POLL);
    };
    let wall = start.elapsed().as_secs_f64();
    let tail = || {
        let log = std::fs::read_to_string(&log_path).unwrap_or_default();
        let lines: Vec<&str> = log.lines().collect();
        lines[lines.len().saturating_sub(5)..].join("\n")
    };

    let text = match std::fs::read_to_string(&sol) {
        Ok(t) => t,
        Err(_) => {
            return Ok(SolveOutcome::failed(
                SolveStatus::SolverError,
                wall,
                format!("no solution file (exit {exit}): {}", tail()),
            ))
        }
    };
    let values = match parse_solution(&text) {
        Ok(Parsed::Values(v)) => v,
        Ok(Parsed::Infeasible) => {
            return Ok(SolveOutcome::failed(SolveStatus::Infeasible, wall, "solver reported infeasible"))
        }
        Ok(Parsed::Timeout) => {
            return Ok(SolveOutcome::failed(SolveStatus::Timeout, wall, "solver hit its time limit"))
        }
        Err(msg) => return Ok(SolveOutcome::failed(SolveStatus::SolverError, wall, msg)),
    };
    if !exit.success() {
        return Ok(SolveOutcome::failed(
            SolveStatus::SolverError,
            wall,
            format!("solver exited with {exit}: {}", tail()),
        ));
    }

    let mut shortcuts = ShortcutSet::for_graph(g);
    let mut objective = 0u64;
    for idx in model.objective() {
        let VarKind::Shortcut { u, v } = model.vars[idx] else {
            continue;
        };
        if values.get(&model.vars[idx].name()).is_some_and(|&x| x >= 0.5) {
            objective += 1;
            shortcuts.insert(u, v, model.shortcut_weights[&idx]);
        }
    }
    let valid = apply_shortcuts(g, &shortcuts)
        .and_then(|h| verify_krho(&h, model.k, model.rho))
        .map(|r| r.is_empty());
    match valid {
        Ok(true) => Ok(SolveOutcome {
            status: SolveStatus::Optimal,
            objective: Some(objective),
            shortcuts: Some(shortcuts),
            wall_time: wall,
            message: None,
            values,
        }),
        Ok(false) => Ok(SolveOutcome::failed(
            SolveStatus::SolverError,
            wall,
            "decoded shortcuts do not yield a (k, rho)-graph",
        )),
        Err(e) => Ok(SolveOutcome::failed(
            SolveStatus::SolverError,
            wall,
            format!("decoded shortcuts are invalid: {e}"),
        )),
    }
}
