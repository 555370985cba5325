use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::verify_krho;
use crate::error::{Error, Result};
use crate::exact::{brute_force_msp, build_ilp, solve_external, SolveStatus, Variant};
use crate::generators::{
    gen_gilbert, gen_hyperbolic, gen_mc_powerlaw, lowerbound_star, vc_to_msp_transform, WeightMode,
};
use crate::graph::{NodeId, WeightedGraph};
use crate::harness::load_graph;
use crate::harness::rules::RhoRule;
use crate::heuristics::{self, Algorithm, HeuristicOptions};
use crate::io::GraphFormat;
use crate::shortcut::{apply_shortcuts, ShortcutSet};

/// Where instances come from. Every variant with `n` sweeps over the listed sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// `𝒢(n, p)` with `p = p` or `p = c / n`.
    Gilbert {
        n: Vec<usize>,
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        c: Option<f64>,
        #[serde(default)]
        weights: WeightMode,
    },
    Hyperbolic {
        n: Vec<usize>,
        #[serde(default = "default_avg_deg")]
        avg_deg: f64,
        #[serde(default = "default_gamma_pl")]
        gamma: f64,
    },
    McPowerlaw {
        n: Vec<usize>,
        #[serde(default = "default_gamma_pl")]
        gamma: f64,
        #[serde(default = "default_swaps")]
        swaps_per_edge: usize,
    },
    /// The lower-bound star; pair with `rho: ["auto"]`.
    LbStar {
        n: Vec<usize>,
        #[serde(default)]
        gamma: Option<usize>,
    },
    /// Vertex cover reduction of `𝒢(n, p)` inputs; pair with `rho: ["auto"]`.
    VcReduce {
        n: Vec<usize>,
        p: f64,
        #[serde(default)]
        gamma: Option<usize>,
    },
    /// Graph files; seeds only repeat randomized algorithms.
    Files {
        paths: Vec<PathBuf>,
        #[serde(default)]
        format: Option<GraphFormat>,
    },
    /// A graph given inline as `[u, v, w]` triples.
    Inline {
        name: String,
        n: usize,
        edges: Vec<(NodeId, NodeId, f64)>,
    },
}

fn default_avg_deg() -> f64 {
    3.0
}

fn default_gamma_pl() -> f64 {
    3.0
}

fn default_swaps() -> usize {
    100
}

impl GeneratorSpec {
    pub fn model_name(&self) -> &'static str {
        match self {
            GeneratorSpec::Gilbert { .. } => "gilbert",
            GeneratorSpec::Hyperbolic { .. } => "hyperbolic",
            GeneratorSpec::McPowerlaw { .. } => "mc-powerlaw",
            GeneratorSpec::LbStar { .. } => "lb-star",
            GeneratorSpec::VcReduce { .. } => "vc-reduce",
            GeneratorSpec::Files { .. } => "file",
            GeneratorSpec::Inline { .. } => "inline",
        }
    }

    /// Random models default to the largest component; gadgets, files and fixtures do not.
    fn default_lcc(&self) -> bool {
        matches!(
            self,
            GeneratorSpec::Gilbert { .. }
                | GeneratorSpec::Hyperbolic { .. }
                | GeneratorSpec::McPowerlaw { .. }
        )
    }

    /// One entry per size or file.
    fn sizes(&self) -> usize {
        match self {
            GeneratorSpec::Gilbert { n, .. }
            | GeneratorSpec::Hyperbolic { n, .. }
            | GeneratorSpec::McPowerlaw { n, .. }
            | GeneratorSpec::LbStar { n, .. }
            | GeneratorSpec::VcReduce { n, .. } => n.len(),
            GeneratorSpec::Files { paths, .. } => paths.len(),
            GeneratorSpec::Inline { .. } => 1,
        }
    }

    /// Builds instance `i` for `seed` and `k`, with the generator's own ρ if it has one.
    fn build(&self, i: usize, seed: u64, k: u32) -> Result<(String, WeightedGraph, Option<usize>)> {
        let label = |n: usize| format!("{}-{n}", self.model_name());
        match self {
            GeneratorSpec::Gilbert { n, p, c, weights } => {
                let n = n[i];
                let p = match (p, c) {
                    (Some(p), None) => *p,
                    (None, Some(c)) => (c / n as f64).min(1.0),
                    _ => return Err(Error::param("gilbert needs exactly one of p and c")),
                };
                Ok((label(n), gen_gilbert(n, p, seed, *weights)?, None))
            }
            GeneratorSpec::Hyperbolic { n, avg_deg, gamma } => {
                Ok((label(n[i]), gen_hyperbolic(n[i], *avg_deg, *gamma, seed)?, None))
            }
            GeneratorSpec::McPowerlaw {
                n,
                gamma,
                swaps_per_edge,
            } => Ok((
                label(n[i]),
                gen_mc_powerlaw(n[i], *gamma, *swaps_per_edge, seed)?,
                None,
            )),
            GeneratorSpec::LbStar { n, gamma } => {
                let lb = lowerbound_star(n[i], k, *gamma)?;
                Ok((label(n[i]), lb.graph, Some(lb.rho)))
            }
            GeneratorSpec::VcReduce { n, p, gamma } => {
                let input = gen_gilbert(n[i], *p, seed, WeightMode::Unit)?;
                let t = vc_to_msp_transform(&input, k, *gamma, None)?;
                Ok((label(n[i]), t.graph, Some(t.rho)))
            }
            GeneratorSpec::Files { paths, format } => {
                let (g, _) = load_graph(&paths[i], *format)?;
                let name = paths[i]
                    .file_stem()
                    .map_or_else(|| "file".to_string(), |s| s.to_string_lossy().into_owned());
                Ok((name, g, None))
            }
            GeneratorSpec::Inline { name, n, edges } => Ok((
                name.clone(),
                WeightedGraph::undirected(*n, edges.iter().copied())?,
                None,
            )),
        }
    }
}

/// A heuristic or one of the exact solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Solver {
    Heuristic(Algorithm),
    BruteForce,
    Ilp,
}

impl Solver {
    pub fn is_exact(self) -> bool {
        !matches!(self, Solver::Heuristic(_))
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bruteforce" => Ok(Solver::BruteForce),
            "ilp" => Ok(Solver::Ilp),
            other => other.parse().map(Solver::Heuristic),
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Solver::Heuristic(a) => a.fmt(f),
            Solver::BruteForce => f.write_str("bruteforce"),
            Solver::Ilp => f.write_str("ilp"),
        }
    }
}

impl TryFrom<String> for Solver {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Solver> for String {
    fn from(s: Solver) -> String {
        s.to_string()
    }
}

/// Campaign description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    pub generator: GeneratorSpec,
    pub algorithms: Vec<Solver>,
    pub k: Vec<u32>,
    pub rho: Vec<RhoRule>,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Wall-clock limit per ILP solve, seconds.
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    /// σ is reported relative to this solver's count on the same instance.
    #[serde(default)]
    pub baseline: Option<Solver>,
    /// Defaults to on for random models.
    #[serde(default)]
    pub largest_component: Option<bool>,
    /// Template with `{lp}`, `{sol}` and `{timeout}`; required for `ilp`.
    #[serde(default)]
    pub solver_cmd: Option<String>,
    #[serde(default)]
    pub options: HeuristicOptions,
    /// Check every produced set with `verify_krho`.
    #[serde(default = "default_true")]
    pub verify: bool,
}

fn default_seeds() -> usize {
    1
}

fn default_timeout() -> f64 {
    1800.0
}

fn default_true() -> bool {
    true
}

impl CampaignSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: CampaignSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() || self.k.is_empty() || self.rho.is_empty() {
            return Err(Error::param("campaign needs algorithms, k and rho values"));
        }
        if self.seeds == 0 || self.generator.sizes() == 0 {
            return Err(Error::param("campaign has no cells"));
        }
        if self.k.contains(&0) {
            return Err(Error::param("k must be at least 1"));
        }
        if let Some(b) = self.baseline {
            if !self.algorithms.contains(&b) {
                return Err(Error::param(format!("baseline {b} is not among the algorithms")));
            }
        }
        Ok(())
    }

    /// Instances in cell order: size or file, then seed, then k, then ρ rule.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for size in 0..self.generator.sizes() {
            for s in 0..self.seeds {
                for &k in &self.k {
                    for &rho in &self.rho {
                        out.push(Cell {
                            index: out.len(),
                            size,
                            seed: self.base_seed.wrapping_add(s as u64),
                            k,
                            rho,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub size: usize,
    pub seed: u64,
    pub k: u32,
    pub rho: RhoRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowStatus {
    Ok,
    Timeout,
    Infeasible,
    SolverError,
    Invalid,
    Error,
}

/// One CSV line. Empty optional fields stay empty in the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub model: String,
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub rho: usize,
    pub algo: String,
    pub seed: u64,
    pub shortcut_count: Option<usize>,
    pub millis: u64,
    pub status: RowStatus,
    pub sigma: Option<f64>,
    pub blowup: Option<f64>,
}

struct Outcome {
    status: RowStatus,
    shortcuts: Option<ShortcutSet>,
}

fn run_solver(spec: &CampaignSpec, solver: Solver, g: &WeightedGraph, k: u32, rho: usize) -> Outcome {
    let fail = |status, msg: String| {
        log::warn!("{solver} on n={} k={k} rho={rho}: {msg}", g.node_count());
        Outcome {
            status,
            shortcuts: None,
        }
    };
    let result = match solver {
        Solver::Heuristic(a) => heuristics::run(a, g, k, rho, &spec.options),
        Solver::BruteForce => brute_force_msp(g, k, rho, None),
        Solver::Ilp => {
            let Some(cmd) = spec.solver_cmd.as_deref() else {
                return fail(RowStatus::Error, "no solver command configured".into());
            };
            let variant = if g.is_directed() { Variant::D } else { Variant::U };
            let solved = build_ilp(g, k, rho, variant)
                .and_then(|model| solve_external(g, &model, cmd, spec.timeout_s));
            match solved {
                Ok(out) => match out.status {
                    SolveStatus::Optimal => Ok(out.shortcuts.expect("optimal outcomes carry shortcuts")),
                    SolveStatus::Timeout => return fail(RowStatus::Timeout, "timed out".into()),
                    SolveStatus::Infeasible => {
                        return fail(RowStatus::Infeasible, out.message.unwrap_or_default())
                    }
                    SolveStatus::SolverError => {
                        return fail(RowStatus::SolverError, out.message.unwrap_or_default())
                    }
                },
                Err(e) => Err(e),
            }
        }
    };
    let set = match result {
        Ok(set) => set,
        Err(e) => return fail(RowStatus::Error, e.to_string()),
    };
    if spec.verify {
        let ok = apply_shortcuts(g, &set)
            .and_then(|h| verify_krho(&h, k, rho))
            .map(|r| r.is_empty());
        if !matches!(ok, Ok(true)) {
            return fail(RowStatus::Invalid, "shortcut set failed verification".into());
        }
    }
    Outcome {
        status: RowStatus::Ok,
        shortcuts: Some(set),
    }
}

fn run_cell(spec: &CampaignSpec, cell: &Cell) -> Vec<ResultRow> {
    let model = spec.generator.model_name();
    let error_rows = |name: String, n: usize, m: usize, rho: usize| -> Vec<ResultRow> {
        spec.algorithms
            .iter()
            .map(|a| ResultRow {
                model: name.clone(),
                n,
                m,
                k: cell.k,
                rho,
                algo: a.to_string(),
                seed: cell.seed,
                shortcut_count: None,
                millis: 0,
                status: RowStatus::Error,
                sigma: None,
                blowup: None,
            })
            .collect()
    };
    let (name, mut g, auto) = match spec.generator.build(cell.size, cell.seed, cell.k) {
        Ok(x) => x,
        Err(e) => {
            log::warn!("cell {}: {e}", cell.index);
            return error_rows(model.to_string(), 0, 0, 0);
        }
    };
    if spec.largest_component.unwrap_or(spec.generator.default_lcc()) {
        g = g.largest_component().0;
    }
    let (n, m) = (g.node_count(), g.edge_count());
    let rho = match cell.rho.eval(n, auto) {
        Ok(r) => r,
        Err(e) => {
            log::warn!("cell {}: {e}", cell.index);
            return error_rows(name, n, m, 0);
        }
    };

    let mut rows = Vec::with_capacity(spec.algorithms.len());
    let mut counts: BTreeMap<Solver, usize> = BTreeMap::new();
    for &solver in &spec.algorithms {
        let start = Instant::now();
        let out = run_solver(spec, solver, &g, cell.k, rho);
        let millis = start.elapsed().as_millis() as u64;
        let count = out.shortcuts.as_ref().map(ShortcutSet::len);
        if let Some(c) = count {
            counts.insert(solver, c);
        }
        rows.push(ResultRow {
            model: name.clone(),
            n,
            m,
            k: cell.k,
            rho,
            algo: solver.to_string(),
            seed: cell.seed,
            shortcut_count: count,
            millis,
            status: out.status,
            sigma: None,
            blowup: count.filter(|_| m > 0).map(|c| (m + c) as f64 / m as f64),
        });
    }
    if let Some(base) = spec.baseline.and_then(|b| counts.get(&b)).copied() {
        if base > 0 {
            for row in &mut rows {
                row.sigma = row.shortcut_count.map(|c| c as f64 / base as f64);
            }
        }
    }
    rows
}

impl PartialOrd for Solver {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Solver {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

/// Runs every cell on a pool of `workers` threads. Rows come back in cell order, then in the
/// order of `spec.algorithms`, whatever the worker count.
pub fn run_campaign(spec: &CampaignSpec, workers: usize) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let cells = spec.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let rows: Vec<Vec<ResultRow>> =
        pool.install(|| cells.par_iter().map(|c| run_cell(spec, c)).collect());
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_csv(rows: &[ResultRow], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

/// Runs the campaign and streams the CSV.
pub fn run_campaign_csv(spec: &CampaignSpec, workers: usize, w: impl Write) -> Result<Vec<ResultRow>> {
    let rows = run_campaign(spec, workers)?;
    write_csv(&rows, w)?;
    Ok(rows)
}

/// Aggregate over seeds for one `(model, n, k, rho, algo)` group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub model: String,
    pub n: usize,
    pub k: u32,
    pub rho: usize,
    pub algo: String,
    pub instances: usize,
    /// Rows with status `Ok`.
    pub solved_fraction: f64,
    pub mean_shortcuts: Option<f64>,
    /// Mean of per-instance σ over rows that have one.
    pub mean_sigma: Option<f64>,
    pub max_sigma: Option<f64>,
}

pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, usize, u32, usize, String), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.model.clone(), r.n, r.k, r.rho, r.algo.clone()))
            .or_default()
            .push(r);
    }
    let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    groups
        .into_iter()
        .map(|((model, n, k, rho, algo), rs)| {
            let counts: Vec<f64> = rs.iter().filter_map(|r| r.shortcut_count).map(|c| c as f64).collect();
            let sigmas: Vec<f64> = rs.iter().filter_map(|r| r.sigma).collect();
            let solved = rs.iter().filter(|r| r.status == RowStatus::Ok).count();
            SummaryRow {
                model,
                n,
                k,
                rho,
                algo,
                instances: rs.len(),
                solved_fraction: solved as f64 / rs.len() as f64,
                mean_shortcuts: mean(&counts),
                mean_sigma: mean(&sigmas),
                max_sigma: sigmas.iter().copied().reduce(f64::max),
            }
        })
        .collect()
}
