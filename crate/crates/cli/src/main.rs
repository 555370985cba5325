use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use krho_core::exact::{
    brute_force_with_budget, build_ilp, solve_external, write_lp_to, SolveStatus, Variant,
    DEFAULT_BUDGET,
};
use krho_core::generators::{
    gen_gilbert, gen_hyperbolic, gen_mc_powerlaw, lowerbound_star, vc_to_msp_transform, WeightMode,
};
use krho_core::harness::{run_campaign, summarize, write_csv, CampaignSpec, RhoRule, Solver};
use krho_core::heuristics::{self, Algorithm, HeuristicOptions};
use krho_core::io::{read_graph, write_edge_list, GraphFormat};
use krho_core::{apply_shortcuts, verify_krho, ShortcutSet, WeightedGraph};
use serde_json::{json, Value};

/// Shortcut weighted graphs into (k, ρ)-graphs.
#[derive(Debug, Parser)]
#[command(name = "krho", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Seed for generators and randomized heuristics.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// One worker and no wall-clock fields, so repeated runs are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a graph and its JSON sidecar.
    Gen {
        #[command(subcommand)]
        model: GenModel,
    },
    /// Run a heuristic and print the shortcuts as `u v w` lines.
    Shortcut(ShortcutArgs),
    /// Print `OK`, or the violating nodes with exit code 2.
    Verify(VerifyArgs),
    /// Exact solving: LP output, external MILP solver or brute force.
    Exact(ExactArgs),
    /// Run a campaign spec and write CSV rows.
    Experiment(ExperimentArgs),
    /// Apply the vertex-cover reduction to a graph file.
    Reduce(ReduceArgs),
}

#[derive(Debug, Args)]
struct GraphInput {
    /// Graph file, or `-` for stdin.
    #[arg(default_value = "-")]
    graph: String,
    /// edgelist or mtx; inferred from the extension when omitted.
    #[arg(long)]
    format: Option<GraphFormat>,
}

#[derive(Debug, Args)]
struct Params {
    #[arg(long)]
    k: u32,
    /// Integer or an expression: `n-1`, `n/10`, `sqrt(n)`.
    #[arg(long)]
    rho: RhoRule,
}

#[derive(Debug, Args)]
struct GenOut {
    /// Graph output; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Sidecar path; defaults to `<out>.json` when `--out` is given.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenModel {
    Gilbert {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "unit")]
        weights: WeightMode,
        #[command(flatten)]
        out: GenOut,
    },
    Hyperbolic {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        avg_deg: f64,
        /// Power-law exponent.
        #[arg(long, default_value_t = 3.0)]
        gamma: f64,
        #[command(flatten)]
        out: GenOut,
    },
    McPowerlaw {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        gamma: f64,
        #[arg(long, default_value_t = 100)]
        swaps_per_edge: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// Reduction of a random Gilbert input graph.
    VcReduce {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Pitchfork size; defaults to 7|V|+6.
        #[arg(long)]
        gamma: Option<usize>,
        #[arg(long)]
        blowup_y: Option<usize>,
        #[command(flatten)]
        out: GenOut,
    },
    LbStar {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long)]
        gamma: Option<usize>,
        #[command(flatten)]
        out: GenOut,
    },
}

#[derive(Debug, Args)]
struct ShortcutArgs {
    #[command(flatten)]
    input: GraphInput,
    #[command(flatten)]
    params: Params,
    #[arg(long)]
    algo: Algorithm,
    /// MinHash filtering for dp-pc and dp-sa.
    #[arg(long)]
    minhash: bool,
    /// Fingerprint length for MinHash.
    #[arg(long)]
    minhash_c: Option<usize>,
    /// One-line JSON summary path.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: GraphInput,
    #[command(flatten)]
    params: Params,
    /// Shortcut lines to apply first, or `-` for stdin.
    #[arg(long)]
    shortcuts: Option<String>,
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Backend {
    LpOnly,
    External,
    Bruteforce,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[command(flatten)]
    input: GraphInput,
    #[command(flatten)]
    params: Params,
    #[arg(long, value_enum, default_value = "external")]
    backend: Backend,
    /// d or u; follows the graph's directedness when omitted.
    #[arg(long)]
    variant: Option<Variant>,
    /// Command template with `{lp}`, `{sol}` and `{timeout}`; defaults to the bundled HiGHS
    /// front end.
    #[arg(long)]
    solver_cmd: Option<String>,
    /// Seconds.
    #[arg(long, default_value_t = 1800.0)]
    timeout: f64,
    /// Where `lp-only` writes the model; stdout when omitted.
    #[arg(long)]
    lp_out: Option<PathBuf>,
    /// Largest cardinality tried by brute force.
    #[arg(long)]
    max_card: Option<usize>,
    /// Subsets brute force may evaluate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Campaign spec (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-group aggregates as JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long)]
    gamma: Option<usize>,
    #[arg(long)]
    blowup_y: Option<usize>,
    /// Comma-separated vertex cover; its canonical shortcuts go to `--cover-out`.
    #[arg(long, value_delimiter = ',')]
    cover: Vec<usize>,
    #[arg(long, requires = "cover")]
    cover_out: Option<PathBuf>,
    #[command(flatten)]
    out: GenOut,
}

/// Non-success results that map to dedicated exit codes.
#[derive(Debug)]
enum Failure {
    Verification,
    Timeout,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Verification => f.write_str("graph is not a (k, rho)-graph"),
            Failure::Timeout => f.write_str("solver timed out"),
        }
    }
}

impl std::error::Error for Failure {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    env_logger::Builder::new()
        .parse_filters(&cli.global.log_level)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<Failure>() {
            Some(Failure::Verification) => ExitCode::from(2),
            Some(Failure::Timeout) => {
                eprintln!("error: {e}");
                ExitCode::from(3)
            }
            // A closed downstream pipe (`krho gen ... | head`) is not an error.
            None if e.chain().any(|c| {
                c.downcast_ref::<io::Error>()
                    .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
                    || c.downcast_ref::<krho_core::Error>()
                        .is_some_and(|k| matches!(k, krho_core::Error::Io(io) if io.kind() == io::ErrorKind::BrokenPipe))
            }) =>
            {
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let workers = if g.deterministic { Some(1) } else { g.workers };
    if let Some(w) = workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.cmd {
        Command::Gen { model } => cmd_gen(g, model),
        Command::Shortcut(a) => cmd_shortcut(g, a),
        Command::Verify(a) => cmd_verify(a),
        Command::Exact(a) => cmd_exact(g, a),
        Command::Experiment(a) => cmd_experiment(g, a),
        Command::Reduce(a) => cmd_reduce(g, a),
    }
}

fn open_input(path: &str) -> Result<Box<dyn BufRead>> {
    if path == "-" {
        Ok(Box::new(BufReader::new(io::stdin())))
    } else {
        let f = File::open(path).with_context(|| format!("opening {path}"))?;
        Ok(Box::new(BufReader::new(f)))
    }
}

fn load(input: &GraphInput) -> Result<WeightedGraph> {
    let format = input.format.unwrap_or_else(|| {
        if Path::new(&input.graph)
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("mtx"))
        {
            GraphFormat::Mtx
        } else {
            GraphFormat::Edgelist
        }
    });
    let (g, report) = read_graph(open_input(&input.graph)?, format)
        .with_context(|| format!("reading graph {}", input.graph))?;
    if report.self_loops_dropped > 0 || report.duplicates_collapsed > 0 {
        log::warn!(
            "{}: dropped {} self-loops, collapsed {} duplicate edges",
            input.graph,
            report.self_loops_dropped,
            report.duplicates_collapsed
        );
    }
    Ok(g)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Runs `f` on the file at `path`, or on stdout.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn millis(start: Instant, global: &Global) -> u64 {
    if global.deterministic {
        0
    } else {
        start.elapsed().as_millis() as u64
    }
}

fn resolve_rho(params: &Params, g: &WeightedGraph) -> Result<usize> {
    Ok(params.rho.eval(g.node_count(), None)?)
}

fn write_graph_and_sidecar(g: &WeightedGraph, out: &GenOut, mut sidecar: Value) -> Result<()> {
    with_output(out.out.as_deref(), |w| Ok(write_edge_list(g, w)?))?;
    let path = match (&out.sidecar, &out.out) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(o)) => {
            let mut s = o.clone().into_os_string();
            s.push(".json");
            Some(PathBuf::from(s))
        }
        (None, None) => None,
    };
    if let Some(p) = path {
        sidecar["n"] = json!(g.node_count());
        sidecar["m"] = json!(g.edge_count());
        write_json(&p, &sidecar)?;
    }
    Ok(())
}

fn cmd_gen(global: &Global, model: GenModel) -> Result<()> {
    let seed = global.seed;
    match model {
        GenModel::Gilbert { n, p, weights, out } => {
            let g = gen_gilbert(n, p, seed, weights)?;
            let side = json!({"model": "gilbert", "seed": seed,
                              "params": {"n": n, "p": p, "weights": weights}});
            write_graph_and_sidecar(&g, &out, side)
        }
        GenModel::Hyperbolic {
            n,
            avg_deg,
            gamma,
            out,
        } => {
            let g = gen_hyperbolic(n, avg_deg, gamma, seed)?;
            let side = json!({"model": "hyperbolic", "seed": seed,
                              "params": {"n": n, "avg_deg": avg_deg, "gamma": gamma}});
            write_graph_and_sidecar(&g, &out, side)
        }
        GenModel::McPowerlaw {
            n,
            gamma,
            swaps_per_edge,
            out,
        } => {
            let g = gen_mc_powerlaw(n, gamma, swaps_per_edge, seed)?;
            let side = json!({"model": "mc-powerlaw", "seed": seed,
                              "params": {"n": n, "gamma": gamma, "swaps_per_edge": swaps_per_edge}});
            write_graph_and_sidecar(&g, &out, side)
        }
        GenModel::VcReduce {
            n,
            p,
            k,
            gamma,
            blowup_y,
            out,
        } => {
            let input = gen_gilbert(n, p, seed, WeightMode::Unit)?;
            let t = vc_to_msp_transform(&input, k, gamma, blowup_y)?;
            let input_edges: Vec<[usize; 2]> = input.edges().map(|(u, v, _)| [u, v]).collect();
            let side = json!({"model": "vc-reduce", "seed": seed,
                              "params": {"n": n, "p": p, "k": k, "gamma": gamma, "blowup_y": blowup_y},
                              "input_edges": input_edges, "k": t.k, "rho": t.rho,
                              "artifacts": t});
            write_graph_and_sidecar(&t.graph, &out, side)
        }
        GenModel::LbStar { n, k, gamma, out } => {
            let lb = lowerbound_star(n, k, gamma)?;
            let side = json!({"model": "lb-star", "seed": seed,
                              "params": {"n": n, "k": k, "gamma": gamma},
                              "k": lb.k, "rho": lb.rho, "artifacts": lb});
            write_graph_and_sidecar(&lb.graph, &out, side)
        }
    }
}

fn heuristic_options(global: &Global, a: &ShortcutArgs) -> HeuristicOptions {
    let mut opts = HeuristicOptions {
        use_minhash: a.minhash,
        seed: global.seed,
        ..HeuristicOptions::default()
    };
    opts.minhash.seed = global.seed;
    if let Some(c) = a.minhash_c {
        opts.minhash.c = c;
    }
    opts
}

fn cmd_shortcut(global: &Global, a: ShortcutArgs) -> Result<()> {
    let g = load(&a.input)?;
    let rho = resolve_rho(&a.params, &g)?;
    let k = a.params.k;
    let opts = heuristic_options(global, &a);
    let start = Instant::now();
    let set = heuristics::run(a.algo, &g, k, rho, &opts)?;
    let elapsed = millis(start, global);
    with_output(None, |w| Ok(set.write_lines(w)?))?;
    if let Some(p) = &a.summary {
        write_json(
            p,
            &json!({"algo": a.algo.name(), "k": k, "rho": rho, "size": set.len(),
                    "millis": elapsed, "seed": global.seed, "minhash": a.minhash}),
        )?;
    }
    Ok(())
}

fn read_shortcuts(src: &str, g: &WeightedGraph) -> Result<ShortcutSet> {
    let set = ShortcutSet::read_lines(open_input(src)?, g.is_directed())
        .with_context(|| format!("reading shortcuts from {src}"))?;
    if set.iter().any(|s| s.weight.is_nan()) {
        return Ok(set.with_graph_weights(g)?);
    }
    Ok(set)
}

fn cmd_verify(a: VerifyArgs) -> Result<()> {
    if a.input.graph == "-" && a.shortcuts.as_deref() == Some("-") {
        bail!("the graph and the shortcuts cannot both come from stdin");
    }
    let mut g = load(&a.input)?;
    let added = match &a.shortcuts {
        Some(src) => {
            let set = read_shortcuts(src, &g)?;
            g = apply_shortcuts(&g, &set)?;
            set.len()
        }
        None => 0,
    };
    let rho = resolve_rho(&a.params, &g)?;
    let report = verify_krho(&g, a.params.k, rho)?;
    if let Some(p) = &a.summary {
        write_json(
            p,
            &json!({"k": a.params.k, "rho": rho, "shortcuts": added,
                    "ok": report.is_empty(), "violators": report.violators}),
        )?;
    }
    if report.is_empty() {
        println!("OK");
        Ok(())
    } else {
        let ids: Vec<String> = report.violators.iter().map(|p| p.node.to_string()).collect();
        println!("{}", ids.join(" "));
        eprintln!(
            "{} of {} nodes have no ({}, {})-ball",
            ids.len(),
            g.node_count(),
            a.params.k,
            rho
        );
        Err(Failure::Verification.into())
    }
}

/// The bundled solver front end, expected next to this executable.
fn default_solver_cmd() -> Result<String> {
    let exe = std::env::current_exe().context("locating the krho executable")?;
    let dir = exe
        .parent()
        .ok_or_else(|| anyhow!("executable has no parent directory"))?;
    let solver = dir.join(format!("krho-lp-solve{}", std::env::consts::EXE_SUFFIX));
    if !solver.exists() {
        bail!(
            "bundled solver not found at {}; pass --solver-cmd",
            solver.display()
        );
    }
    let quoted = solver.display().to_string().replace('\'', r"'\''");
    Ok(format!("'{quoted}' {{lp}} {{sol}} --time-limit {{timeout}}"))
}

fn cmd_exact(global: &Global, a: ExactArgs) -> Result<()> {
    let g = load(&a.input)?;
    let rho = resolve_rho(&a.params, &g)?;
    let k = a.params.k;
    let start = Instant::now();
    match a.backend {
        Backend::Bruteforce => {
            let res = brute_force_with_budget(&g, k, rho, a.max_card, a.budget)?;
            with_output(None, |w| Ok(res.shortcuts.write_lines(w)?))?;
            if let Some(p) = &a.summary {
                write_json(
                    p,
                    &json!({"backend": "bruteforce", "k": k, "rho": rho,
                            "size": res.shortcuts.len(), "candidates": res.candidates,
                            "evaluated": res.evaluated, "millis": millis(start, global)}),
                )?;
            }
            Ok(())
        }
        Backend::LpOnly | Backend::External => {
            let variant = a.variant.unwrap_or(if g.is_directed() {
                Variant::D
            } else {
                Variant::U
            });
            let model = build_ilp(&g, k, rho, variant)?;
            if a.backend == Backend::LpOnly {
                with_output(a.lp_out.as_deref(), |w| Ok(write_lp_to(&model, w)?))?;
                if let Some(p) = &a.summary {
                    write_json(
                        p,
                        &json!({"backend": "lp-only", "k": k, "rho": rho,
                                "variables": model.vars.len(), "rows": model.rows.len()}),
                    )?;
                }
                return Ok(());
            }
            let cmd = match a.solver_cmd {
                Some(c) => c,
                None => default_solver_cmd()?,
            };
            let mut out = solve_external(&g, &model, &cmd, a.timeout)?;
            if global.deterministic {
                out.wall_time = 0.0;
            }
            if let Some(p) = &a.summary {
                let mut v = serde_json::to_value(&out)?;
                v["backend"] = json!("external");
                v["k"] = json!(k);
                v["rho"] = json!(rho);
                write_json(p, &v)?;
            }
            match out.status {
                SolveStatus::Optimal => {
                    let set = out.shortcuts.expect("optimal outcomes carry shortcuts");
                    with_output(None, |w| Ok(set.write_lines(w)?))
                }
                SolveStatus::Timeout => Err(Failure::Timeout.into()),
                SolveStatus::Infeasible => bail!(
                    "solver reports infeasible: {}",
                    out.message.unwrap_or_default()
                ),
                SolveStatus::SolverError => {
                    bail!("solver failed: {}", out.message.unwrap_or_default())
                }
            }
        }
    }
}

fn cmd_experiment(global: &Global, a: ExperimentArgs) -> Result<()> {
    let mut text = String::new();
    File::open(&a.spec)
        .with_context(|| format!("opening {}", a.spec.display()))?
        .read_to_string(&mut text)?;
    let mut spec = CampaignSpec::from_json(&text)
        .with_context(|| format!("parsing campaign spec {}", a.spec.display()))?;
    if spec.solver_cmd.is_none() && spec.algorithms.contains(&Solver::Ilp) {
        spec.solver_cmd = Some(default_solver_cmd()?);
    }
    let workers = if global.deterministic {
        1
    } else {
        global
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    };
    let mut rows = run_campaign(&spec, workers)?;
    if global.deterministic {
        for r in &mut rows {
            r.millis = 0;
        }
    }
    with_output(a.out.as_deref(), |w| Ok(write_csv(&rows, w)?))?;
    if let Some(p) = &a.summary {
        write_json(p, &serde_json::to_value(summarize(&rows))?)?;
    }
    Ok(())
}

fn cmd_reduce(global: &Global, a: ReduceArgs) -> Result<()> {
    let input = load(&a.input)?;
    let t = vc_to_msp_transform(&input, a.k, a.gamma, a.blowup_y)?;
    if let Some(p) = &a.cover_out {
        let set = t.canonical_shortcuts(&a.cover);
        with_output(Some(p), |w| Ok(set.write_lines(w)?))?;
    }
    let side = json!({"model": "reduce", "seed": global.seed, "source": a.input.graph,
                      "params": {"k": a.k, "gamma": a.gamma, "blowup_y": a.blowup_y},
                      "k": t.k, "rho": t.rho, "artifacts": t});
    write_graph_and_sidecar(&t.graph, &a.out, side)
}
