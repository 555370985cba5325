//! Experiment campaigns: generator × algorithm grids written as CSV rows.
//!
//! A campaign spec is JSON:
//!
//! ```json
//! {
//!   "generator": {"model": "hyperbolic", "n": [30, 50, 70], "avg_deg": 3.0, "gamma": 3.0},
//!   "algorithms": ["dp", "dp-pc-sa", "ilp"],
//!   "k": [2],
//!   "rho": ["n-1"],
//!   "seeds": 50,
//!   "base_seed": 0,
//!   "timeout_s": 1800,
//!   "baseline": "ilp",
//!   "solver_cmd": "krho-lp-solve {lp} {sol} --time-limit {timeout}"
//! }
//! ```
//!
//! Models: `gilbert` (`n`, `p` or `c` for `p = c/n`, `weights`), `hyperbolic` (`n`, `avg_deg`,
//! `gamma`), `mc-powerlaw` (`n`, `gamma`, `swaps_per_edge`), `lb-star` (`n`, `gamma`),
//! `vc-reduce` (`n`, `p`, `gamma`), `files` (`paths`, `format`) and `inline` (`name`, `n`,
//! `edges`). ρ rules are integers, `n-c`, `n/c`, `sqrt(n)` or `auto` (gadget models).
//! Algorithms are the heuristic names plus `bruteforce` and `ilp`.

mod campaign;
mod rules;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

pub use campaign::{
    run_campaign, run_campaign_csv, summarize, write_csv, CampaignSpec, Cell, GeneratorSpec,
    ResultRow, RowStatus, Solver, SummaryRow,
};
pub use rules::RhoRule;

use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::io::{read_graph, GraphFormat, LoadReport};

/// Reads a graph file; the format defaults to the extension (`.mtx` or edge list).
pub fn load_graph(path: &Path, format: Option<GraphFormat>) -> Result<(WeightedGraph, LoadReport)> {
    let format = format.unwrap_or_else(|| {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("mtx") => GraphFormat::Mtx,
            _ => GraphFormat::Edgelist,
        }
    });
    read_graph(BufReader::new(File::open(path)?), format)
}
