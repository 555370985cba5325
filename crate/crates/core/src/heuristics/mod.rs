//! Shortcut-set heuristics.

mod dp;
mod greedy;
pub mod minhash;
mod pc;
mod pipeline;
mod sa;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use dp::{
    dp_per_source, dp_source, krho_dp, krho_dp_all, Choice, DpTable, SourceSolution,
};
pub use greedy::{krho_greedy, solve_k1};
pub use minhash::{MinHashConfig, MinHashFilter, MinHasher};
pub use pc::{krho_dp_pc, path_candidates, pc_accepted, pc_candidates, pc_stage, score_stats, CandidateScore};
pub use pipeline::{krho_dp_pc_sa_mh, krho_dp_star};
pub use sa::{default_pred_cap, krho_dp_sa, sa_perturbations, sa_stage, PerturbationFamily};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::shortcut::ShortcutSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Greedy,
    Dp,
    DpStar,
    DpPc,
    DpSa,
    DpPcSa,
    K1,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Greedy,
        Algorithm::Dp,
        Algorithm::DpStar,
        Algorithm::DpPc,
        Algorithm::DpSa,
        Algorithm::DpPcSa,
        Algorithm::K1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Dp => "dp",
            Algorithm::DpStar => "dp-star",
            Algorithm::DpPc => "dp-pc",
            Algorithm::DpSa => "dp-sa",
            Algorithm::DpPcSa => "dp-pc-sa",
            Algorithm::K1 => "k1",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::param(format!("unknown algorithm '{s}'")))
    }
}

/// Knobs shared by all heuristics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicOptions {
    /// MinHash filtering for `dp-pc` and `dp-sa`; `dp-pc-sa` always filters.
    pub use_minhash: bool,
    pub minhash: MinHashConfig,
    pub batch_fraction: f64,
    pub seed: u64,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        HeuristicOptions {
            use_minhash: false,
            minhash: MinHashConfig::default(),
            batch_fraction: 0.1,
            seed: 0,
        }
    }
}

/// Runs `algo`; `k1` ignores `k` and requires it to be 1.
pub fn run(
    algo: Algorithm,
    g: &WeightedGraph,
    k: u32,
    rho: usize,
    opts: &HeuristicOptions,
) -> Result<ShortcutSet> {
    let mh = opts.use_minhash.then_some(&opts.minhash);
    match algo {
        Algorithm::Greedy => krho_greedy(g, k, rho),
        Algorithm::Dp => krho_dp_all(g, k, rho),
        Algorithm::DpStar => krho_dp_star(g, k, rho, opts.batch_fraction, opts.seed),
        Algorithm::DpPc => krho_dp_pc(g, k, rho, mh),
        Algorithm::DpSa => krho_dp_sa(g, k, rho, mh),
        Algorithm::DpPcSa => krho_dp_pc_sa_mh(g, k, rho, &opts.minhash),
        Algorithm::K1 => {
            if k != 1 {
                return Err(Error::param("the k1 solver requires k = 1"));
            }
            solve_k1(g, rho)
        }
    }
}
