use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ball::validate_params;
use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedGraph};
use crate::heuristics::dp::{krho_dp, krho_dp_all};
use crate::heuristics::minhash::MinHashConfig;
use crate::heuristics::pc::pc_stage;
use crate::heuristics::sa::sa_stage;
use crate::shortcut::{insert_unchecked, ShortcutSet};

/// Staged DP: shuffles the nodes, then runs DP on consecutive batches of `⌈f·n⌉` sources,
/// inserting each batch's shortcuts before the next one.
pub fn krho_dp_star(
    g: &WeightedGraph,
    k: u32,
    rho: usize,
    batch_fraction: f64,
    seed: u64,
) -> Result<ShortcutSet> {
    validate_params(g, k, rho)?;
    if !(batch_fraction > 0.0 && batch_fraction <= 1.0) {
        return Err(Error::param("batch_fraction must lie in (0, 1]"));
    }
    let n = g.node_count();
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let batch = ((batch_fraction * n as f64).ceil() as usize).clamp(1, n);
    let mut current = g.clone();
    let mut out = ShortcutSet::for_graph(g);
    for sources in order.chunks(batch) {
        let stage = krho_dp(&current, k, rho, sources)?;
        insert_unchecked(&mut current, &stage);
        out.extend(&stage);
    }
    Ok(out)
}

/// Pair shortcutting, then set alignment on the augmented graph, then DP; both filtering
/// stages use their own MinHash filter built from `minhash`.
pub fn krho_dp_pc_sa_mh(
    g: &WeightedGraph,
    k: u32,
    rho: usize,
    minhash: &MinHashConfig,
) -> Result<ShortcutSet> {
    let mut current = g.clone();
    let mut out = pc_stage(&current, k, rho, Some(minhash))?;
    insert_unchecked(&mut current, &out);
    let sa = sa_stage(&current, k, rho, Some(minhash), None)?;
    insert_unchecked(&mut current, &sa);
    out.extend(&sa);
    out.extend(&krho_dp_all(&current, k, rho)?);
    Ok(out)
}
