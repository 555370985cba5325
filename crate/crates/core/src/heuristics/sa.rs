use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::ball::validate_params;
use crate::error::Result;
use crate::graph::{NodeId, WeightedGraph};
use crate::heuristics::dp::{dp_per_source, krho_dp_all, SourceSolution};
use crate::heuristics::minhash::{MinHashConfig, MinHashFilter};
use crate::paths::closest_path_tree_unchecked;
use crate::shortcut::{insert_unchecked, ShortcutSet};

/// Alternative anchors for the shortcuts of one source's DP solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationFamily {
    pub source: NodeId,
    /// Targets `x` of `S_i` with the depth of their subtree `T_{i,x}`.
    pub depths: Vec<(NodeId, u32)>,
    /// For each perturbable target `x`, the anchors `t` replacing `(i, x)` by `(t, x)`,
    /// closest to `x` first.
    pub alternatives: Vec<(NodeId, Vec<NodeId>)>,
}

impl PerturbationFamily {
    pub fn depth_of(&self, x: NodeId) -> Option<u32> {
        self.depths.iter().find(|&&(y, _)| y == x).map(|&(_, d)| d)
    }
}

/// Default cap on alternative anchors per shortcut: `⌈log₂ ρ⌉`, at least 1.
pub fn default_pred_cap(rho: usize) -> usize {
    (usize::BITS - (rho.max(2) - 1).leading_zeros()) as usize
}

fn family(sol: &SourceSolution, k: u32, pred_cap: usize) -> PerturbationFamily {
    let tree = sol.table.tree();
    let i = sol.source;
    let children = tree.children();
    let targets: BTreeSet<NodeId> = sol.targets.iter().map(|&(x, _)| x).collect();
    let mut depths = Vec::new();
    let mut alternatives = Vec::new();
    for &(x, _) in &sol.targets {
        // T_{i,x}: descendants of x that are not below another target.
        let base = tree.hops(x).unwrap();
        let mut depth = 0;
        let mut stack = vec![x];
        while let Some(u) = stack.pop() {
            depth = depth.max(tree.hops(u).unwrap() - base);
            stack.extend(children[u].iter().filter(|w| !targets.contains(w)));
        }
        depths.push((x, depth));
        if depth + 1 >= k {
            continue;
        }
        let window = (k - 1 - depth) as usize;
        let path = tree.path_to(x);
        let ix = path.len() - 1;
        let anchors = std::iter::once(0).chain((1..ix).filter(|&z| targets.contains(&path[z])));
        let mut positions = BTreeSet::new();
        for z in anchors {
            for delta in 0..window {
                let pos = z + delta;
                // Skip the source itself and the tree parent of x, whose edge already exists.
                if pos > 0 && pos + 1 < ix {
                    positions.insert(pos);
                }
            }
        }
        let ts: Vec<NodeId> = positions.into_iter().rev().take(pred_cap).map(|p| path[p]).collect();
        if !ts.is_empty() {
            alternatives.push((x, ts));
        }
    }
    PerturbationFamily {
        source: i,
        depths,
        alternatives,
    }
}

fn key(directed: bool, u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if directed {
        (u, v)
    } else {
        (u.min(v), u.max(v))
    }
}

/// Perturbation families and the shared score map: every distinct shortcut of
/// `S_D = S_i ∪ {(t, x)}` counts once per source.
pub fn sa_perturbations(
    g: &WeightedGraph,
    k: u32,
    base: &[SourceSolution],
    pred_cap: usize,
) -> (Vec<PerturbationFamily>, BTreeMap<(NodeId, NodeId), u32>) {
    let families: Vec<PerturbationFamily> =
        base.par_iter().map(|sol| family(sol, k, pred_cap)).collect();
    let mut scores: BTreeMap<(NodeId, NodeId), u32> = BTreeMap::new();
    for (sol, fam) in base.iter().zip(&families) {
        let mut sd = BTreeSet::new();
        for &(x, _) in &sol.targets {
            sd.insert(key(g.is_directed(), sol.source, x));
        }
        for (x, ts) in &fam.alternatives {
            for &t in ts {
                sd.insert(key(g.is_directed(), t, *x));
            }
        }
        for pair in sd {
            *scores.entry(pair).or_default() += 1;
        }
    }
    (families, scores)
}

/// First stage of set alignment: shortcuts shared by at least two local solutions, in
/// descending score order, optionally MinHash-filtered. Weights are distances in `g`.
pub fn sa_stage(
    g: &WeightedGraph,
    k: u32,
    rho: usize,
    minhash: Option<&MinHashConfig>,
    pred_cap: Option<usize>,
) -> Result<ShortcutSet> {
    validate_params(g, k, rho)?;
    let sources: Vec<NodeId> = (0..g.node_count()).collect();
    let base = dp_per_source(g, k, rho, &sources)?;
    let cap = pred_cap.unwrap_or_else(|| default_pred_cap(rho));
    let (families, scores) = sa_perturbations(g, k, &base, cap);

    let mut selected: Vec<((NodeId, NodeId), u32)> =
        scores.into_iter().filter(|&(_, s)| s >= 2).collect();
    selected.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    // target -> [(source, depth of T_{source,target})]
    let mut by_target: HashMap<NodeId, Vec<(NodeId, u32)>> = HashMap::new();
    for fam in &families {
        for &(x, d) in &fam.depths {
            by_target.entry(x).or_default().push((fam.source, d));
        }
    }

    let mut filter = minhash.map(MinHashFilter::new).transpose()?;
    let mut current = g.clone();
    let mut out = ShortcutSet::for_graph(g);
    for ((a, b), _) in selected {
        let from_a = closest_path_tree_unchecked(&current, a, None);
        if let Some(filter) = filter.as_mut() {
            let benefit = if g.is_directed() {
                sa_benefit_directed(&current, a, b, k, &by_target)
            } else {
                let from_b = closest_path_tree_unchecked(&current, b, None);
                let mut set = BTreeSet::new();
                for (target, tree) in [(b, &from_a), (a, &from_b)] {
                    for &(i, depth) in by_target.get(&target).into_iter().flatten() {
                        if tree.hops(i).is_some_and(|h| h + 1 + depth <= k) {
                            set.insert(i as u64);
                        }
                    }
                }
                set.into_iter().collect()
            };
            if !filter.offer(&benefit) {
                continue;
            }
        }
        let w = from_a.dist(b);
        current.upsert_edge(a, b, w);
        out.insert(a, b, w);
    }
    Ok(out)
}

fn sa_benefit_directed(
    current: &WeightedGraph,
    a: NodeId,
    b: NodeId,
    k: u32,
    by_target: &HashMap<NodeId, Vec<(NodeId, u32)>>,
) -> Vec<u64> {
    let mut set = BTreeSet::new();
    for &(i, depth) in by_target.get(&b).into_iter().flatten() {
        let tree = closest_path_tree_unchecked(current, i, None);
        if tree.hops(a).is_some_and(|h| h + 1 + depth <= k) {
            set.insert(i as u64);
        }
    }
    set.into_iter().collect()
}

/// Set alignment followed by DP on the augmented graph.
pub fn krho_dp_sa(
    g: &WeightedGraph,
    k: u32,
    rho: usize,
    minhash: Option<&MinHashConfig>,
) -> Result<ShortcutSet> {
    let mut out = sa_stage(g, k, rho, minhash, None)?;
    let mut h = g.clone();
    insert_unchecked(&mut h, &out);
    out.extend(&krho_dp_all(&h, k, rho)?);
    Ok(out)
}
