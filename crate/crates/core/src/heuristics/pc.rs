use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{limited_profile, validate_params};
use crate::error::Result;
use crate::graph::{NodeId, WeightedGraph};
use crate::heuristics::dp::krho_dp_all;
use crate::heuristics::minhash::{MinHashConfig, MinHashFilter};
use crate::paths::{AllPairs, ClosestPathTree};
use crate::shortcut::{insert_unchecked, ShortcutSet};

/// Pooled score of one pair-shortcut candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateScore {
    pub x: NodeId,
    pub y: NodeId,
    /// Sum over contributing nodes `u` of `1 / max(1, missing(u) left after inserting (x, y))`.
    pub score: f64,
    /// `(u, number of u's missing nodes the candidate fixes)`, sorted by `u`.
    pub gains: Vec<(NodeId, usize)>,
}

impl CandidateScore {
    pub fn contributors(&self) -> usize {
        self.gains.len()
    }

    pub fn min_gain(&self) -> usize {
        self.gains.iter().map(|&(_, g)| g).min().unwrap_or(0)
    }
}

fn same_dist(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

/// Whether shortcut `a → b` gives `u` a closest path to `z` of at most `k` hops.
fn fixes(ap: &AllPairs, u: NodeId, a: NodeId, b: NodeId, z: NodeId, k: u32) -> bool {
    let (ha, hb) = (ap.hops(u, a), ap.hops(b, z));
    if ha == u32::MAX || hb == u32::MAX || ha as u64 + 1 + hb as u64 > k as u64 {
        return false;
    }
    same_dist(ap.dist(u, a) + ap.dist(a, b) + ap.dist(b, z), ap.dist(u, z))
}

/// Nodes of `missing` fixed by inserting only the candidate `(x, y)`.
fn fixed_by(
    ap: &AllPairs,
    directed: bool,
    u: NodeId,
    (x, y): (NodeId, NodeId),
    missing: &[NodeId],
    k: u32,
) -> Vec<NodeId> {
    missing
        .iter()
        .copied()
        .filter(|&z| fixes(ap, u, x, y, z, k) || (!directed && fixes(ap, u, y, x, z, k)))
        .collect()
}

/// Missing nodes of `u` that count under the important-breadth rule: a leaf of the tree only
/// counts if it is among the two smallest-id leaf children of its parent.
fn important(tree: &ClosestPathTree, missing: &[NodeId]) -> Vec<NodeId> {
    let children = tree.children();
    missing
        .iter()
        .copied()
        .filter(|&v| {
            if !children[v].is_empty() {
                return true;
            }
            let p = tree.parent(v).expect("missing nodes are not the source");
            let rank = children[p]
                .iter()
                .filter(|&&w| children[w].is_empty() && w < v)
                .count();
            rank < 2
        })
        .collect()
}

/// Candidates on tree paths `u = p_0, …, p_L = v` with `i + 1 + (L - j) ≤ k`, oriented along
/// the path.
pub fn path_candidates(path: &[NodeId], k: u32) -> Vec<(NodeId, NodeId)> {
    let l = path.len().saturating_sub(1);
    let mut out = Vec::new();
    for i in 0..l {
        for j in i + 2..=l {
            if i + 1 + (l - j) <= k as usize {
                out.push((path[i], path[j]));
            }
        }
    }
    out
}

/// `(candidate, local score, gain)` contributed by `u`.
fn local_scores(
    g: &WeightedGraph,
    ap: &AllPairs,
    u: NodeId,
    k: u32,
    rho: usize,
) -> Vec<((NodeId, NodeId), f64, usize)> {
    let (profile, tree) = limited_profile(g, u, k, rho);
    if profile.missing.is_empty() {
        return Vec::new();
    }
    let mut oriented = BTreeSet::new();
    for v in important(&tree, &profile.missing) {
        for (a, b) in path_candidates(&tree.path_to(v), k) {
            let key = if g.is_directed() { (a, b) } else { (a.min(b), a.max(b)) };
            oriented.insert(key);
        }
    }
    oriented
        .into_iter()
        .map(|cand| {
            let fixed = fixed_by(ap, g.is_directed(), u, cand, &profile.missing, k).len();
            let remaining = profile.missing.len() - fixed;
            (cand, 1.0 / remaining.max(1) as f64, fixed)
        })
        .collect()
}

fn candidates_with(g: &WeightedGraph, ap: &AllPairs, k: u32, rho: usize) -> Vec<CandidateScore> {
    let per_node: Vec<_> = (0..g.node_count())
        .into_par_iter()
        .map(|u| local_scores(g, ap, u, k, rho))
        .collect();
    // Sequential merge in node order keeps floating-point sums reproducible.
    let mut pool: BTreeMap<(NodeId, NodeId), CandidateScore> = BTreeMap::new();
    for (u, scores) in per_node.into_iter().enumerate() {
        for ((x, y), s, gain) in scores {
            let entry = pool.entry((x, y)).or_insert_with(|| CandidateScore {
                x,
                y,
                score: 0.0,
                gains: Vec::new(),
            });
            entry.score += s;
            entry.gains.push((u, gain));
        }
    }
    pool.into_values().collect()
}

/// All pair-shortcut candidates with their pooled scores, sorted by pair.
pub fn pc_candidates(g: &WeightedGraph, k: u32, rho: usize) -> Result<Vec<CandidateScore>> {
    validate_params(g, k, rho)?;
    let ap = AllPairs::new(g);
    Ok(candidates_with(g, &ap, k, rho))
}

/// Population mean and standard deviation.
pub fn score_stats(scores: &[CandidateScore]) -> (f64, f64) {
    if scores.is_empty() {
        return (0.0, 0.0);
    }
    let n = scores.len() as f64;
    let mean = scores.iter().map(|c| c.score).sum::<f64>() / n;
    let var = scores.iter().map(|c| (c.score - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Candidates passing the `μ + 3σ` threshold, the contributor count and the per-contributor
/// gain rule, in descending score order.
pub fn pc_accepted(scores: &[CandidateScore], k: u32) -> Vec<&CandidateScore> {
    let (mean, sd) = score_stats(scores);
    let threshold = mean + 3.0 * sd;
    // Rounding can leave a sliver of deviation among equal scores.
    let slack = 1e-12 * mean.abs().max(1.0);
    let mut out: Vec<&CandidateScore> = scores
        .iter()
        .filter(|c| {
            c.score > threshold + slack && c.contributors() >= k as usize && c.min_gain() >= 2
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then((a.x, a.y).cmp(&(b.x, b.y))));
    out
}

/// First stage of pair shortcutting: the accepted candidates, with exact weights.
pub fn pc_stage(
    g: &WeightedGraph,
    k: u32,
    rho: usize,
    minhash: Option<&MinHashConfig>,
) -> Result<ShortcutSet> {
    validate_params(g, k, rho)?;
    let ap = AllPairs::new(g);
    let scores = candidates_with(g, &ap, k, rho);
    let accepted = pc_accepted(&scores, k);
    let mut out = ShortcutSet::for_graph(g);
    let mut filter = minhash.map(MinHashFilter::new).transpose()?;
    let n = g.node_count() as u64;
    let mut missing_cache: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for cand in accepted {
        if let Some(filter) = filter.as_mut() {
            let mut benefit = Vec::new();
            for &(u, _) in &cand.gains {
                let missing = missing_cache
                    .entry(u)
                    .or_insert_with(|| limited_profile(g, u, k, rho).0.missing);
                for z in fixed_by(&ap, g.is_directed(), u, (cand.x, cand.y), missing, k) {
                    benefit.push(u as u64 * n + z as u64);
                }
            }
            if !filter.offer(&benefit) {
                continue;
            }
        }
        out.insert(cand.x, cand.y, ap.dist(cand.x, cand.y));
    }
    Ok(out)
}

/// Pair shortcutting followed by DP on the augmented graph.
pub fn krho_dp_pc(
    g: &WeightedGraph,
    k: u32,
    rho: usize,
    minhash: Option<&MinHashConfig>,
) -> Result<ShortcutSet> {
    let mut out = pc_stage(g, k, rho, minhash)?;
    let mut h = g.clone();
    insert_unchecked(&mut h, &out);
    out.extend(&krho_dp_all(&h, k, rho)?);
    Ok(out)
}
