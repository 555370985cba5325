use rayon::prelude::*;
use serde::Serialize;

use crate::ball::validate_params;
use crate::error::Result;
use crate::graph::{NodeId, WeightedGraph};
use crate::paths::{closest_path_tree_unchecked, ClosestPathTree};
use crate::shortcut::ShortcutSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Choice {
    /// Shortcut from the source; the node moves to depth 1.
    Cut,
    /// Keep the tree edge; the node sits one below its parent.
    Skip,
}

/// `F(u, t)` over a source's tree truncated to `N_ρ(s)`.
///
/// `F(u, t)` is the fewest source-anchored shortcuts into the subtree of `u` when `u`'s parent
/// sits at depth `t`. Skipping is only allowed while `t + 1 ≤ k`, so every entry is finite.
/// Ties prefer `Skip`.
#[derive(Debug, Clone)]
pub struct DpTable {
    tree: ClosestPathTree,
    k: u32,
    /// `cells[u][t]` for tree nodes, empty for nodes outside the tree.
    cells: Vec<Vec<(u32, Choice)>>,
    children: Vec<Vec<NodeId>>,
}

impl DpTable {
    pub fn build(tree: ClosestPathTree, k: u32) -> Self {
        let n = tree.children().len();
        let children = tree.children();
        let width = k as usize + 1;
        let mut cells: Vec<Vec<(u32, Choice)>> = vec![Vec::new(); n];
        // Children are settled after their parents, so reverse settle order is bottom-up.
        for &u in tree.settle_order().iter().rev() {
            if u == tree.source() {
                continue;
            }
            let cut = 1 + children[u].iter().map(|&w| cells[w][1].0).sum::<u32>();
            let mut row = Vec::with_capacity(width);
            for t in 0..width {
                let entry = if t < k as usize {
                    let skip: u32 = children[u].iter().map(|&w| cells[w][t + 1].0).sum();
                    if skip <= cut {
                        (skip, Choice::Skip)
                    } else {
                        (cut, Choice::Cut)
                    }
                } else {
                    (cut, Choice::Cut)
                };
                row.push(entry);
            }
            cells[u] = row;
        }
        DpTable {
            tree,
            k,
            cells,
            children,
        }
    }

    pub fn tree(&self) -> &ClosestPathTree {
        &self.tree
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `F(u, t)`; `None` outside the tree, for the source, or for `t > k`.
    pub fn f(&self, u: NodeId, t: u32) -> Option<(u32, Choice)> {
        self.cells.get(u)?.get(t as usize).copied()
    }

    /// `Σ F(u, 0)` over the source's children.
    pub fn cost(&self) -> u32 {
        self.children[self.tree.source()]
            .iter()
            .map(|&u| self.cells[u][0].0)
            .sum()
    }

    /// Cut nodes in settle order, each with its final depth-1 status.
    pub fn traceback(&self) -> Vec<NodeId> {
        let s = self.tree.source();
        let mut out = Vec::new();
        let mut stack: Vec<(NodeId, u32)> = self.children[s].iter().rev().map(|&u| (u, 0)).collect();
        while let Some((u, t)) = stack.pop() {
            let depth = match self.cells[u][t as usize].1 {
                Choice::Cut => {
                    out.push(u);
                    1
                }
                Choice::Skip => t + 1,
            };
            for &w in self.children[u].iter().rev() {
                stack.push((w, depth));
            }
        }
        out.sort_by(|&a, &b| {
            self.tree
                .dist(a)
                .total_cmp(&self.tree.dist(b))
                .then(a.cmp(&b))
        });
        out
    }

    /// Depth each tree node ends up at after the traceback's shortcuts.
    pub fn final_depths(&self) -> Vec<Option<u32>> {
        let cut: std::collections::HashSet<NodeId> = self.traceback().into_iter().collect();
        let mut depth = vec![None; self.cells.len()];
        for &u in self.tree.settle_order() {
            depth[u] = Some(match self.tree.parent(u) {
                None => 0,
                Some(_) if cut.contains(&u) => 1,
                Some(p) => depth[p].unwrap() + 1,
            });
        }
        depth
    }
}

/// DP result for one source: the shortcut targets `(x, d(s, x))`.
#[derive(Debug, Clone)]
pub struct SourceSolution {
    pub source: NodeId,
    pub targets: Vec<(NodeId, f64)>,
    pub table: DpTable,
}

impl SourceSolution {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// `|S_i| · (k - 1) < ρ`, the per-source size bound.
    pub fn within_bound(&self, rho: usize) -> bool {
        let k = self.table.k();
        k <= 1 || self.targets.len() * (k as usize - 1) < rho
    }
}

pub(crate) fn dp_source_unchecked(g: &WeightedGraph, s: NodeId, k: u32, rho: usize) -> SourceSolution {
    let tree = closest_path_tree_unchecked(g, s, Some(rho));
    let table = DpTable::build(tree, k);
    let targets = table
        .traceback()
        .into_iter()
        .map(|x| (x, table.tree().dist(x)))
        .collect();
    SourceSolution {
        source: s,
        targets,
        table,
    }
}

pub fn dp_source(g: &WeightedGraph, s: NodeId, k: u32, rho: usize) -> Result<SourceSolution> {
    g.check_node(s)?;
    validate_params(g, k, rho)?;
    Ok(dp_source_unchecked(g, s, k, rho))
}

/// Per-source solutions in the order of `sources`.
pub fn dp_per_source(
    g: &WeightedGraph,
    k: u32,
    rho: usize,
    sources: &[NodeId],
) -> Result<Vec<SourceSolution>> {
    validate_params(g, k, rho)?;
    for &s in sources {
        g.check_node(s)?;
    }
    Ok(sources
        .par_iter()
        .map(|&s| dp_source_unchecked(g, s, k, rho))
        .collect())
}

pub(crate) fn union_of(g: &WeightedGraph, sols: &[SourceSolution]) -> ShortcutSet {
    let mut set = ShortcutSet::for_graph(g);
    for sol in sols {
        for &(x, w) in &sol.targets {
            set.insert(sol.source, x, w);
        }
    }
    set
}

/// Union of the per-source DP solutions of `sources`, all computed on `g`.
pub fn krho_dp(g: &WeightedGraph, k: u32, rho: usize, sources: &[NodeId]) -> Result<ShortcutSet> {
    Ok(union_of(g, &dp_per_source(g, k, rho, sources)?))
}

/// [`krho_dp`] on every node.
pub fn krho_dp_all(g: &WeightedGraph, k: u32, rho: usize) -> Result<ShortcutSet> {
    let sources: Vec<NodeId> = (0..g.node_count()).collect();
    krho_dp(g, k, rho, &sources)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{ball_profile, verify_krho};
    use crate::shortcut::apply_shortcuts;

    fn path(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        WeightedGraph::unit(n, &edges).unwrap()
    }

    #[test]
    fn path4_needs_one_shortcut() {
        let sol = dp_source(&path(4), 0, 2, 3).unwrap();
        assert_eq!(sol.table.cost(), 1);
        // Cutting 2 or 3 both cost one; the tie goes to the deeper node.
        assert_eq!(sol.table.f(2, 1), Some((1, Choice::Skip)));
        assert_eq!(sol.targets, vec![(3, 3.0)]);
        let depths = sol.table.final_depths();
        assert_eq!(depths[2], Some(2));
        assert_eq!(depths[3], Some(1));
    }

    #[test]
    fn shallow_tree_needs_nothing() {
        let g = WeightedGraph::unit(4, &[(0, 1), (0, 2), (1, 3)]).unwrap();
        assert!(dp_source(&g, 0, 2, 3).unwrap().is_empty());
    }

    #[test]
    fn path5_all_sources() {
        let g = path(5);
        let s = krho_dp_all(&g, 2, 4).unwrap();
        let pairs: Vec<_> = s.iter().map(|s| (s.u, s.v)).collect();
        assert_eq!(pairs, vec![(0, 3), (1, 4)]);
        let h = apply_shortcuts(&g, &s).unwrap();
        assert!(verify_krho(&h, 2, 4).unwrap().is_empty());
    }

    #[test]
    fn k1_cuts_every_far_node() {
        let sol = dp_source(&path(5), 0, 1, 4).unwrap();
        let xs: Vec<_> = sol.targets.iter().map(|t| t.0).collect();
        assert_eq!(xs, vec![2, 3, 4]);
    }

    #[test]
    fn each_source_gets_its_ball() {
        let g = WeightedGraph::unit(
            8,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (5, 6), (6, 7)],
        )
        .unwrap();
        for k in 1..4 {
            for rho in 1..8 {
                for s in 0..8 {
                    let sol = dp_source(&g, s, k, rho).unwrap();
                    assert_eq!(sol.table.cost() as usize, sol.len());
                    let mut set = ShortcutSet::for_graph(&g);
                    for &(x, w) in &sol.targets {
                        assert_ne!(x, s);
                        set.insert(s, x, w);
                    }
                    let h = apply_shortcuts(&g, &set).unwrap();
                    assert!(ball_profile(&h, s, k, rho).unwrap().has_ball);
                }
            }
        }
    }
}
