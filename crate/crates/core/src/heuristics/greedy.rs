use rayon::prelude::*;

use crate::ball::{limited_profile, validate_params};
use crate::error::Result;
use crate::graph::{NodeId, WeightedGraph};
use crate::shortcut::ShortcutSet;

/// Links every node lacking a ball directly to all of its missing ρ-nearest nodes.
///
/// Nodes are handled independently on the input graph, like the per-source DP, so no node
/// profits from another node's shortcuts. Each node's shortcuts suffice for its own ball
/// because shortcuts only ever shorten hop counts.
pub fn krho_greedy(g: &WeightedGraph, k: u32, rho: usize) -> Result<ShortcutSet> {
    validate_params(g, k, rho)?;
    let per_node: Vec<Vec<(NodeId, f64)>> = (0..g.node_count())
        .into_par_iter()
        .map(|v| {
            let (profile, tree) = limited_profile(g, v, k, rho);
            profile.missing.iter().map(|&u| (u, tree.dist(u))).collect()
        })
        .collect();
    let mut out = ShortcutSet::for_graph(g);
    for (v, targets) in per_node.into_iter().enumerate() {
        for (u, w) in targets {
            out.insert(v, u, w);
        }
    }
    Ok(out)
}

/// Exact solver for `k = 1`: every missing pair must be linked directly, and those links are
/// also sufficient, so the union over all nodes is optimal.
pub fn solve_k1(g: &WeightedGraph, rho: usize) -> Result<ShortcutSet> {
    krho_greedy(g, 1, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::verify_krho;
    use crate::shortcut::apply_shortcuts;

    fn path(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        WeightedGraph::unit(n, &edges).unwrap()
    }

    #[test]
    fn krho_graph_needs_nothing() {
        let g = WeightedGraph::unit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(krho_greedy(&g, 1, 3).unwrap().is_empty());
        assert!(solve_k1(&g, 3).unwrap().is_empty());
    }

    #[test]
    fn greedy_on_path5() {
        let s = krho_greedy(&path(5), 2, 4).unwrap();
        let pairs: Vec<_> = s.iter().map(|s| (s.u, s.v)).collect();
        assert_eq!(pairs, vec![(0, 3), (0, 4), (1, 4)]);
        let h = apply_shortcuts(&path(5), &s).unwrap();
        assert!(verify_krho(&h, 2, 4).unwrap().is_empty());
    }

    #[test]
    fn k1_on_path3_links_the_ends_once() {
        let s = solve_k1(&path(3), 2).unwrap();
        let pairs: Vec<_> = s.iter().map(|s| (s.u, s.v, s.weight)).collect();
        assert_eq!(pairs, vec![(0, 2, 2.0)]);
    }
}
