use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedGraph};
use crate::paths::{closest_path_tree_unchecked, ClosestPathTree};

/// Ball data of a single node.
///
/// `has_ball` holds exactly when `missing` is empty: either `rho_dist < k_radius`, or the node
/// reaches fewer than ρ nodes (`rho_dist` infinite) and all of them within k hops.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallProfile {
    pub node: NodeId,
    /// Distance to the ρ-th closest node, infinite if fewer than ρ are reachable.
    pub rho_dist: f64,
    /// Smallest distance of a node more than k hops away, infinite if there is none.
    pub k_radius: f64,
    pub has_ball: bool,
    /// Nodes within `rho_dist` that need more than k hops, sorted by `(dist, id)`.
    pub missing: Vec<NodeId>,
}

/// Nodes without a ball, sorted by id. Empty iff the graph is a (k, ρ)-graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationReport {
    pub k: u32,
    pub rho: usize,
    pub violators: Vec<BallProfile>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violators.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violators.len()
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        self.violators.iter().map(|p| p.node).collect()
    }
}

/// Checks `k ≥ 1` and `1 ≤ rho ≤ n - 1`.
pub fn validate_params(g: &WeightedGraph, k: u32, rho: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let n = g.node_count();
    if rho == 0 || rho >= n {
        return Err(Error::param(format!(
            "rho = {rho} outside 1..={} for {n} nodes",
            n.saturating_sub(1)
        )));
    }
    Ok(())
}

/// Profile computed from a tree that settled at least `N_ρ(v)`.
///
/// `k_radius` is exact when the node has no ball or when the tree is complete; otherwise it is
/// only a lower bound on nodes outside the tree and is reported as computed on the settled set.
pub(crate) fn profile_from_tree(tree: &ClosestPathTree, k: u32, rho: usize) -> BallProfile {
    let order = tree.reach_order();
    let rho_dist = order.get(rho - 1).map_or(f64::INFINITY, |&u| tree.dist(u));
    let mut k_radius = f64::INFINITY;
    let mut missing = Vec::new();
    for &u in order {
        let far = tree.hops(u).is_some_and(|h| h > k);
        if far {
            let d = tree.dist(u);
            if d < k_radius {
                k_radius = d;
            }
            if d <= rho_dist {
                missing.push(u);
            }
        }
    }
    BallProfile {
        node: tree.source(),
        rho_dist,
        k_radius,
        has_ball: missing.is_empty(),
        missing,
    }
}

/// Limited tree (exactly `N_ρ(v)` plus ties) and the profile derived from it.
pub(crate) fn limited_profile(
    g: &WeightedGraph,
    v: NodeId,
    k: u32,
    rho: usize,
) -> (BallProfile, ClosestPathTree) {
    let tree = closest_path_tree_unchecked(g, v, Some(rho));
    (profile_from_tree(&tree, k, rho), tree)
}

pub fn ball_profile(g: &WeightedGraph, v: NodeId, k: u32, rho: usize) -> Result<BallProfile> {
    g.check_node(v)?;
    validate_params(g, k, rho)?;
    let tree = closest_path_tree_unchecked(g, v, None);
    Ok(profile_from_tree(&tree, k, rho))
}

/// Profiles of all nodes without a ball.
pub fn verify_krho(g: &WeightedGraph, k: u32, rho: usize) -> Result<ViolationReport> {
    validate_params(g, k, rho)?;
    let violators: Vec<BallProfile> = (0..g.node_count())
        .into_par_iter()
        .filter_map(|v| {
            // The limited tree holds every node at distance ≤ r_ρ, so the profile of a violator is
            // exact: its k-radius is attained inside the tree.
            let (p, _) = limited_profile(g, v, k, rho);
            (!p.has_ball).then_some(p)
        })
        .collect();
    Ok(ViolationReport { k, rho, violators })
}

/// Like [`verify_krho`] but stops at the first violator.
pub fn is_krho_graph(g: &WeightedGraph, k: u32, rho: usize) -> Result<bool> {
    validate_params(g, k, rho)?;
    Ok((0..g.node_count())
        .into_par_iter()
        .all(|v| limited_profile(g, v, k, rho).0.has_ball))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path5() -> WeightedGraph {
        WeightedGraph::unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap()
    }

    fn k4() -> WeightedGraph {
        WeightedGraph::unit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn path_end_misses_fourth_node() {
        let p = ball_profile(&path5(), 0, 2, 3).unwrap();
        assert_eq!(p.rho_dist, 3.0);
        assert_eq!(p.k_radius, 3.0);
        assert!(!p.has_ball);
        assert_eq!(p.missing, vec![3]);
    }

    #[test]
    fn complete_graph_has_all_balls() {
        let g = k4();
        for v in 0..4 {
            let p = ball_profile(&g, v, 1, 3).unwrap();
            assert_eq!(p.k_radius, f64::INFINITY);
            assert!(p.has_ball);
        }
        assert!(verify_krho(&g, 1, 3).unwrap().is_empty());
    }

    #[test]
    fn isolated_node_has_ball() {
        let g = WeightedGraph::unit(3, &[(1, 2)]).unwrap();
        let p = ball_profile(&g, 0, 1, 2).unwrap();
        assert_eq!(p.rho_dist, f64::INFINITY);
        assert!(p.missing.is_empty());
        assert!(p.has_ball);
    }

    #[test]
    fn underpopulated_component_needs_all_within_k() {
        // Component 0-1-2 plus isolated 3; rho = 3 exceeds what 0 can reach.
        let g = WeightedGraph::unit(4, &[(0, 1), (1, 2)]).unwrap();
        let p = ball_profile(&g, 0, 1, 3).unwrap();
        assert_eq!(p.rho_dist, f64::INFINITY);
        assert_eq!(p.missing, vec![2]);
        assert!(!p.has_ball);
        assert!(ball_profile(&g, 0, 2, 3).unwrap().has_ball);
    }

    #[test]
    fn path_violators_are_both_ends() {
        let r = verify_krho(&path5(), 2, 3).unwrap();
        assert_eq!(r.nodes(), vec![0, 4]);
        assert!(!is_krho_graph(&path5(), 2, 3).unwrap());
    }

    #[test]
    fn verify_matches_full_profiles() {
        let g = path5();
        for k in 1..4 {
            for rho in 1..5 {
                let r = verify_krho(&g, k, rho).unwrap();
                let full: Vec<BallProfile> = (0..5)
                    .map(|v| ball_profile(&g, v, k, rho).unwrap())
                    .filter(|p| !p.has_ball)
                    .collect();
                assert_eq!(r.violators, full);
            }
        }
    }

    #[test]
    fn rho_must_be_below_n() {
        assert!(matches!(
            ball_profile(&path5(), 0, 2, 5),
            Err(Error::InvalidParameter(_))
        ));
        assert!(verify_krho(&path5(), 2, 0).is_err());
        assert!(verify_krho(&path5(), 0, 2).is_err());
    }
}
