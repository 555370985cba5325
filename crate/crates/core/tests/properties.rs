//! Property tests for the graph-core, heuristic and exact invariants.

use std::collections::BTreeMap;

use krho_core::exact::{build_ilp, candidate_pairs, lp_string, read_lp, Variant};
use krho_core::heuristics::{self, dp_per_source, sa_perturbations, Algorithm, HeuristicOptions};
use krho_core::io::{edge_list_string, read_edge_list};
use krho_core::{
    apply_shortcuts, ball_profile, closest_path_tree, verify_krho, AllPairs, ShortcutSet,
    WeightedGraph,
};
use proptest::prelude::*;

/// Dyadic weights keep every path sum exact and produce plenty of distance ties.
const WEIGHTS: [f64; 5] = [0.25, 0.5, 1.0, 1.5, 2.0];

fn arb_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n, any::<bool>(), any::<bool>()).prop_flat_map(|(n, directed, unit)| {
        let pair = (0..n, 0..n, 0..WEIGHTS.len());
        prop::collection::vec(pair, 0..=n * (n - 1)).prop_map(move |raw| {
            let mut edges = BTreeMap::new();
            for (u, v, w) in raw {
                if u == v {
                    continue;
                }
                let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
                edges.insert(key, if unit { 1.0 } else { WEIGHTS[w] });
            }
            let edges = edges.into_iter().map(|((u, v), w)| (u, v, w));
            WeightedGraph::from_edges(n, edges, directed).unwrap()
        })
    })
}

/// Random trees plus a few extra edges: long closest paths, so shortcuts are actually needed.
fn arb_sparse(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (3..=max_n, any::<bool>()).prop_flat_map(|(n, unit)| {
        let parents = prop::collection::vec((any::<prop::sample::Index>(), 0..WEIGHTS.len()), n - 1);
        let extra = prop::collection::vec((0..n, 0..n, 0..WEIGHTS.len()), 0..=n / 2);
        (parents, extra).prop_map(move |(parents, extra)| {
            let mut edges = BTreeMap::new();
            for (i, (p, w)) in parents.into_iter().enumerate() {
                edges.insert((p.index(i + 1), i + 1), w);
            }
            for (u, v, w) in extra {
                if u != v {
                    edges.insert((u.min(v), u.max(v)), w);
                }
            }
            let edges = edges
                .into_iter()
                .map(|((u, v), w)| (u, v, if unit { 1.0 } else { WEIGHTS[w] }));
            WeightedGraph::undirected(n, edges).unwrap()
        })
    })
}

/// A graph with valid `(k, ρ)`.
fn arb_instance(max_n: usize) -> impl Strategy<Value = (WeightedGraph, u32, usize)> {
    prop_oneof![arb_graph(max_n), arb_sparse(max_n)].prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), 1..=3u32, 1..n)
    })
}

/// Lexicographically smallest `(dist, hops)` over all simple paths `s → v`.
fn enumerate_best(g: &WeightedGraph, s: usize, v: usize) -> Option<(f64, u32)> {
    fn dfs(
        g: &WeightedGraph,
        u: usize,
        target: usize,
        on_path: &mut Vec<bool>,
        dist: f64,
        hops: u32,
        best: &mut Option<(f64, u32)>,
    ) {
        if u == target {
            let better = match *best {
                None => true,
                Some((d, h)) => dist < d || (dist == d && hops < h),
            };
            if better {
                *best = Some((dist, hops));
            }
            return;
        }
        for &(w, wt) in g.neighbors(u) {
            if !on_path[w] {
                on_path[w] = true;
                dfs(g, w, target, on_path, dist + wt, hops + 1, best);
                on_path[w] = false;
            }
        }
    }
    let mut on_path = vec![false; g.node_count()];
    on_path[s] = true;
    let mut best = None;
    dfs(g, s, v, &mut on_path, 0.0, 0, &mut best);
    best
}

fn distances_equal(a: &WeightedGraph, b: &WeightedGraph) -> bool {
    let (pa, pb) = (AllPairs::new(a), AllPairs::new(b));
    let n = a.node_count();
    (0..n).all(|u| (0..n).all(|v| pa.dist(u, v) == pb.dist(u, v)))
}

fn run_all(g: &WeightedGraph, k: u32, rho: usize) -> Vec<(Algorithm, ShortcutSet)> {
    let opts = HeuristicOptions {
        use_minhash: true,
        ..HeuristicOptions::default()
    };
    Algorithm::ALL
        .into_iter()
        .filter(|&a| a != Algorithm::K1 || k == 1)
        .map(|a| (a, heuristics::run(a, g, k, rho, &opts).unwrap()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn closest_paths_are_lexicographically_minimal(g in arb_graph(7)) {
        for s in 0..g.node_count() {
            let tree = closest_path_tree(&g, s, None).unwrap();
            for v in 0..g.node_count() {
                if v == s {
                    continue;
                }
                let want = enumerate_best(&g, s, v);
                let got = tree.hops(v).map(|h| (tree.dist(v), h));
                prop_assert_eq!(got, want, "s={} v={}", s, v);
                if let Some(p) = tree.parent(v) {
                    prop_assert_eq!(tree.dist(v), tree.dist(p) + g.weight(p, v).unwrap());
                    prop_assert_eq!(tree.hops(v).unwrap(), tree.hops(p).unwrap() + 1);
                }
            }
        }
    }

    #[test]
    fn ball_profiles_are_consistent((g, k, rho) in arb_instance(7)) {
        for v in 0..g.node_count() {
            let p = ball_profile(&g, v, k, rho).unwrap();
            let by_radius = p.rho_dist < p.k_radius
                || (p.rho_dist == f64::INFINITY && p.missing.is_empty());
            prop_assert_eq!(p.has_ball, by_radius);
            if p.has_ball {
                prop_assert!(p.missing.is_empty());
            }
        }
    }

    #[test]
    fn every_heuristic_is_valid_and_preserves_distances((g, k, rho) in arb_instance(7)) {
        for (algo, set) in run_all(&g, k, rho) {
            let h = apply_shortcuts(&g, &set).unwrap();
            prop_assert!(verify_krho(&h, k, rho).unwrap().is_empty(), "{} left violators", algo);
            prop_assert!(distances_equal(&g, &h), "{} changed distances", algo);
        }
    }

    #[test]
    fn heuristics_are_deterministic((g, k, rho) in arb_instance(7)) {
        let a: Vec<String> = run_all(&g, k, rho).iter().map(|(_, s)| s.to_lines()).collect();
        let b: Vec<String> = run_all(&g, k, rho).iter().map(|(_, s)| s.to_lines()).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn a_shortcut_never_increases_hops((g, _k, rho) in arb_instance(6), pick in any::<prop::sample::Index>()) {
        let cands = candidate_pairs(&g, rho);
        prop_assume!(!cands.is_empty());
        let (u, v, w) = cands[pick.index(cands.len())];
        let mut set = ShortcutSet::for_graph(&g);
        set.insert(u, v, w);
        let h = apply_shortcuts(&g, &set).unwrap();
        let (before, after) = (AllPairs::new(&g), AllPairs::new(&h));
        for x in 0..g.node_count() {
            for y in 0..g.node_count() {
                prop_assert!(after.hops(x, y) <= before.hops(x, y));
                prop_assert_eq!(after.dist(x, y), before.dist(x, y));
            }
        }
    }

    #[test]
    fn dp_is_optimal_per_source((g, k, rho) in arb_instance(7)) {
        let sources: Vec<usize> = (0..g.node_count()).collect();
        for sol in dp_per_source(&g, k, rho, &sources).unwrap() {
            let tree = sol.table.tree();
            let nodes: Vec<usize> = tree.settle_order().iter().copied().filter(|&x| x != sol.source).collect();
            // Fewest cut nodes that bring every tree node within depth k.
            let mut best = usize::MAX;
            for mask in 0u32..1 << nodes.len() {
                let cut = |x: usize| nodes.iter().position(|&y| y == x).is_some_and(|i| mask >> i & 1 == 1);
                let mut depth = vec![0u32; g.node_count()];
                let mut ok = true;
                for &x in &nodes {
                    depth[x] = if cut(x) { 1 } else { depth[tree.parent(x).unwrap()] + 1 };
                    ok &= depth[x] <= k;
                }
                if ok {
                    best = best.min(mask.count_ones() as usize);
                }
            }
            prop_assert_eq!(sol.len(), best);
            prop_assert_eq!(sol.table.cost() as usize, best);
            prop_assert!(sol.within_bound(rho));
            prop_assert!(sol.targets.iter().all(|&(x, _)| x != sol.source && tree.contains(x)));
        }
    }

    #[test]
    fn perturbed_solutions_still_serve_their_source(
        (g, k, rho) in arb_sparse(9).prop_flat_map(|g| {
            let n = g.node_count();
            (Just(g), 2..=4u32, (n / 2).max(1)..n)
        })
    ) {
        let sources: Vec<usize> = (0..g.node_count()).collect();
        let base = dp_per_source(&g, k, rho, &sources).unwrap();
        let ap = AllPairs::new(&g);
        let (families, _) = sa_perturbations(&g, k, &base, usize::MAX);
        for (sol, fam) in base.iter().zip(&families) {
            for (x, anchors) in &fam.alternatives {
                for &t in anchors {
                    let mut set = ShortcutSet::for_graph(&g);
                    for &(y, _) in &sol.targets {
                        if y != *x {
                            set.insert(sol.source, y, ap.dist(sol.source, y));
                        }
                    }
                    set.insert(t, *x, ap.dist(t, *x));
                    prop_assert_eq!(set.len(), sol.len());
                    let h = apply_shortcuts(&g, &set).unwrap();
                    let p = ball_profile(&h, sol.source, k, rho).unwrap();
                    prop_assert!(p.has_ball, "source {} anchor {} target {}", sol.source, t, x);
                }
            }
        }
    }

    #[test]
    fn lp_text_lists_every_variable_and_row((g, k, rho) in arb_instance(5)) {
        let variant = if g.is_directed() { Variant::D } else { Variant::U };
        let model = build_ilp(&g, k, rho, variant).unwrap();
        let text = lp_string(&model);
        let summary = read_lp(text.as_bytes()).unwrap();
        prop_assert_eq!(summary.rows.len(), model.rows.len());
        prop_assert_eq!(summary.binaries.len() + summary.generals.len(), model.vars.len());
        prop_assert_eq!(lp_string(&model), text);
    }

    #[test]
    fn edge_lists_round_trip(g in arb_graph(9)) {
        let text = edge_list_string(&g);
        let (back, report) = read_edge_list(text.as_bytes()).unwrap();
        prop_assert_eq!(report.duplicates_collapsed + report.self_loops_dropped, 0);
        prop_assert_eq!(edge_list_string(&back), text);
        prop_assert_eq!(back.is_directed(), g.is_directed());
    }
}
