//! Statistical and structural checks of the instance generators.

use std::collections::{BTreeSet, VecDeque};

use krho_core::generators::{
    default_gamma, gen_gilbert, gen_hyperbolic, gen_mc_powerlaw, havel_hakimi, lowerbound_star,
    vc_to_msp_transform, Role, WeightMode,
};
use krho_core::io::edge_list_string;
use krho_core::{ball_profile, verify_krho, WeightedGraph};
use rayon::prelude::*;

fn edge_set(g: &WeightedGraph) -> BTreeSet<(usize, usize)> {
    g.edges().map(|(u, v, _)| (u.min(v), u.max(v))).collect()
}

fn hop_distances(g: &WeightedGraph, s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    dist[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in g.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

#[test]
fn gilbert_extremes() {
    let full = gen_gilbert(9, 1.0, 4, WeightMode::Unit).unwrap();
    assert_eq!(full.edge_count(), 36);
    assert_eq!(gen_gilbert(9, 0.0, 4, WeightMode::Unit).unwrap().edge_count(), 0);
    assert!(gen_gilbert(9, 1.5, 4, WeightMode::Unit).is_err());
}

#[test]
fn gilbert_edge_counts_follow_the_binomial() {
    let (n, p) = (1000usize, 3.0 / 1000.0);
    let pairs = (n * (n - 1) / 2) as f64;
    let (mean, sd) = (pairs * p, (pairs * p * (1.0 - p)).sqrt());
    let counts: Vec<usize> = (0..30u64)
        .map(|seed| gen_gilbert(n, p, seed, WeightMode::Unit).unwrap().edge_count())
        .collect();
    for &m in &counts {
        assert!((m as f64 - mean).abs() <= 4.0 * sd, "{m} vs {mean}±{sd}");
    }
    let avg = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    assert!((avg - mean).abs() <= 4.0 * sd / (counts.len() as f64).sqrt());
}

#[test]
fn gilbert_weight_modes_share_topology() {
    let unit = gen_gilbert(40, 0.2, 11, WeightMode::Unit).unwrap();
    let real = gen_gilbert(40, 0.2, 11, WeightMode::Uniform01).unwrap();
    assert_eq!(edge_set(&unit), edge_set(&real));
    assert!(real.edges().all(|(_, _, w)| w > 0.0 && w <= 1.0));
    let distinct: BTreeSet<u64> = real.edges().map(|(_, _, w)| w.to_bits()).collect();
    assert_eq!(distinct.len(), real.edge_count());
}

#[test]
fn generators_are_reproducible() {
    let twice = |f: &dyn Fn() -> WeightedGraph| edge_list_string(&f()) == edge_list_string(&f());
    assert!(twice(&|| gen_gilbert(50, 0.1, 3, WeightMode::Uniform01).unwrap()));
    assert!(twice(&|| gen_hyperbolic(200, 3.0, 3.0, 3).unwrap()));
    assert!(twice(&|| gen_mc_powerlaw(70, 3.0, 100, 3).unwrap()));
    let a = gen_gilbert(50, 0.1, 3, WeightMode::Unit).unwrap();
    let b = gen_gilbert(50, 0.1, 4, WeightMode::Unit).unwrap();
    assert_ne!(edge_set(&a), edge_set(&b));
}

#[test]
fn hyperbolic_tiny_graphs_are_simple() {
    for seed in 0..20 {
        let g = gen_hyperbolic(2, 0.5, 3.0, seed).unwrap();
        assert!(g.edge_count() <= 1);
    }
    assert!(gen_hyperbolic(100, 3.0, 2.0, 0).is_err());
    assert!(gen_hyperbolic(10, 20.0, 3.0, 0).is_err());
}

#[test]
fn hyperbolic_mean_degree_and_tail() {
    let n = 10_000;
    let graphs: Vec<WeightedGraph> = (0..20u64)
        .into_par_iter()
        .map(|seed| gen_hyperbolic(n, 3.0, 3.0, seed).unwrap())
        .collect();
    let mean = 2.0 * graphs[0].edge_count() as f64 / n as f64;
    assert!((2.4..=3.6).contains(&mean), "mean degree {mean}");

    // Pooled CCDF over degrees ≥ 10, fitted on a log-log scale.
    let degrees: Vec<usize> = graphs.iter().flat_map(|g| g.degrees()).collect();
    let tail: Vec<usize> = degrees.iter().copied().filter(|&d| d >= 10).collect();
    let max = *tail.iter().max().unwrap();
    let mut points = Vec::new();
    for d in 10..=max {
        let above = tail.iter().filter(|&&x| x >= d).count();
        if above >= 5 {
            points.push(((d as f64).ln(), (above as f64 / degrees.len() as f64).ln()));
        }
    }
    let k = points.len() as f64;
    let (mx, my) = (
        points.iter().map(|p| p.0).sum::<f64>() / k,
        points.iter().map(|p| p.1).sum::<f64>() / k,
    );
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((-2.6..=-1.6).contains(&slope), "CCDF slope {slope}");
}

#[test]
fn mc_powerlaw_without_swaps_is_the_havel_hakimi_graph() {
    for seed in 0..10 {
        let g = gen_mc_powerlaw(60, 3.0, 0, seed).unwrap();
        let hh = havel_hakimi(&g.degrees()).unwrap();
        let want: BTreeSet<(usize, usize)> = hh.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        assert_eq!(edge_set(&g), want);
    }
}

#[test]
fn mc_powerlaw_swaps_keep_degrees_and_move_edges() {
    let mut moved = 0;
    for seed in 0..40 {
        let start = gen_mc_powerlaw(70, 3.0, 0, seed).unwrap();
        let g = gen_mc_powerlaw(70, 3.0, 100, seed).unwrap();
        assert_eq!(g.degrees(), start.degrees(), "seed {seed}");
        assert!(g.is_unit_weighted());
        moved += usize::from(edge_set(&g) != edge_set(&start));
    }
    assert!(moved * 100 >= 95 * 40, "{moved}/40 randomized");
}

#[test]
fn transform_structure_for_random_inputs() {
    for seed in 0..12u64 {
        let n = 3 + (seed as usize * 7) % 48;
        let input = gen_gilbert(n, 3.0 / n as f64, seed, WeightMode::Unit).unwrap();
        for k in [3, 4, 5] {
            let t = vc_to_msp_transform(&input, k, None, None).unwrap();
            let g = &t.graph;
            let (m, gamma) = (input.edge_count(), default_gamma(n));
            assert_eq!(t.gamma, gamma);
            assert_eq!(t.rho, gamma);
            let subs = 2 * (k as usize - 3) + 1;
            assert_eq!(g.node_count(), n + m * subs + n * (gamma + 2));
            assert!(g.is_unit_weighted());
            for v in 0..n {
                let (b, s) = (t.bases[v], t.satellites[v]);
                assert_eq!(g.degree(b), gamma + 1);
                assert!(g.has_edge(v, s) && g.has_edge(s, b));
                assert_eq!(g.degree(s), 2);
                let leaves = g.neighbors(b).iter().filter(|&&(x, _)| t.roles[x] == Role::PitchforkLeaf);
                assert_eq!(leaves.count(), gamma);
            }
            for (&(u, v), &w) in &t.edge_nodes {
                let hops = hop_distances(g, u);
                assert_eq!(hops[v], Some(2 * (k as usize - 3) + 2));
                assert_eq!(hops[w], Some(k as usize - 2));
                if k == 3 {
                    assert!(g.has_edge(u, w) && g.has_edge(w, v));
                }
            }
        }
    }
}

#[test]
fn blowup_nodes_stay_far_from_edge_nodes() {
    let input = WeightedGraph::unit(4, &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
    let plain = vc_to_msp_transform(&input, 3, None, None).unwrap();
    let blown = vc_to_msp_transform(&input, 3, None, Some(12)).unwrap();
    assert_eq!(blown.blowup.len(), 12);
    assert_eq!(blown.graph.node_count(), plain.graph.node_count() + 12);
    for w in blown.edge_node_list() {
        let hops = hop_distances(&blown.graph, w);
        for &y in &blown.blowup {
            assert!(hops[y].unwrap() >= blown.k as usize + 2);
        }
    }
    let before = verify_krho(&plain.graph, 3, plain.rho).unwrap();
    let after = verify_krho(&blown.graph, 3, blown.rho).unwrap();
    let ids = |r: &krho_core::ViolationReport| r.violators.iter().map(|p| p.node).collect::<Vec<_>>();
    assert_eq!(ids(&before), ids(&after));
}

#[test]
fn lower_bound_star_greedy_grows_linearly_per_tip() {
    let mut per_tip = Vec::new();
    for n in [5, 10, 20] {
        let lb = lowerbound_star(n, 3, None).unwrap();
        let report = verify_krho(&lb.graph, 3, lb.rho).unwrap();
        let violators: Vec<usize> = report.violators.iter().map(|p| p.node).collect();
        assert_eq!(violators, lb.tips);
        let counts: BTreeSet<usize> = lb
            .tips
            .iter()
            .map(|&t| ball_profile(&lb.graph, t, 3, lb.rho).unwrap().missing.len())
            .collect();
        assert_eq!(counts.len(), 1, "every tip misses the same number of nodes");
        per_tip.push(*counts.first().unwrap() as f64);
    }
    // Linear in n: doubling the step from 5 to 10 nodes doubles the increase.
    let ratio = (per_tip[2] - per_tip[1]) / (per_tip[1] - per_tip[0]);
    assert!((1.5..=2.5).contains(&ratio), "per-tip counts {per_tip:?}");
}
