use std::collections::HashSet;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::weights::{assign_weights, WeightMode};
use crate::graph::{NodeId, WeightedGraph};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_graph(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> WeightedGraph {
    WeightedGraph::from_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)), false)
        .expect("generators emit simple graphs")
}

/// `𝒢(n, p)`: every unordered pair independently with probability `p`.
pub fn gen_gilbert(n: usize, p: f64, seed: u64, weights: WeightMode) -> Result<WeightedGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("edge probability {p} outside [0, 1]")));
    }
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(assign_weights(&unit_graph(n, edges), weights, seed))
}

/// Expected degree in the threshold hyperbolic model with disk radius `big_r`.
///
/// Midpoint quadrature over the radial quantiles of both endpoints; for fixed radii the
/// angular connection probability is `θ*/π`.
pub fn hyperbolic_expected_degree(n: usize, big_r: f64, alpha: f64) -> f64 {
    const GRID: usize = 400;
    let span = (alpha * big_r).cosh() - 1.0;
    let radii: Vec<(f64, f64)> = (0..GRID)
        .map(|i| {
            let u = (i as f64 + 0.5) / GRID as f64;
            let r = (1.0 + u * span).acosh() / alpha;
            (r.cosh(), r.sinh())
        })
        .collect();
    let cosh_r = big_r.cosh();
    let mut total = 0.0;
    for &(c1, s1) in &radii {
        for &(c2, s2) in &radii {
            let denom = s1 * s2;
            let p = if denom <= 0.0 {
                1.0
            } else {
                let c = (c1 * c2 - cosh_r) / denom;
                if c >= 1.0 {
                    0.0
                } else if c <= -1.0 {
                    1.0
                } else {
                    c.acos() / PI
                }
            };
            total += p;
        }
    }
    (n as f64 - 1.0) * total / (GRID * GRID) as f64
}

/// Disk radius whose expected average degree is `avg_deg`, by bisection. Larger disks are
/// sparser.
pub fn hyperbolic_radius(n: usize, avg_deg: f64, gamma_pl: f64) -> Result<f64> {
    if gamma_pl <= 2.0 {
        return Err(Error::param(format!("powerlaw exponent {gamma_pl} must exceed 2")));
    }
    if n < 2 || !(avg_deg > 0.0 && avg_deg < (n - 1) as f64) {
        return Err(Error::Generator(format!(
            "average degree {avg_deg} unreachable with {n} nodes"
        )));
    }
    let alpha = (gamma_pl - 1.0) / 2.0;
    let deg = |r: f64| hyperbolic_expected_degree(n, r, alpha);
    let (mut lo, mut hi) = (0.0, 1.0);
    while deg(hi) > avg_deg {
        lo = hi;
        hi *= 2.0;
        // cosh overflows past ~700.
        if alpha * hi > 600.0 {
            return Err(Error::Generator(format!(
                "no disk radius reaches average degree {avg_deg}"
            )));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if deg(mid) > avg_deg {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Threshold (`T = 0`) hyperbolic random graph with unit weights.
pub fn gen_hyperbolic(n: usize, avg_deg: f64, gamma_pl: f64, seed: u64) -> Result<WeightedGraph> {
    let big_r = hyperbolic_radius(n, avg_deg, gamma_pl)?;
    let alpha = (gamma_pl - 1.0) / 2.0;
    let span = (alpha * big_r).cosh() - 1.0;
    let mut r = rng(seed);
    let points: Vec<(f64, f64, f64)> = (0..n)
        .map(|_| {
            let theta = r.gen::<f64>() * 2.0 * PI;
            let radius = (1.0 + r.gen::<f64>() * span).acosh() / alpha;
            (theta, radius.cosh(), radius.sinh())
        })
        .collect();
    let cosh_r = big_r.cosh();
    let adj: Vec<Vec<NodeId>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let (tu, cu, su) = points[u];
            (u + 1..n)
                .filter(|&v| {
                    let (tv, cv, sv) = points[v];
                    cu * cv - su * sv * (tu - tv).cos() <= cosh_r
                })
                .collect()
        })
        .collect();
    let edges = adj
        .into_iter()
        .enumerate()
        .flat_map(|(u, vs)| vs.into_iter().map(move |v| (u, v)));
    Ok(unit_graph(n, edges))
}

/// Erdős–Gallai test.
pub fn is_graphical(degrees: &[usize]) -> bool {
    let mut d: Vec<usize> = degrees.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let n = d.len();
    if d.iter().sum::<usize>() % 2 == 1 {
        return false;
    }
    if d.first().is_some_and(|&x| x >= n) {
        return false;
    }
    let mut prefix = 0;
    for k in 1..=n {
        prefix += d[k - 1];
        let tail: usize = d[k..].iter().map(|&x| x.min(k)).sum();
        if prefix > k * (k - 1) + tail {
            return false;
        }
    }
    true
}

/// `P[deg = x] ∝ x^{-γ}` on `1..=n-1`, by inverse CDF.
pub fn powerlaw_degree_sequence(n: usize, gamma_pl: f64, rng: &mut impl Rng) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(n.saturating_sub(1));
    let mut acc = 0.0;
    for x in 1..n {
        acc += (x as f64).powf(-gamma_pl);
        cdf.push(acc);
    }
    (0..n)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            cdf.partition_point(|&c| c < u).min(cdf.len() - 1) + 1
        })
        .collect()
}

/// Deterministic Havel–Hakimi realization: the node with the largest residual degree (smallest
/// id on ties) connects to the next largest ones.
pub fn havel_hakimi(degrees: &[usize]) -> Result<Vec<(NodeId, NodeId)>> {
    let n = degrees.len();
    let mut rem: Vec<(usize, NodeId)> = degrees.iter().copied().zip(0..n).collect();
    let mut edges = Vec::new();
    loop {
        rem.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let (d, u) = rem[0];
        if d == 0 {
            break;
        }
        if d >= n || rem[d].0 == 0 {
            return Err(Error::Generator("degree sequence is not graphical".into()));
        }
        rem[0].0 = 0;
        for entry in rem.iter_mut().skip(1).take(d) {
            entry.0 -= 1;
            edges.push((u.min(entry.1), u.max(entry.1)));
        }
    }
    edges.sort_unstable();
    Ok(edges)
}

/// `swaps_per_edge · |E|` attempted double-edge swaps `{a,b},{c,d} → {a,d},{c,b}`; swaps that
/// would create a loop or a multi-edge are rejected. Degrees are preserved exactly.
pub fn degree_preserving_swaps(
    n: usize,
    mut edges: Vec<(NodeId, NodeId)>,
    swaps_per_edge: usize,
    rng: &mut impl Rng,
) -> Vec<(NodeId, NodeId)> {
    let m = edges.len();
    if m < 2 {
        return edges;
    }
    let key = |a: NodeId, b: NodeId| (a.min(b), a.max(b));
    let mut present: HashSet<(NodeId, NodeId)> = edges.iter().map(|&(a, b)| key(a, b)).collect();
    for _ in 0..swaps_per_edge * m {
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m);
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b || present.contains(&key(a, d)) || present.contains(&key(c, b)) {
            continue;
        }
        present.remove(&key(a, b));
        present.remove(&key(c, d));
        present.insert(key(a, d));
        present.insert(key(c, b));
        edges[i] = key(a, d);
        edges[j] = key(c, b);
    }
    debug_assert!(edges.iter().all(|&(a, b)| a < b && b < n));
    edges.sort_unstable();
    edges
}

/// `ℳ𝒞(G, s)` on a powerlaw `G`: sample a graphical powerlaw sequence, realize it with
/// Havel–Hakimi and randomize with `swaps_per_edge` swaps per edge. Unit weights.
pub fn gen_mc_powerlaw(
    n: usize,
    gamma_pl: f64,
    swaps_per_edge: usize,
    seed: u64,
) -> Result<WeightedGraph> {
    const ATTEMPTS: usize = 1000;
    if n < 2 {
        return Err(Error::param("powerlaw graphs need at least 2 nodes"));
    }
    let mut r = rng(seed);
    for _ in 0..ATTEMPTS {
        let degrees = powerlaw_degree_sequence(n, gamma_pl, &mut r);
        if !is_graphical(&degrees) {
            continue;
        }
        let initial = havel_hakimi(&degrees)?;
        let edges = degree_preserving_swaps(n, initial, swaps_per_edge, &mut r);
        return Ok(unit_graph(n, edges));
    }
    Err(Error::Generator(format!(
        "no graphical powerlaw sequence after {ATTEMPTS} samples"
    )))
}
