use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEntry {
    /// Total weight `d(source, v)`.
    pub dist: f64,
    /// Fewest edges among all paths of weight `dist`.
    pub hops: u32,
    /// `None` only for the source.
    pub parent: Option<NodeId>,
}

/// Shortest-path tree that minimizes `(weight, hops)` lexicographically.
///
/// Ties on both are broken towards the smaller parent id, so the tree is a deterministic
/// function of the graph.
#[derive(Debug, Clone)]
pub struct ClosestPathTree {
    source: NodeId,
    entries: Vec<Option<PathEntry>>,
    settle_order: Vec<NodeId>,
    reach_order: Vec<NodeId>,
}

/// Heap key: `(dist, hops, parent, node)`, compared lexicographically.
#[derive(Debug, Clone, Copy)]
struct Key {
    dist: f64,
    hops: u32,
    parent: NodeId,
    node: NodeId,
}

impl Key {
    fn label(&self) -> (f64, u32, NodeId) {
        (self.dist, self.hops, self.parent)
    }
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.hops.cmp(&other.hops))
            .then(self.parent.cmp(&other.parent))
            .then(self.node.cmp(&other.node))
    }
}

fn label_less(a: (f64, u32, NodeId), b: (f64, u32, NodeId)) -> bool {
    a.0.total_cmp(&b.0)
        .then(a.1.cmp(&b.1))
        .then(a.2.cmp(&b.2))
        == Ordering::Less
}

/// Lexicographic `(dist, hops)` Dijkstra from `source`.
///
/// With `limit = Some(l)` the search stops once `l` nodes besides the source are settled, after
/// also settling every further node at the distance of the last one. The settled set is then
/// exactly the source plus `N_l(source)`.
pub fn closest_path_tree(
    g: &WeightedGraph,
    source: NodeId,
    limit: Option<usize>,
) -> Result<ClosestPathTree> {
    g.check_node(source)?;
    if limit == Some(0) {
        return Err(Error::param("closest_path_tree limit must be at least 1"));
    }
    Ok(closest_path_tree_unchecked(g, source, limit))
}

pub(crate) fn closest_path_tree_unchecked(
    g: &WeightedGraph,
    source: NodeId,
    limit: Option<usize>,
) -> ClosestPathTree {
    let n = g.node_count();
    let mut best: Vec<Option<(f64, u32, NodeId)>> = vec![None; n];
    let mut entries: Vec<Option<PathEntry>> = vec![None; n];
    let mut settle_order = Vec::new();
    let mut heap = BinaryHeap::new();

    best[source] = Some((0.0, 0, source));
    heap.push(Reverse(Key {
        dist: 0.0,
        hops: 0,
        parent: source,
        node: source,
    }));
    let mut settled_beyond_source = 0usize;
    let mut cutoff: Option<f64> = None;

    while let Some(Reverse(key)) = heap.pop() {
        let u = key.node;
        if entries[u].is_some() || best[u] != Some(key.label()) {
            continue;
        }
        if let Some(c) = cutoff {
            if key.dist > c {
                break;
            }
        }
        entries[u] = Some(PathEntry {
            dist: key.dist,
            hops: key.hops,
            parent: (u != source).then_some(key.parent),
        });
        settle_order.push(u);
        if u != source {
            settled_beyond_source += 1;
            if cutoff.is_none() && limit.is_some_and(|l| settled_beyond_source >= l) {
                cutoff = Some(key.dist);
            }
        }
        for &(v, w) in g.neighbors(u) {
            if entries[v].is_some() {
                continue;
            }
            let cand = (key.dist + w, key.hops + 1, u);
            if best[v].is_none_or(|b| label_less(cand, b)) {
                best[v] = Some(cand);
                heap.push(Reverse(Key {
                    dist: cand.0,
                    hops: cand.1,
                    parent: u,
                    node: v,
                }));
            }
        }
    }

    let mut reach_order: Vec<NodeId> = settle_order.iter().copied().filter(|&v| v != source).collect();
    reach_order.sort_by(|&a, &b| {
        let (da, db) = (entries[a].unwrap().dist, entries[b].unwrap().dist);
        da.total_cmp(&db).then(a.cmp(&b))
    });

    ClosestPathTree {
        source,
        entries,
        settle_order,
        reach_order,
    }
}

impl ClosestPathTree {
    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn entry(&self, v: NodeId) -> Option<&PathEntry> {
        self.entries.get(v).and_then(Option::as_ref)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.entry(v).is_some()
    }

    /// `d(source, v)`, infinite when `v` was not reached.
    pub fn dist(&self, v: NodeId) -> f64 {
        self.entry(v).map_or(f64::INFINITY, |e| e.dist)
    }

    pub fn hops(&self, v: NodeId) -> Option<u32> {
        self.entry(v).map(|e| e.hops)
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.entry(v).and_then(|e| e.parent)
    }

    /// Nodes in the order they were settled; starts with the source, parents precede children.
    pub fn settle_order(&self) -> &[NodeId] {
        &self.settle_order
    }

    /// Reached nodes other than the source, sorted by `(dist, id)`.
    pub fn reach_order(&self) -> &[NodeId] {
        &self.reach_order
    }

    /// Number of reached nodes including the source.
    pub fn len(&self) -> usize {
        self.settle_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settle_order.is_empty()
    }

    /// Tree path `source, ..., v`; empty when `v` was not reached.
    pub fn path_to(&self, v: NodeId) -> Vec<NodeId> {
        if !self.contains(v) {
            return Vec::new();
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Children lists indexed by node id (empty for nodes outside the tree), each sorted by id.
    pub fn children(&self) -> Vec<Vec<NodeId>> {
        let mut children = vec![Vec::new(); self.entries.len()];
        for &v in &self.settle_order {
            if let Some(p) = self.parent(v) {
                children[p].push(v);
            }
        }
        for list in &mut children {
            list.sort_unstable();
        }
        children
    }
}

/// Dense all-pairs distances and hop distances.
#[derive(Debug, Clone)]
pub struct AllPairs {
    n: usize,
    dist: Vec<f64>,
    hops: Vec<u32>,
}

impl AllPairs {
    pub fn new(g: &WeightedGraph) -> Self {
        let n = g.node_count();
        let rows: Vec<(Vec<f64>, Vec<u32>)> = (0..n)
            .into_par_iter()
            .map(|s| {
                let tree = closest_path_tree_unchecked(g, s, None);
                let d = (0..n).map(|v| tree.dist(v)).collect();
                let h = (0..n).map(|v| tree.hops(v).unwrap_or(u32::MAX)).collect();
                (d, h)
            })
            .collect();
        let mut dist = Vec::with_capacity(n * n);
        let mut hops = Vec::with_capacity(n * n);
        for (d, h) in rows {
            dist.extend(d);
            hops.extend(h);
        }
        AllPairs { n, dist, hops }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dist(&self, u: NodeId, v: NodeId) -> f64 {
        self.dist[u * self.n + v]
    }

    /// `u32::MAX` when unreachable.
    pub fn hops(&self, u: NodeId, v: NodeId) -> u32 {
        self.hops[u * self.n + v]
    }

    pub fn dist_row(&self, u: NodeId) -> &[f64] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }
}
