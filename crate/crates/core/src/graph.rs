use std::collections::VecDeque;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Simple weighted graph with non-negative edge weights.
///
/// Adjacency lists are kept sorted by neighbor id. Undirected graphs store every edge in the
/// lists of both endpoints with the same weight; `edge_count` counts it once.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adjacency: Vec<Vec<(NodeId, f64)>>,
    directed: bool,
    edge_count: usize,
}

impl WeightedGraph {
    /// Graph on `n` nodes without edges.
    pub fn new(n: usize, directed: bool) -> Self {
        WeightedGraph {
            adjacency: vec![Vec::new(); n],
            directed,
            edge_count: 0,
        }
    }

    /// Builds a graph, rejecting self-loops, parallel edges and invalid weights.
    pub fn from_edges<I>(n: usize, edges: I, directed: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut g = WeightedGraph::new(n, directed);
        for (u, v, w) in edges {
            g.check_node(u)?;
            g.check_node(v)?;
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has invalid weight {w}"
                )));
            }
            if g.has_edge(u, v) {
                return Err(Error::InvalidGraph(format!("parallel edge ({u}, {v})")));
            }
            g.insert_edge(u, v, w);
        }
        Ok(g)
    }

    pub fn undirected<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        Self::from_edges(n, edges, false)
    }

    /// Undirected graph with unit weights.
    pub fn unit(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        Self::from_edges(n, edges.iter().map(|&(u, v)| (u, v, 1.0)), false)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Outgoing neighbors of `u` (all neighbors for undirected graphs), sorted by id.
    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u].len()
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let list = self.adjacency.get(u)?;
        list.binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.weight(u, v).is_some()
    }

    /// Every edge once; undirected edges are reported with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        let directed = self.directed;
        self.adjacency.iter().enumerate().flat_map(move |(u, list)| {
            list.iter()
                .filter(move |&&(v, _)| directed || u < v)
                .map(move |&(v, w)| (u, v, w))
        })
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.adjacency
            .iter()
            .all(|list| list.iter().all(|&(_, w)| w == 1.0))
    }

    pub fn check_node(&self, u: NodeId) -> Result<()> {
        if u < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: u,
                n: self.node_count(),
            })
        }
    }

    /// Adds `(u, v)` or lowers the weight of an existing edge to `w`.
    ///
    /// Callers guarantee `u != v`, ids in range and a valid weight.
    pub(crate) fn upsert_edge(&mut self, u: NodeId, v: NodeId, w: f64) {
        if self.has_edge(u, v) {
            self.lower_weight(u, v, w);
            if !self.directed {
                self.lower_weight(v, u, w);
            }
        } else {
            self.insert_edge(u, v, w);
        }
    }

    fn lower_weight(&mut self, u: NodeId, v: NodeId, w: f64) {
        let list = &mut self.adjacency[u];
        if let Ok(i) = list.binary_search_by_key(&v, |&(x, _)| x) {
            if w < list[i].1 {
                list[i].1 = w;
            }
        }
    }

    fn insert_edge(&mut self, u: NodeId, v: NodeId, w: f64) {
        Self::insert_sorted(&mut self.adjacency[u], v, w);
        if !self.directed {
            Self::insert_sorted(&mut self.adjacency[v], u, w);
        }
        self.edge_count += 1;
    }

    fn insert_sorted(list: &mut Vec<(NodeId, f64)>, v: NodeId, w: f64) {
        let pos = list.partition_point(|&(x, _)| x < v);
        list.insert(pos, (v, w));
    }

    /// Connected components (weak components for directed graphs), each sorted by id,
    /// ordered by their smallest node.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut undirected_adj: Vec<Vec<NodeId>> =
            self.adjacency.iter().map(|l| l.iter().map(|&(v, _)| v).collect()).collect();
        if self.directed {
            for (u, list) in self.adjacency.iter().enumerate() {
                for &(v, _) in list {
                    undirected_adj[v].push(u);
                }
            }
        }
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &undirected_adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced by `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[NodeId]) -> WeightedGraph {
        let mut index = vec![usize::MAX; self.node_count()];
        for (i, &u) in nodes.iter().enumerate() {
            index[u] = i;
        }
        let mut g = WeightedGraph::new(nodes.len(), self.directed);
        for (u, v, w) in self.edges() {
            if index[u] != usize::MAX && index[v] != usize::MAX {
                g.insert_edge(index[u], index[v], w);
            }
        }
        g
    }

    /// Largest connected component (ties go to the one with the smallest node) and the
    /// original ids of its nodes.
    pub fn largest_component(&self) -> (WeightedGraph, Vec<NodeId>) {
        let comps = self.components();
        let best = comps
            .into_iter()
            .fold(Vec::new(), |best, c| if c.len() > best.len() { c } else { best });
        (self.induced(&best), best)
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Same topology with every weight replaced by `f(u, v)`; undirected edges are
    /// visited once with `u < v`.
    pub fn reweighted(&self, mut f: impl FnMut(NodeId, NodeId) -> f64) -> WeightedGraph {
        let mut g = WeightedGraph::new(self.node_count(), self.directed);
        for (u, v, _) in self.edges() {
            g.insert_edge(u, v, f(u, v));
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_loops_and_parallel_edges() {
        assert!(WeightedGraph::unit(3, &[(0, 0)]).is_err());
        assert!(WeightedGraph::unit(3, &[(0, 1), (1, 0)]).is_err());
        assert!(WeightedGraph::undirected(2, [(0, 1, -1.0)]).is_err());
        assert!(WeightedGraph::undirected(2, [(0, 1, f64::NAN)]).is_err());
        assert!(WeightedGraph::unit(2, &[(0, 2)]).is_err());
        // Opposite arcs are distinct in a directed graph.
        assert!(WeightedGraph::from_edges(2, [(0, 1, 1.0), (1, 0, 2.0)], true).is_ok());
    }

    #[test]
    fn undirected_adjacency_is_symmetric() {
        let g = WeightedGraph::undirected(4, [(2, 0, 1.5), (0, 1, 2.0), (3, 1, 0.5)]).unwrap();
        assert_eq!(g.edge_count(), 3);
        for (u, v, w) in g.edges() {
            assert!(u < v);
            assert_eq!(g.weight(v, u), Some(w));
        }
        assert_eq!(g.neighbors(0), &[(1, 2.0), (2, 1.5)]);
    }

    #[test]
    fn upsert_lowers_existing_weight() {
        let mut g = WeightedGraph::undirected(3, [(0, 1, 5.0)]).unwrap();
        g.upsert_edge(1, 0, 2.0);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), Some(2.0));
        assert_eq!(g.weight(1, 0), Some(2.0));
        g.upsert_edge(1, 2, 1.0);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn largest_component_relabels() {
        let g = WeightedGraph::unit(6, &[(0, 1), (2, 3), (3, 4), (4, 5)]).unwrap();
        let (lcc, ids) = g.largest_component();
        assert_eq!(ids, vec![2, 3, 4, 5]);
        assert_eq!(lcc.node_count(), 4);
        assert_eq!(lcc.edge_count(), 3);
        assert!(lcc.has_edge(0, 1) && lcc.has_edge(2, 3));
    }
}
