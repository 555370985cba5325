use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedGraph};
use crate::paths::closest_path_tree_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shortcut {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: f64,
}

impl fmt::Display for Shortcut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.u, self.v, self.weight)
    }
}

/// Deduplicated shortcuts in canonical order.
///
/// Undirected sets store each pair as `(min, max)`. Re-inserting a pair keeps the first weight.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShortcutSet {
    directed: bool,
    pairs: BTreeMap<(NodeId, NodeId), f64>,
}

impl ShortcutSet {
    pub fn new(directed: bool) -> Self {
        ShortcutSet {
            directed,
            pairs: BTreeMap::new(),
        }
    }

    /// Empty set matching the orientation of `g`.
    pub fn for_graph(g: &WeightedGraph) -> Self {
        Self::new(g.is_directed())
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    fn key(&self, u: NodeId, v: NodeId) -> (NodeId, NodeId) {
        if self.directed {
            (u, v)
        } else {
            (u.min(v), u.max(v))
        }
    }

    /// Returns false if the pair was already present.
    pub fn insert(&mut self, u: NodeId, v: NodeId, weight: f64) -> bool {
        let key = self.key(u, v);
        if self.pairs.contains_key(&key) {
            return false;
        }
        self.pairs.insert(key, weight);
        true
    }

    pub fn contains(&self, u: NodeId, v: NodeId) -> bool {
        self.pairs.contains_key(&self.key(u, v))
    }

    pub fn remove(&mut self, u: NodeId, v: NodeId) -> bool {
        let key = self.key(u, v);
        self.pairs.remove(&key).is_some()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Shortcut> + '_ {
        self.pairs
            .iter()
            .map(|(&(u, v), &weight)| Shortcut { u, v, weight })
    }

    pub fn extend(&mut self, other: &ShortcutSet) {
        for s in other.iter() {
            self.insert(s.u, s.v, s.weight);
        }
    }

    /// One `u v w` line per shortcut.
    pub fn write_lines(&self, mut w: impl Write) -> Result<()> {
        for s in self.iter() {
            writeln!(w, "{s}")?;
        }
        Ok(())
    }

    pub fn to_lines(&self) -> String {
        self.iter().map(|s| format!("{s}\n")).collect()
    }

    /// Parses `u v [w]` lines; a missing weight is NaN and must be filled by
    /// [`ShortcutSet::with_graph_weights`] before use.
    pub fn read_lines(reader: impl BufRead, directed: bool) -> Result<Self> {
        let mut set = ShortcutSet::new(directed);
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let toks: Vec<&str> = t.split_whitespace().collect();
            if toks.len() < 2 || toks.len() > 3 {
                return Err(bad("expected 'u v [w]'"));
            }
            let u: NodeId = toks[0].parse().map_err(|_| bad("bad node id"))?;
            let v: NodeId = toks[1].parse().map_err(|_| bad("bad node id"))?;
            let w: f64 = match toks.get(2) {
                Some(t) => t.parse().map_err(|_| bad("bad weight"))?,
                None => f64::NAN,
            };
            set.insert(u, v, w);
        }
        Ok(set)
    }

    /// Copy whose weights are replaced by the distances in `g`; unreachable pairs become infinite.
    pub fn with_graph_weights(&self, g: &WeightedGraph) -> Result<Self> {
        let mut out = ShortcutSet::new(self.directed);
        for (u, targets) in self.by_source() {
            g.check_node(u)?;
            let tree = closest_path_tree_unchecked(g, u, None);
            for (v, _) in targets {
                g.check_node(v)?;
                out.insert(u, v, tree.dist(v));
            }
        }
        Ok(out)
    }

    fn by_source(&self) -> BTreeMap<NodeId, Vec<(NodeId, f64)>> {
        let mut groups: BTreeMap<NodeId, Vec<(NodeId, f64)>> = BTreeMap::new();
        for s in self.iter() {
            groups.entry(s.u).or_default().push((s.v, s.weight));
        }
        groups
    }
}

fn weights_match(supplied: f64, d: f64) -> bool {
    (supplied - d).abs() <= 1e-9 * d.max(1.0)
}

/// Returns `g` with every shortcut inserted at weight `d(u, v)`.
///
/// Each pair must be connected and need more than one hop. An existing edge heavier than
/// `d(u, v)` still needs more hops and is lowered to `d(u, v)`; an edge that already is a
/// closest path is rejected as a duplicate. Validation runs against `g`, not the partially
/// augmented graph, which is equivalent because shortcuts preserve distances.
pub fn apply_shortcuts(g: &WeightedGraph, s: &ShortcutSet) -> Result<WeightedGraph> {
    if s.is_directed() != g.is_directed() {
        return Err(Error::param(
            "shortcut set orientation does not match the graph",
        ));
    }
    let mut out = g.clone();
    for (u, targets) in s.by_source() {
        g.check_node(u)?;
        let tree = closest_path_tree_unchecked(g, u, None);
        for (v, w) in targets {
            g.check_node(v)?;
            let reject = |reason: String| Error::InvalidShortcut { u, v, reason };
            if u == v {
                return Err(reject("self-loop".into()));
            }
            let Some(hops) = tree.hops(v) else {
                return Err(reject("endpoints are disconnected".into()));
            };
            let d = tree.dist(v);
            if hops <= 1 {
                return Err(reject("duplicates an existing edge".into()));
            }
            if !weights_match(w, d) {
                return Err(reject(format!("weight {w} differs from distance {d}")));
            }
            out.upsert_edge(u, v, d);
        }
    }
    Ok(out)
}

/// Inserts shortcuts whose weights are already exact distances, skipping validation.
pub(crate) fn insert_unchecked(g: &mut WeightedGraph, s: &ShortcutSet) {
    for sc in s.iter() {
        g.upsert_edge(sc.u, sc.v, sc.weight);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::closest_path_tree;

    fn path5() -> WeightedGraph {
        WeightedGraph::unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap()
    }

    #[test]
    fn shortcut_becomes_single_hop() {
        let mut s = ShortcutSet::new(false);
        s.insert(0, 3, 3.0);
        let h = apply_shortcuts(&path5(), &s).unwrap();
        assert_eq!(h.weight(0, 3), Some(3.0));
        assert_eq!(closest_path_tree(&h, 0, None).unwrap().hops(3), Some(1));
    }

    #[test]
    fn weight_mismatch_is_rejected() {
        let mut s = ShortcutSet::new(false);
        s.insert(0, 2, 5.0);
        assert!(matches!(
            apply_shortcuts(&path5(), &s),
            Err(Error::InvalidShortcut { u: 0, v: 2, .. })
        ));
    }

    #[test]
    fn shortcut_reduces_far_hops() {
        let g = path5();
        assert_eq!(closest_path_tree(&g, 0, None).unwrap().hops(4), Some(4));
        let mut s = ShortcutSet::new(false);
        s.insert(0, 2, 2.0);
        let h = apply_shortcuts(&g, &s).unwrap();
        assert_eq!(closest_path_tree(&h, 0, None).unwrap().hops(4), Some(3));
    }

    #[test]
    fn duplicate_edge_is_rejected() {
        let mut s = ShortcutSet::new(false);
        s.insert(1, 2, 1.0);
        assert!(apply_shortcuts(&path5(), &s).is_err());
    }

    #[test]
    fn heavy_edge_is_lowered() {
        let g = WeightedGraph::undirected(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)]).unwrap();
        let mut s = ShortcutSet::new(false);
        s.insert(2, 0, 2.0);
        let h = apply_shortcuts(&g, &s).unwrap();
        assert_eq!(h.edge_count(), 3);
        assert_eq!(h.weight(0, 2), Some(2.0));
    }

    #[test]
    fn undirected_pairs_are_canonical() {
        let mut s = ShortcutSet::new(false);
        assert!(s.insert(4, 1, 3.0));
        assert!(!s.insert(1, 4, 3.0));
        assert_eq!(s.to_lines(), "1 4 3\n");
        let back = ShortcutSet::read_lines(s.to_lines().as_bytes(), false).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn missing_weights_are_filled_from_graph() {
        let s = ShortcutSet::read_lines("0 4\n".as_bytes(), false).unwrap();
        let s = s.with_graph_weights(&path5()).unwrap();
        assert_eq!(s.iter().next().unwrap().weight, 4.0);
    }
}
