use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ball::validate_params;
use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedGraph};
use crate::paths::{closest_path_tree_unchecked, AllPairs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Directed: a shortcut serves one direction.
    D,
    /// Undirected: either orientation of a shortcut serves both directions.
    U,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d" | "D" => Ok(Variant::D),
            "u" | "U" => Ok(Variant::U),
            other => Err(Error::param(format!("unknown ILP variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VarKind {
    /// `x^{s,e}_{u,v}`, general integer ≥ 0.
    Flow { s: NodeId, e: NodeId, u: NodeId, v: NodeId },
    /// `s_{u,v}`, binary.
    Shortcut { u: NodeId, v: NodeId },
    /// `u^{s,e}`, binary.
    Relax { s: NodeId, e: NodeId },
}

impl VarKind {
    pub fn name(&self) -> String {
        match *self {
            VarKind::Flow { s, e, u, v } => format!("x_s{s}_e{e}_{u}_{v}"),
            VarKind::Shortcut { u, v } => format!("s_{u}_{v}"),
            VarKind::Relax { s, e } => format!("u_s{s}_e{e}"),
        }
    }

    pub fn is_binary(&self) -> bool {
        !matches!(self, VarKind::Flow { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// Which constraint family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RowTag {
    Source,
    Sink,
    Conservation,
    Distance,
    Hops,
    Subset,
    Link,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub name: String,
    pub tag: RowTag,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Exact kρ-MSP model. The objective is the sum of all shortcut variables.
#[derive(Debug, Clone)]
pub struct IlpModel {
    pub variant: Variant,
    pub k: u32,
    pub rho: usize,
    pub n: usize,
    pub vars: Vec<VarKind>,
    pub rows: Vec<Row>,
    /// Shortcut variable index -> `d(u, v)`.
    pub shortcut_weights: BTreeMap<usize, f64>,
}

impl IlpModel {
    pub fn objective(&self) -> impl Iterator<Item = usize> + '_ {
        self.shortcut_weights.keys().copied()
    }

    pub fn count(&self, pred: impl Fn(&VarKind) -> bool) -> usize {
        self.vars.iter().filter(|v| pred(v)).count()
    }

    pub fn flow_var_count(&self) -> usize {
        self.count(|v| matches!(v, VarKind::Flow { .. }))
    }

    pub fn shortcut_var_count(&self) -> usize {
        self.shortcut_weights.len()
    }

    pub fn rows_tagged(&self, tag: RowTag) -> usize {
        self.rows.iter().filter(|r| r.tag == tag).count()
    }

    pub fn var_index(&self) -> BTreeMap<String, usize> {
        self.vars.iter().enumerate().map(|(i, v)| (v.name(), i)).collect()
    }
}

/// `N_ρ(v)`, sorted by `(dist, id)`.
pub(crate) fn n_rho(g: &WeightedGraph, v: NodeId, rho: usize) -> Vec<NodeId> {
    closest_path_tree_unchecked(g, v, Some(rho)).reach_order().to_vec()
}

/// Candidate shortcuts `(u, v)` with `v ∈ N_ρ(u)` and `d̂(u, v) > 1`, sorted. Undirected graphs
/// report each unordered pair once as `(min, max)`.
pub fn candidate_pairs(g: &WeightedGraph, rho: usize) -> Vec<(NodeId, NodeId, f64)> {
    let mut out = BTreeMap::new();
    for u in 0..g.node_count() {
        let tree = closest_path_tree_unchecked(g, u, Some(rho));
        for &v in tree.reach_order() {
            if tree.hops(v).unwrap() > 1 {
                let key = if g.is_directed() { (u, v) } else { (u.min(v), u.max(v)) };
                out.entry(key).or_insert(tree.dist(v));
            }
        }
    }
    out.into_iter().map(|((u, v), w)| (u, v, w)).collect()
}

fn tight_edge(g: &WeightedGraph, ap: &AllPairs, u: NodeId, v: NodeId) -> Option<f64> {
    g.weight(u, v).filter(|&w| w <= ap.dist(u, v))
}

struct Builder {
    vars: Vec<VarKind>,
    rows: Vec<Row>,
}

impl Builder {
    fn var(&mut self, kind: VarKind) -> usize {
        self.vars.push(kind);
        self.vars.len() - 1
    }

    fn row(&mut self, name: String, tag: RowTag, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(Row {
            name,
            tag,
            terms,
            sense,
            rhs,
        });
    }
}

/// Builds the flow-based ILP. Variant `D` must be used exactly for directed graphs.
///
/// Arc weights inside `N⁺_ρ(s)` are the edge weight for closest-path edges and `d(u, v)`
/// otherwise; arcs of the second kind need a shortcut. An edge heavier than `d(u, v)` is never
/// on a shortest path, so its pair is treated as a shortcut candidate like a non-edge.
pub fn build_ilp(g: &WeightedGraph, k: u32, rho: usize, variant: Variant) -> Result<IlpModel> {
    validate_params(g, k, rho)?;
    if (variant == Variant::D) != g.is_directed() {
        return Err(Error::param(
            "ILP variant D is for directed graphs and U for undirected graphs",
        ));
    }
    let n = g.node_count();
    let ap = AllPairs::new(g);
    let neigh: Vec<Vec<NodeId>> = (0..n).map(|v| n_rho(g, v, rho)).collect();

    let mut b = Builder {
        vars: Vec::new(),
        rows: Vec::new(),
    };
    let mut shortcut_var: BTreeMap<(NodeId, NodeId), usize> = BTreeMap::new();
    let mut shortcut_weights = BTreeMap::new();
    for u in 0..n {
        for &v in &neigh[u] {
            if tight_edge(g, &ap, u, v).is_none() {
                let id = b.var(VarKind::Shortcut { u, v });
                shortcut_var.insert((u, v), id);
                shortcut_weights.insert(id, ap.dist(u, v));
            }
        }
    }

    for s in 0..n {
        let mut plus: Vec<NodeId> = neigh[s].clone();
        plus.push(s);
        plus.sort_unstable();
        let mut relax_terms = Vec::new();
        let mut targets = neigh[s].clone();
        targets.sort_unstable();
        for &e in &targets {
            let d_se = ap.dist(s, e);
            if !d_se.is_finite() {
                return Err(Error::Internal(format!("N_rho({s}) contains unreachable {e}")));
            }
            // One flow variable per ordered pair of N⁺_ρ(s); `ids[a][b]` indexes by position.
            let p = plus.len();
            let mut arcs: Vec<(NodeId, NodeId, usize)> = Vec::with_capacity(p * (p - 1));
            let mut ids = vec![vec![usize::MAX; p]; p];
            for (a, &u) in plus.iter().enumerate() {
                for (c, &v) in plus.iter().enumerate() {
                    if a != c {
                        let x = b.var(VarKind::Flow { s, e, u, v });
                        ids[a][c] = x;
                        arcs.push((u, v, x));
                    }
                }
            }
            let pos = |x: NodeId| plus.binary_search(&x).unwrap();
            // Σ in(x) - Σ out(x).
            let balance = |x: NodeId| -> Vec<(usize, f64)> {
                let a = pos(x);
                let mut t: Vec<(usize, f64)> = (0..p).filter(|&c| c != a).map(|c| (ids[c][a], 1.0)).collect();
                t.extend((0..p).filter(|&c| c != a).map(|c| (ids[a][c], -1.0)));
                t
            };

            let t = balance(s).into_iter().map(|(i, c)| (i, -c)).collect();
            b.row(format!("eq2_s{s}_e{e}"), RowTag::Source, t, Sense::Eq, 1.0);
            b.row(format!("eq3_s{s}_e{e}"), RowTag::Sink, balance(e), Sense::Eq, 1.0);
            for &v in &plus {
                if v != s && v != e {
                    b.row(format!("eq4_s{s}_e{e}_v{v}"), RowTag::Conservation, balance(v), Sense::Eq, 0.0);
                }
            }

            let mut dist_terms = Vec::with_capacity(arcs.len());
            let mut hop_terms = Vec::with_capacity(arcs.len() + 1);
            let mut links = Vec::new();
            for &(u, v, x) in &arcs {
                let w = match tight_edge(g, &ap, u, v) {
                    Some(w) => w,
                    None => {
                        links.push((u, v, x));
                        ap.dist(u, v)
                    }
                };
                dist_terms.push((x, w));
                hop_terms.push((x, 1.0));
            }
            b.row(format!("eq5_s{s}_e{e}"), RowTag::Distance, dist_terms, Sense::Eq, d_se);

            let relax = b.var(VarKind::Relax { s, e });
            relax_terms.push((relax, 1.0));
            hop_terms.push((relax, -(ap.hops(s, e) as f64)));
            b.row(format!("eq6_s{s}_e{e}"), RowTag::Hops, hop_terms, Sense::Le, k as f64);

            let tag = if variant == Variant::D { "eq9" } else { "eq10" };
            for (u, v, x) in links {
                let mut t = vec![(x, 1.0)];
                if let Some(&sv) = shortcut_var.get(&(u, v)) {
                    t.push((sv, -1.0));
                }
                if variant == Variant::U {
                    if let Some(&sv) = shortcut_var.get(&(v, u)) {
                        t.push((sv, -1.0));
                    }
                }
                b.row(format!("{tag}_s{s}_e{e}_{u}_{v}"), RowTag::Link, t, Sense::Le, 0.0);
            }
        }
        let excess = neigh[s].len().saturating_sub(rho);
        b.row(format!("eq7_s{s}"), RowTag::Subset, relax_terms, Sense::Eq, excess as f64);
    }

    Ok(IlpModel {
        variant,
        k,
        rho,
        n,
        vars: b.vars,
        rows: b.rows,
        shortcut_weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k22_flow_variable_audit() {
        let g = WeightedGraph::unit(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let m = build_ilp(&g, 2, 3, Variant::U).unwrap();
        // Each s has |N_3(s)| = 3 targets and 4·3 ordered pairs on N⁺.
        assert_eq!(m.flow_var_count(), 4 * 3 * 12);
        assert_eq!(m.rows_tagged(RowTag::Subset), 4);
        // Opposite corners are the only non-edges: s_0_1, s_1_0, s_2_3, s_3_2.
        assert_eq!(m.shortcut_var_count(), 4);
    }

    #[test]
    fn variant_must_match_orientation() {
        let g = WeightedGraph::unit(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(build_ilp(&g, 1, 2, Variant::D).is_err());
        let d = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)], true).unwrap();
        assert!(build_ilp(&d, 1, 1, Variant::U).is_err());
        assert!(build_ilp(&d, 1, 1, Variant::D).is_ok());
    }

    #[test]
    fn names_follow_conventions() {
        let g = WeightedGraph::unit(3, &[(0, 1), (1, 2)]).unwrap();
        let m = build_ilp(&g, 1, 2, Variant::U).unwrap();
        let names = m.var_index();
        assert!(names.contains_key("s_0_2"));
        assert!(names.contains_key("u_s0_e2"));
        assert!(names.contains_key("x_s0_e2_1_2"));
        assert!(m.rows.iter().any(|r| r.name == "eq5_s0_e2"));
        assert!(m.rows.iter().any(|r| r.name == "eq10_s0_e2_0_2"));
    }

    #[test]
    fn candidates_skip_tight_edges_but_keep_heavy_ones() {
        let g = WeightedGraph::undirected(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)]).unwrap();
        assert_eq!(candidate_pairs(&g, 2), vec![(0, 2, 2.0)]);
    }

    #[test]
    fn overpopulated_neighborhood_gets_relaxation() {
        // Star: the center has 3 nodes at distance 1, rho = 2.
        let g = WeightedGraph::unit(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let m = build_ilp(&g, 1, 2, Variant::U).unwrap();
        let row = m.rows.iter().find(|r| r.name == "eq7_s0").unwrap();
        assert_eq!(row.rhs, 1.0);
        assert_eq!(row.terms.len(), 3);
    }
}
