use std::collections::BTreeMap;

use serde::Serialize;

use crate::ball::verify_krho;
use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedGraph};
use crate::shortcut::ShortcutSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    Original,
    EdgeNode,
    Subdivision,
    PitchforkBase,
    /// The pitchfork satellite adjacent to the host node.
    PitchforkSatellite,
    PitchforkLeaf,
    BlowupLeaf,
    StarCenter,
    /// Outer end of an arm of the lower-bound star.
    StarTip,
}

/// Unit-weight graph under construction with a role per node.
struct Layout {
    roles: Vec<Role>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Layout {
    fn node(&mut self, role: Role) -> NodeId {
        self.roles.push(role);
        self.roles.len() - 1
    }

    fn edge(&mut self, u: NodeId, v: NodeId) {
        self.edges.push((u, v));
    }

    /// Attaches a γ-pitchfork to `host`: host - satellite - base, plus γ leaves on the base.
    /// Returns `(base, satellite, first leaf)`.
    fn pitchfork(&mut self, host: NodeId, gamma: usize) -> (NodeId, NodeId, NodeId) {
        let base = self.node(Role::PitchforkBase);
        let sat = self.node(Role::PitchforkSatellite);
        self.edge(host, sat);
        self.edge(sat, base);
        let first = self.roles.len();
        for _ in 0..gamma {
            let leaf = self.node(Role::PitchforkLeaf);
            self.edge(base, leaf);
        }
        (base, sat, first)
    }

    /// Path of `inner` new nodes from `from`; returns them in path order.
    fn chain(&mut self, from: NodeId, inner: usize, role: Role) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(inner);
        let mut prev = from;
        for _ in 0..inner {
            let x = self.node(role);
            self.edge(prev, x);
            out.push(x);
            prev = x;
        }
        out
    }

    fn finish(self) -> (WeightedGraph, Vec<Role>) {
        let g = WeightedGraph::unit(self.roles.len(), &self.edges)
            .expect("gadget construction yields a simple graph");
        (g, self.roles)
    }
}

/// Result of the vertex cover reduction. The target instance is `(k, rho = gamma)`.
#[derive(Debug, Clone, Serialize)]
pub struct TransformArtifacts {
    #[serde(skip)]
    pub graph: WeightedGraph,
    pub roles: Vec<Role>,
    pub gamma: usize,
    pub k: u32,
    pub rho: usize,
    /// Input edge `(u, v)`, `u < v`, to its edge node `w_{u,v}`.
    #[serde(serialize_with = "serialize_edge_map")]
    pub edge_nodes: BTreeMap<(NodeId, NodeId), NodeId>,
    /// Pitchfork base `b_v` of every original node `v`.
    pub bases: Vec<NodeId>,
    /// Pitchfork satellite adjacent to every original node.
    pub satellites: Vec<NodeId>,
    pub blowup: Vec<NodeId>,
}

fn serialize_edge_map<S: serde::Serializer>(
    map: &BTreeMap<(NodeId, NodeId), NodeId>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(map.len()))?;
    for (&(u, v), &w) in map {
        seq.serialize_element(&[u, v, w])?;
    }
    seq.end()
}

impl TransformArtifacts {
    /// Edge nodes in id order.
    pub fn edge_node_list(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.edge_nodes.values().copied().collect();
        v.sort_unstable();
        v
    }

    /// `{(v, b_v) : v ∈ cover}`, each at distance 2.
    pub fn canonical_shortcuts(&self, cover: &[NodeId]) -> ShortcutSet {
        let mut s = ShortcutSet::new(false);
        for &v in cover {
            s.insert(v, self.bases[v], 2.0);
        }
        s
    }
}

pub fn default_gamma(nodes: usize) -> usize {
    7 * nodes + 6
}

/// Vertex cover to kρ-MSP. Each input edge `{u, v}` becomes a path `u, s…, w_{u,v}, s…, v` with
/// `k - 3` subdivision nodes on each side and every input node hosts a γ-pitchfork. With
/// `blowup_y`, that many degree-one nodes hang off the first leaf of the first pitchfork.
pub fn vc_to_msp_transform(
    g_vc: &WeightedGraph,
    k: u32,
    gamma: Option<usize>,
    blowup_y: Option<usize>,
) -> Result<TransformArtifacts> {
    if k < 3 {
        return Err(Error::param("the vertex cover reduction needs k >= 3"));
    }
    if g_vc.is_directed() {
        return Err(Error::param("the vertex cover reduction takes an undirected graph"));
    }
    let nv = g_vc.node_count();
    let gamma = gamma.unwrap_or_else(|| default_gamma(nv));
    if gamma == 0 {
        return Err(Error::param("gamma must be positive"));
    }
    let sub = (k - 3) as usize;
    let mut lay = Layout {
        roles: vec![Role::Original; nv],
        edges: Vec::new(),
    };
    let mut edge_nodes = BTreeMap::new();
    for (u, v, _) in g_vc.edges() {
        let left = lay.chain(u, sub, Role::Subdivision);
        let w = lay.node(Role::EdgeNode);
        lay.edge(left.last().copied().unwrap_or(u), w);
        let right = lay.chain(w, sub, Role::Subdivision);
        lay.edge(right.last().copied().unwrap_or(w), v);
        edge_nodes.insert((u, v), w);
    }
    let mut bases = Vec::with_capacity(nv);
    let mut satellites = Vec::with_capacity(nv);
    let mut first_leaf = None;
    for v in 0..nv {
        let (b, a, leaf) = lay.pitchfork(v, gamma);
        bases.push(b);
        satellites.push(a);
        first_leaf.get_or_insert(leaf);
    }
    let mut blowup = Vec::new();
    if let Some(y) = blowup_y.filter(|&y| y > 0) {
        let anchor = first_leaf.ok_or_else(|| Error::param("blowup needs a pitchfork"))?;
        for _ in 0..y {
            let x = lay.node(Role::BlowupLeaf);
            lay.edge(anchor, x);
            blowup.push(x);
        }
    }
    let (graph, roles) = lay.finish();
    if gamma >= graph.node_count() {
        return Err(Error::param(format!(
            "rho = gamma = {gamma} needs more than {} nodes",
            graph.node_count()
        )));
    }
    Ok(TransformArtifacts {
        graph,
        roles,
        gamma,
        k,
        rho: gamma,
        edge_nodes,
        bases,
        satellites,
        blowup,
    })
}

pub fn is_vertex_cover(g: &WeightedGraph, cover: &[NodeId]) -> bool {
    let mut inside = vec![false; g.node_count()];
    for &v in cover {
        inside[v] = true;
    }
    g.edges().all(|(u, v, _)| inside[u] || inside[v])
}

/// Subdivided star with a single pitchfork at the center.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundStar {
    #[serde(skip)]
    pub graph: WeightedGraph,
    pub roles: Vec<Role>,
    pub k: u32,
    /// Largest ρ whose violators are exactly the tips.
    pub rho: usize,
    pub gamma: usize,
    pub center: NodeId,
    pub tips: Vec<NodeId>,
    pub base: NodeId,
}

/// Star `S_n` (center plus `n - 1` arms) whose arms carry `k - 3` subdivision nodes, with one
/// γ-pitchfork on the center. `gamma` defaults to `7n + 6`.
pub fn lowerbound_star(n: usize, k: u32, gamma: Option<usize>) -> Result<LowerBoundStar> {
    if n < 2 {
        return Err(Error::param("the lower-bound star needs n >= 2"));
    }
    if k < 3 {
        return Err(Error::param("the lower-bound star needs k >= 3"));
    }
    let gamma = gamma.unwrap_or_else(|| default_gamma(n));
    let mut lay = Layout {
        roles: vec![Role::StarCenter],
        edges: Vec::new(),
    };
    let center = 0;
    let mut tips = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let arm = lay.chain(center, (k - 3) as usize, Role::Subdivision);
        let tip = lay.node(Role::StarTip);
        lay.edge(arm.last().copied().unwrap_or(center), tip);
        tips.push(tip);
    }
    let (base, _, _) = lay.pitchfork(center, gamma);
    let (graph, roles) = lay.finish();
    let total = graph.node_count();
    for rho in (1..total).rev() {
        if verify_krho(&graph, k, rho)?.nodes() == tips {
            return Ok(LowerBoundStar {
                graph,
                roles,
                k,
                rho,
                gamma,
                center,
                tips,
                base,
            });
        }
    }
    Err(Error::Generator(format!(
        "no rho isolates the star tips as the only violators (n = {n}, k = {k}, gamma = {gamma})"
    )))
}
