//! Graph text formats.
//!
//! Edge lists start with a header `n m [directed|undirected] [weighted|unit]` followed by `m`
//! lines `u v [w]` with 0-based ids (missing weight means 1.0). Matrix Market coordinate files
//! use 1-based ids and are read as undirected graphs.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    Edgelist,
    Mtx,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edgelist" | "txt" | "el" => Ok(GraphFormat::Edgelist),
            "mtx" | "matrixmarket" => Ok(GraphFormat::Mtx),
            other => Err(Error::param(format!("unknown graph format '{other}'"))),
        }
    }
}

/// What had to be cleaned up while reading a graph file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

/// Collects raw edges, dropping self-loops and collapsing duplicates to the minimum weight.
struct EdgeCollector {
    n: usize,
    directed: bool,
    edges: BTreeMap<(NodeId, NodeId), f64>,
    report: LoadReport,
}

impl EdgeCollector {
    fn new(n: usize, directed: bool) -> Self {
        EdgeCollector {
            n,
            directed,
            edges: BTreeMap::new(),
            report: LoadReport::default(),
        }
    }

    fn add(&mut self, line: usize, u: NodeId, v: NodeId, w: f64) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::Parse {
                line,
                msg: format!("node id out of range for {} nodes", self.n),
            });
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::Parse {
                line,
                msg: format!("invalid weight {w}"),
            });
        }
        if u == v {
            self.report.self_loops_dropped += 1;
            return Ok(());
        }
        let key = if self.directed { (u, v) } else { (u.min(v), u.max(v)) };
        match self.edges.get_mut(&key) {
            Some(existing) => {
                self.report.duplicates_collapsed += 1;
                if w < *existing {
                    *existing = w;
                }
            }
            None => {
                self.edges.insert(key, w);
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<(WeightedGraph, LoadReport)> {
        let g = WeightedGraph::from_edges(
            self.n,
            self.edges.into_iter().map(|((u, v), w)| (u, v, w)),
            self.directed,
        )?;
        Ok((g, self.report))
    }
}

fn parse_field<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {what} from '{tok}'"),
    })
}

fn is_comment(line: &str) -> bool {
    let t = line.trim_start();
    t.is_empty() || t.starts_with('#') || t.starts_with('%')
}

pub fn read_graph(reader: impl BufRead, format: GraphFormat) -> Result<(WeightedGraph, LoadReport)> {
    match format {
        GraphFormat::Edgelist => read_edge_list(reader),
        GraphFormat::Mtx => read_mtx(reader),
    }
}

pub fn read_edge_list(reader: impl BufRead) -> Result<(WeightedGraph, LoadReport)> {
    let mut lines = reader.lines().enumerate();
    let mut header = None;
    for (i, line) in lines.by_ref() {
        let line = line?;
        if !is_comment(&line) {
            header = Some((i + 1, line));
            break;
        }
    }
    let (hline, header) = header.ok_or(Error::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    let mut toks = header.split_whitespace();
    let n: usize = parse_field(toks.next(), hline, "node count")?;
    let m: usize = parse_field(toks.next(), hline, "edge count")?;
    let mut directed = false;
    for tok in toks {
        match tok {
            "directed" => directed = true,
            "undirected" | "weighted" | "unit" => {}
            other => {
                return Err(Error::Parse {
                    line: hline,
                    msg: format!("unknown header flag '{other}'"),
                })
            }
        }
    }
    let mut collector = EdgeCollector::new(n, directed);
    let mut seen = 0usize;
    for (i, line) in lines {
        let line = line?;
        if is_comment(&line) {
            continue;
        }
        let lineno = i + 1;
        let mut toks = line.split_whitespace();
        let u: NodeId = parse_field(toks.next(), lineno, "source node")?;
        let v: NodeId = parse_field(toks.next(), lineno, "target node")?;
        let w: f64 = match toks.next() {
            Some(t) => parse_field(Some(t), lineno, "weight")?,
            None => 1.0,
        };
        if toks.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                msg: "trailing tokens".into(),
            });
        }
        collector.add(lineno, u, v, w)?;
        seen += 1;
    }
    if seen != m {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header announces {m} edges, found {seen}"),
        });
    }
    collector.finish()
}

pub fn read_mtx(reader: impl BufRead) -> Result<(WeightedGraph, LoadReport)> {
    let mut lines = reader.lines().enumerate();
    let (_, banner) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let banner = banner?.to_ascii_lowercase();
    if !banner.starts_with("%%matrixmarket") || !banner.contains("coordinate") {
        return Err(Error::Parse {
            line: 1,
            msg: "expected '%%MatrixMarket matrix coordinate' banner".into(),
        });
    }
    let pattern = banner.contains("pattern");
    let mut collector: Option<EdgeCollector> = None;
    for (i, line) in lines {
        let line = line?;
        let lineno = i + 1;
        if is_comment(&line) {
            continue;
        }
        let mut toks = line.split_whitespace();
        match collector.as_mut() {
            None => {
                let rows: usize = parse_field(toks.next(), lineno, "row count")?;
                let cols: usize = parse_field(toks.next(), lineno, "column count")?;
                let _nnz: usize = parse_field(toks.next(), lineno, "entry count")?;
                collector = Some(EdgeCollector::new(rows.max(cols), false));
            }
            Some(c) => {
                let u: usize = parse_field(toks.next(), lineno, "row index")?;
                let v: usize = parse_field(toks.next(), lineno, "column index")?;
                if u == 0 || v == 0 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "Matrix Market ids are 1-based".into(),
                    });
                }
                let w = if pattern {
                    1.0
                } else {
                    match toks.next() {
                        Some(t) => parse_field::<f64>(Some(t), lineno, "value")?,
                        None => 1.0,
                    }
                };
                c.add(lineno, u - 1, v - 1, w)?;
            }
        }
    }
    collector
        .ok_or(Error::Parse {
            line: 0,
            msg: "missing size line".into(),
        })?
        .finish()
}

/// Writes the edge-list format; weights are omitted when every edge has weight 1.
pub fn write_edge_list(g: &WeightedGraph, mut w: impl Write) -> Result<()> {
    let unit = g.is_unit_weighted();
    writeln!(
        w,
        "{} {} {} {}",
        g.node_count(),
        g.edge_count(),
        if g.is_directed() { "directed" } else { "undirected" },
        if unit { "unit" } else { "weighted" }
    )?;
    for (u, v, wt) in g.edges() {
        if unit {
            writeln!(w, "{u} {v}")?;
        } else {
            writeln!(w, "{u} {v} {wt}")?;
        }
    }
    Ok(())
}

pub fn edge_list_string(g: &WeightedGraph) -> String {
    let mut buf = Vec::new();
    write_edge_list(g, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mtx_triangle_is_zero_based() {
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n% comment\n3 3 3\n2 1\n3 1\n3 2\n";
        let (g, report) = read_mtx(text.as_bytes()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(0, 1) && g.has_edge(0, 2) && g.has_edge(1, 2));
        assert_eq!(report, LoadReport::default());
    }

    #[test]
    fn duplicate_edges_keep_minimum_weight() {
        let text = "2 2 undirected weighted\n0 1 2.0\n1 0 1.0\n";
        let (g, report) = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), Some(1.0));
        assert_eq!(report.duplicates_collapsed, 1);
    }

    #[test]
    fn self_loops_are_dropped_and_counted() {
        let text = "3 2\n0 0\n1 2 0.5\n";
        let (g, report) = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(report.self_loops_dropped, 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "3 2\n0 1\n1 x\n";
        match read_edge_list(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "3 1\n0 7\n";
        assert!(matches!(
            read_edge_list(text.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn directed_header_round_trips() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 0.25), (1, 0, 0.5), (2, 1, 3.0)], true).unwrap();
        let text = edge_list_string(&g);
        assert!(text.starts_with("3 3 directed weighted"));
        let (back, _) = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(back, g);
    }
}
