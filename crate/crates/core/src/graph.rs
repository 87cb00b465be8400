//! Undirected spatial graphs and their line-oriented text format.
//!
//! ```text
//! # comment
//! N <id> <x> <y>
//! E <id> <id>
//! ```
//!
//! Edges may carry interior geometry (the traced pixel chain of an
//! extracted skeleton). The text format has no room for it, so writers
//! expand the interior points into chains of degree-2 nodes.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: i64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: i64,
    pub b: i64,
    /// Interior points from `a` towards `b`, endpoints excluded.
    pub via: Vec<(f64, f64)>,
}

fn key(a: i64, b: i64) -> (i64, i64) {
    (a.min(b), a.max(b))
}

#[derive(Debug, Clone, Default)]
pub struct GeoGraph {
    nodes: Vec<Node>,
    index: HashMap<i64, usize>,
    edges: Vec<Edge>,
    keys: HashSet<(i64, i64)>,
}

impl PartialEq for GeoGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl GeoGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: i64) -> Option<&Node> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn node_index(&self, id: i64) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn contains_edge(&self, a: i64, b: i64) -> bool {
        self.keys.contains(&key(a, b))
    }

    pub fn max_id(&self) -> Option<i64> {
        self.nodes.iter().map(|n| n.id).max()
    }

    pub fn add_node(&mut self, id: i64, x: f64, y: f64) -> Result<()> {
        if self.index.contains_key(&id) {
            return Err(Error::Config(format!("duplicate node id {id}")));
        }
        self.index.insert(id, self.nodes.len());
        self.nodes.push(Node { id, x, y });
        Ok(())
    }

    /// Adds a straight edge. Returns `false` when the edge already exists.
    pub fn add_edge(&mut self, a: i64, b: i64) -> Result<bool> {
        self.add_edge_via(a, b, Vec::new())
    }

    /// Adds an edge with interior geometry. Returns `false` when an edge
    /// between the same endpoints already exists.
    pub fn add_edge_via(&mut self, a: i64, b: i64, via: Vec<(f64, f64)>) -> Result<bool> {
        for id in [a, b] {
            if !self.index.contains_key(&id) {
                return Err(Error::UnknownNode(id));
            }
        }
        if a == b {
            return Err(Error::Config(format!("self-loop on node {a}")));
        }
        if !self.keys.insert(key(a, b)) {
            return Ok(false);
        }
        self.edges.push(Edge { a, b, via });
        Ok(true)
    }

    /// Node degrees keyed by id.
    pub fn degrees(&self) -> HashMap<i64, usize> {
        let mut deg: HashMap<i64, usize> = self.nodes.iter().map(|n| (n.id, 0)).collect();
        for e in &self.edges {
            *deg.get_mut(&e.a).unwrap() += 1;
            *deg.get_mut(&e.b).unwrap() += 1;
        }
        deg
    }

    /// Full polyline of an edge, endpoints included.
    pub fn polyline(&self, edge: &Edge) -> Vec<(f64, f64)> {
        let a = self.node(edge.a).expect("edge endpoint");
        let b = self.node(edge.b).expect("edge endpoint");
        let mut pts = Vec::with_capacity(edge.via.len() + 2);
        pts.push((a.x, a.y));
        pts.extend_from_slice(&edge.via);
        pts.push((b.x, b.y));
        pts
    }

    /// Euclidean length of the edge polyline.
    pub fn edge_length(&self, edge: &Edge) -> f64 {
        polyline_length(&self.polyline(edge))
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| self.edge_length(e)).sum()
    }

    /// Graph without the edge between `a` and `b`. Nodes are kept.
    pub fn without_edge(&self, a: i64, b: i64) -> Self {
        let mut g = Self::new();
        for n in &self.nodes {
            g.add_node(n.id, n.x, n.y).expect("unique ids");
        }
        for e in &self.edges {
            if key(e.a, e.b) != key(a, b) {
                g.add_edge_via(e.a, e.b, e.via.clone()).expect("valid edge");
            }
        }
        g
    }

    /// Same graph with every interior point turned into a degree-2 node.
    /// New ids continue after the current maximum id.
    pub fn expand_geometry(&self) -> Self {
        let mut g = Self::new();
        for n in &self.nodes {
            g.add_node(n.id, n.x, n.y).expect("unique ids");
        }
        let mut next = self.max_id().map_or(0, |m| m + 1);
        for e in &self.edges {
            let mut prev = e.a;
            for &(x, y) in &e.via {
                g.add_node(next, x, y).expect("fresh id");
                g.add_edge(prev, next).expect("valid edge");
                prev = next;
                next += 1;
            }
            g.add_edge(prev, e.b).expect("valid edge");
        }
        g
    }

    /// Text form: nodes then edges, both ascending by id. Edge geometry is
    /// expanded first.
    pub fn to_text(&self) -> String {
        let g = if self.edges.iter().any(|e| !e.via.is_empty()) {
            self.expand_geometry()
        } else {
            self.clone()
        };
        let mut out = String::new();
        let mut nodes: Vec<&Node> = g.nodes.iter().collect();
        nodes.sort_by_key(|n| n.id);
        for n in nodes {
            writeln!(out, "N {} {} {}", n.id, n.x, n.y).unwrap();
        }
        let mut edges: Vec<(i64, i64)> = g.edges.iter().map(|e| key(e.a, e.b)).collect();
        edges.sort_unstable();
        for (a, b) in edges {
            writeln!(out, "E {a} {b}").unwrap();
        }
        out
    }
}

pub fn polyline_length(pts: &[(f64, f64)]) -> f64 {
    pts.windows(2)
        .map(|w| ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt())
        .sum()
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} `{tok}`"),
    })
}

/// Parse the graph text format. Duplicate edges are collapsed.
pub fn parse_graph(text: &str) -> Result<GeoGraph> {
    let mut g = GeoGraph::new();
    let mut pending: Vec<(usize, i64, i64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        match toks.next() {
            Some("N") => {
                let id: i64 = field(toks.next(), line, "node id")?;
                let x: f64 = field(toks.next(), line, "x coordinate")?;
                let y: f64 = field(toks.next(), line, "y coordinate")?;
                if !x.is_finite() || !y.is_finite() {
                    return Err(Error::Parse {
                        line,
                        msg: "non-finite coordinate".into(),
                    });
                }
                if g.node(id).is_some() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("duplicate node id {id}"),
                    });
                }
                g.add_node(id, x, y)?;
            }
            Some("E") => {
                let a: i64 = field(toks.next(), line, "node id")?;
                let b: i64 = field(toks.next(), line, "node id")?;
                if a == b {
                    return Err(Error::Parse {
                        line,
                        msg: format!("self-loop on node {a}"),
                    });
                }
                pending.push((line, a, b));
            }
            Some(other) => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown line type `{other}`"),
                })
            }
            None => unreachable!(),
        }
        if let Some(extra) = toks.next() {
            return Err(Error::Parse {
                line,
                msg: format!("unexpected trailing field `{extra}`"),
            });
        }
    }
    for (line, a, b) in pending {
        for id in [a, b] {
            if g.node(id).is_none() {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown node reference {id}"),
                });
            }
        }
        g.add_edge(a, b)?;
    }
    Ok(g)
}

/// Adjacency lists keyed by node index, each entry `(neighbor index, edge index)`.
pub(crate) fn adjacency(g: &GeoGraph) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); g.node_count()];
    for (ei, e) in g.edges().iter().enumerate() {
        let a = g.node_index(e.a).unwrap();
        let b = g.node_index(e.b).unwrap();
        adj[a].push((b, ei));
        adj[b].push((a, ei));
    }
    adj
}

/// Sorted id → degree map, handy for deterministic iteration.
pub(crate) fn sorted_degrees(g: &GeoGraph) -> BTreeMap<i64, usize> {
    g.degrees().into_iter().collect()
}
