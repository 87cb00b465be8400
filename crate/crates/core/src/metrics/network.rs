//! Continuous positions on a graph and shortest paths between them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{adjacency, GeoGraph};

/// A position on the network: a node, or a point strictly inside an edge
/// at `offset` along its polyline from endpoint `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Loc {
    Node(usize),
    Edge { edge: usize, offset: f64 },
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) struct Network {
    pub ends: Vec<(usize, usize)>,
    pub lines: Vec<Vec<(f64, f64)>>,
    cum: Vec<Vec<f64>>,
    pub len: Vec<f64>,
    pub adj: Vec<Vec<(usize, usize)>>,
    pub pos: Vec<(f64, f64)>,
    comp: Vec<usize>,
    total: f64,
}

impl Network {
    pub fn new(g: &GeoGraph) -> Self {
        let mut ends = Vec::with_capacity(g.edge_count());
        let mut lines = Vec::with_capacity(g.edge_count());
        let mut cum = Vec::with_capacity(g.edge_count());
        let mut len = Vec::with_capacity(g.edge_count());
        for e in g.edges() {
            let line = g.polyline(e);
            let mut c = vec![0.0];
            for w in line.windows(2) {
                let d = ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt();
                c.push(c.last().unwrap() + d);
            }
            ends.push((g.node_index(e.a).unwrap(), g.node_index(e.b).unwrap()));
            len.push(*c.last().unwrap());
            lines.push(line);
            cum.push(c);
        }
        let adj = adjacency(g);
        let n = g.node_count();
        let mut comp = vec![usize::MAX; n];
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = s;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(v, _) in &adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = s;
                        stack.push(v);
                    }
                }
            }
        }
        let total = len.iter().sum();
        Network {
            ends,
            lines,
            cum,
            len,
            adj,
            pos: g.nodes().iter().map(|n| (n.x, n.y)).collect(),
            comp,
            total,
        }
    }

    pub fn node_count(&self) -> usize {
        self.pos.len()
    }

    pub fn total_length(&self) -> f64 {
        self.total
    }

    /// Location at `offset` along an edge, collapsing to an endpoint at
    /// either end.
    pub fn on_edge(&self, edge: usize, offset: f64) -> Loc {
        if offset <= 0.0 {
            Loc::Node(self.ends[edge].0)
        } else if offset >= self.len[edge] {
            Loc::Node(self.ends[edge].1)
        } else {
            Loc::Edge { edge, offset }
        }
    }

    pub fn point(&self, loc: Loc) -> (f64, f64) {
        match loc {
            Loc::Node(i) => self.pos[i],
            Loc::Edge { edge, offset } => {
                let (line, cum) = (&self.lines[edge], &self.cum[edge]);
                let k = cum.partition_point(|&c| c <= offset).clamp(1, line.len() - 1);
                let seg = cum[k] - cum[k - 1];
                let t = if seg > 0.0 { (offset - cum[k - 1]) / seg } else { 0.0 };
                let (p, q) = (line[k - 1], line[k]);
                (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1))
            }
        }
    }

    pub fn component(&self, loc: Loc) -> usize {
        match loc {
            Loc::Node(i) => self.comp[i],
            Loc::Edge { edge, .. } => self.comp[self.ends[edge].0],
        }
    }

    /// Nearest network location within `radius` of `p`. Nodes win ties
    /// against edge interiors; lower indices win among equals.
    pub fn snap(&self, p: (f64, f64), radius: f64) -> Option<Loc> {
        let mut best: Option<(f64, Loc)> = None;
        for (i, &q) in self.pos.iter().enumerate() {
            let d = dist(p, q);
            if d <= radius && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, Loc::Node(i)));
            }
        }
        for (e, line) in self.lines.iter().enumerate() {
            for (k, w) in line.windows(2).enumerate() {
                let (a, b) = (w[0], w[1]);
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let l2 = dx * dx + dy * dy;
                let t = if l2 > 0.0 {
                    (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / l2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let q = (a.0 + t * dx, a.1 + t * dy);
                let d = dist(p, q);
                if d <= radius && best.is_none_or(|(bd, _)| d < bd) {
                    let offset = self.cum[e][k] + t * l2.sqrt();
                    best = Some((d, self.on_edge(e, offset)));
                }
            }
        }
        best.map(|(_, loc)| loc)
    }

    /// Network distance from `from` to every node (infinite when unreachable).
    pub fn distances(&self, from: Loc) -> Vec<f64> {
        let mut d = vec![f64::INFINITY; self.node_count()];
        let mut heap = BinaryHeap::new();
        let push = |d: &mut Vec<f64>, heap: &mut BinaryHeap<Entry>, v: usize, c: f64| {
            if c < d[v] {
                d[v] = c;
                heap.push(Entry(c, v));
            }
        };
        match from {
            Loc::Node(i) => push(&mut d, &mut heap, i, 0.0),
            Loc::Edge { edge, offset } => {
                let (a, b) = self.ends[edge];
                push(&mut d, &mut heap, a, offset);
                push(&mut d, &mut heap, b, self.len[edge] - offset);
            }
        }
        while let Some(Entry(c, u)) = heap.pop() {
            if c > d[u] {
                continue;
            }
            for &(v, e) in &self.adj[u] {
                push(&mut d, &mut heap, v, c + self.len[e]);
            }
        }
        d
    }

    /// Distance to `to` given the node distances from `from`.
    pub fn distance_to(&self, from: Loc, dists: &[f64], to: Loc) -> Option<f64> {
        let d = match to {
            Loc::Node(i) => dists[i],
            Loc::Edge { edge, offset } => {
                let (a, b) = self.ends[edge];
                let mut best = (dists[a] + offset).min(dists[b] + self.len[edge] - offset);
                if let Loc::Edge { edge: e0, offset: o0 } = from {
                    if e0 == edge {
                        best = best.min((offset - o0).abs());
                    }
                }
                best
            }
        };
        d.is_finite().then_some(d)
    }

    pub fn path_length(&self, from: Loc, to: Loc) -> Option<f64> {
        if self.component(from) != self.component(to) {
            return None;
        }
        self.distance_to(from, &self.distances(from), to)
    }

    /// Nodes plus points every `spacing` along each edge.
    pub fn control_points(&self, spacing: f64) -> Vec<Loc> {
        let mut out: Vec<Loc> = (0..self.node_count()).map(Loc::Node).collect();
        for (e, &l) in self.len.iter().enumerate() {
            let mut k = 1.0;
            while k * spacing < l - 1e-9 {
                out.push(Loc::Edge { edge: e, offset: k * spacing });
                k += 1.0;
            }
        }
        out
    }

    /// Location drawn uniformly by length; isolated nodes are never drawn.
    pub fn random_location(&self, rng: &mut impl Rng) -> Option<Loc> {
        if self.total <= 0.0 {
            return None;
        }
        let mut r = rng.random_range(0.0..self.total);
        for (e, &l) in self.len.iter().enumerate() {
            if r < l {
                return Some(self.on_edge(e, r));
            }
            r -= l;
        }
        let last = self.len.iter().rposition(|&l| l > 0.0)?;
        Some(self.on_edge(last, self.len[last]))
    }
}

pub(crate) fn dist(p: (f64, f64), q: (f64, f64)) -> f64 {
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

/// Length of the shortest path between two nodes, `None` when they are
/// not connected.
pub fn shortest_path_length(graph: &GeoGraph, a: i64, b: i64) -> Result<Option<f64>> {
    let ia = graph.node_index(a).ok_or(Error::UnknownNode(a))?;
    let ib = graph.node_index(b).ok_or(Error::UnknownNode(b))?;
    Ok(Network::new(graph).path_length(Loc::Node(ia), Loc::Node(ib)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    #[test]
    fn path_examples() {
        let g = parse_graph("N 0 0 0\nN 1 10 0\nN 2 50 50\nE 0 1").unwrap();
        assert_eq!(shortest_path_length(&g, 0, 0).unwrap(), Some(0.0));
        assert_eq!(shortest_path_length(&g, 0, 1).unwrap(), Some(10.0));
        assert_eq!(shortest_path_length(&g, 0, 2).unwrap(), None);
        assert_eq!(shortest_path_length(&g, 0, 7), Err(Error::UnknownNode(7)));
    }

    #[test]
    fn picks_shorter_route() {
        let g = parse_graph("N 0 0 0\nN 1 10 0\nN 2 10 10\nN 3 0 10\nE 0 1\nE 1 2\nE 2 3\nE 3 0\nE 0 2").unwrap();
        let d = shortest_path_length(&g, 1, 3).unwrap().unwrap();
        assert_eq!(d, 20.0);
    }

    #[test]
    fn locations_on_edges() {
        let g = parse_graph("N 0 0 0\nN 1 10 0\nN 2 10 10\nE 0 1\nE 1 2").unwrap();
        let net = Network::new(&g);
        let a = net.snap((3.0, 2.0), 5.0).unwrap();
        assert_eq!(a, Loc::Edge { edge: 0, offset: 3.0 });
        assert_eq!(net.point(a), (3.0, 0.0));
        let b = net.snap((12.0, 6.0), 5.0).unwrap();
        assert_eq!(net.path_length(a, b), Some(13.0));
        assert_eq!(net.path_length(a, Loc::Edge { edge: 0, offset: 8.0 }), Some(5.0));
        assert_eq!(net.snap((30.0, 30.0), 5.0), None);
        // Exactly at a node: the node wins.
        assert_eq!(net.snap((10.0, 0.0), 5.0), Some(Loc::Node(1)));
    }

    #[test]
    fn control_point_spacing() {
        let g = parse_graph("N 0 0 0\nN 1 120 0\nE 0 1").unwrap();
        let net = Network::new(&g);
        let cps = net.control_points(50.0);
        assert_eq!(cps.len(), 4);
        assert_eq!(net.point(cps[3]), (100.0, 0.0));
        let exact = Network::new(&parse_graph("N 0 0 0\nN 1 100 0\nE 0 1").unwrap());
        assert_eq!(exact.control_points(50.0).len(), 3);
    }
}
