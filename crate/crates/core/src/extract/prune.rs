use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{polyline_length, Edge, GeoGraph};

struct Work {
    pos: BTreeMap<i64, (f64, f64)>,
    edges: BTreeMap<(i64, i64), Edge>,
    adj: BTreeMap<i64, BTreeSet<i64>>,
}

fn key(a: i64, b: i64) -> (i64, i64) {
    (a.min(b), a.max(b))
}

impl Work {
    fn from_graph(g: &GeoGraph) -> Self {
        let mut w = Work {
            pos: g.nodes().iter().map(|n| (n.id, (n.x, n.y))).collect(),
            edges: BTreeMap::new(),
            adj: g.nodes().iter().map(|n| (n.id, BTreeSet::new())).collect(),
        };
        for e in g.edges() {
            w.insert(e.clone());
        }
        w
    }

    fn insert(&mut self, e: Edge) {
        self.adj.get_mut(&e.a).unwrap().insert(e.b);
        self.adj.get_mut(&e.b).unwrap().insert(e.a);
        self.edges.insert(key(e.a, e.b), e);
    }

    fn remove(&mut self, a: i64, b: i64) -> Edge {
        self.adj.get_mut(&a).unwrap().remove(&b);
        self.adj.get_mut(&b).unwrap().remove(&a);
        self.edges.remove(&key(a, b)).unwrap()
    }

    fn length(&self, e: &Edge) -> f64 {
        let mut pts = vec![self.pos[&e.a]];
        pts.extend_from_slice(&e.via);
        pts.push(self.pos[&e.b]);
        polyline_length(&pts)
    }

    /// Interior points of the edge walked from `from` to the other end.
    fn interior_from(e: &Edge, from: i64) -> Vec<(f64, f64)> {
        if e.a == from {
            e.via.clone()
        } else {
            e.via.iter().rev().copied().collect()
        }
    }

    fn degree(&self, n: i64) -> usize {
        self.adj[&n].len()
    }

    fn drop_spurs(&mut self, min_spur: f64) -> bool {
        let doomed: Vec<(i64, i64)> = self
            .edges
            .iter()
            .filter(|(_, e)| {
                (self.degree(e.a) == 1 || self.degree(e.b) == 1) && self.length(e) < min_spur
            })
            .map(|(&k, _)| k)
            .collect();
        for &(a, b) in &doomed {
            self.remove(a, b);
        }
        !doomed.is_empty()
    }

    fn drop_isolated(&mut self) -> bool {
        let lonely: Vec<i64> = self.adj.iter().filter(|(_, s)| s.is_empty()).map(|(&n, _)| n).collect();
        for n in &lonely {
            self.adj.remove(n);
            self.pos.remove(n);
        }
        !lonely.is_empty()
    }

    fn merge_degree_two(&mut self) -> bool {
        let mut changed = false;
        let candidates: Vec<i64> = self.adj.keys().copied().collect();
        for n in candidates {
            if self.degree(n) != 2 {
                continue;
            }
            let mut it = self.adj[&n].iter().copied();
            let (a, b) = (it.next().unwrap(), it.next().unwrap());
            if self.edges.contains_key(&key(a, b)) {
                continue;
            }
            let ea = self.remove(a, n);
            let eb = self.remove(n, b);
            let mut via = Self::interior_from(&ea, a);
            via.push(self.pos[&n]);
            via.extend(Self::interior_from(&eb, n));
            self.insert(Edge { a, b, via });
            self.adj.remove(&n);
            self.pos.remove(&n);
            changed = true;
        }
        changed
    }

    fn into_graph(self, original: &GeoGraph) -> GeoGraph {
        let mut g = GeoGraph::new();
        for n in original.nodes() {
            if self.pos.contains_key(&n.id) {
                g.add_node(n.id, n.x, n.y).expect("unique ids");
            }
        }
        for e in self.edges.into_values() {
            g.add_edge_via(e.a, e.b, e.via).expect("valid edge");
        }
        g
    }
}

/// Remove dangling edges shorter than `min_spur` and isolated nodes, then
/// merge the degree-2 nodes this leaves behind, until nothing changes.
/// Merges that would create a self-loop or a parallel edge are skipped.
/// A `min_spur` of zero returns the graph unchanged.
pub fn prune(graph: &GeoGraph, min_spur: f64) -> GeoGraph {
    if min_spur <= 0.0 {
        return graph.clone();
    }
    let mut w = Work::from_graph(graph);
    loop {
        let spurs = w.drop_spurs(min_spur);
        let lonely = w.drop_isolated();
        let merged = w.merge_degree_two();
        if !(spurs || lonely || merged) {
            break;
        }
    }
    w.into_graph(graph)
}
