use std::collections::HashMap;

use crate::graph::GeoGraph;
use crate::grid::{BinaryMask, Extent};

use super::thin::ring;

const NEIGHBORS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

struct Skeleton<'a> {
    on: &'a [bool],
    w: usize,
    h: usize,
}

impl Skeleton<'_> {
    fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (x, y) = ((i % self.w) as isize, (i / self.w) as isize);
        NEIGHBORS.iter().filter_map(move |&(dx, dy)| {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= self.w as isize || ny >= self.h as isize {
                return None;
            }
            let j = ny as usize * self.w + nx as usize;
            self.on[j].then_some(j)
        })
    }

    fn degree(&self, i: usize) -> usize {
        let r = ring(self.on, self.w, self.h, i % self.w, i / self.w);
        r.iter().filter(|&&b| b).count()
    }

    fn point(&self, i: usize) -> (f64, f64) {
        ((i % self.w) as f64, (i / self.w) as f64)
    }
}

struct Builder {
    graph: GeoGraph,
    next_id: i64,
}

impl Builder {
    fn node(&mut self, p: (f64, f64)) -> i64 {
        let id = self.next_id;
        self.next_id += 1;
        self.graph.add_node(id, p.0, p.1).expect("fresh id");
        id
    }

    fn edge(&mut self, a: i64, b: i64, via: Vec<(f64, f64)>) {
        let added = self.graph.add_edge_via(a, b, via).expect("valid endpoints");
        debug_assert!(added);
    }

    /// Add a chain between two nodes, splitting it when it would close a
    /// loop or duplicate an existing edge.
    fn chain(&mut self, a: i64, b: i64, pts: Vec<(f64, f64)>) {
        if a == b {
            self.ring_through(a, pts);
        } else if self.graph.contains_edge(a, b) {
            if pts.is_empty() {
                return;
            }
            let mid = pts.len() / 2;
            let m = self.node(pts[mid]);
            self.edge(a, m, pts[..mid].to_vec());
            self.edge(m, b, pts[mid + 1..].to_vec());
        } else {
            self.edge(a, b, pts);
        }
    }

    /// Loop leaving and re-entering `anchor` through `pts`: two extra nodes
    /// at thirds turn it into a triangle.
    fn ring_through(&mut self, anchor: i64, pts: Vec<(f64, f64)>) {
        match pts.len() {
            0 => {}
            1 => {
                let m = self.node(pts[0]);
                self.edge(anchor, m, Vec::new());
            }
            k => {
                let i1 = k / 3;
                let i2 = (2 * k / 3).max(i1 + 1);
                let n1 = self.node(pts[i1]);
                let n2 = self.node(pts[i2]);
                self.edge(anchor, n1, pts[..i1].to_vec());
                self.edge(n1, n2, pts[i1 + 1..i2].to_vec());
                self.edge(n2, anchor, pts[i2 + 1..].to_vec());
            }
        }
    }
}

/// Convert a thin skeleton into a graph. Endpoints and junctions become
/// nodes (adjacent junction pixels collapse into one node), chains of
/// degree-2 pixels become edges carrying the traced pixels as geometry, and
/// pure cycles are cut into triangles anchored at their first pixel in
/// raster order.
pub fn skeleton_to_graph(skel: &BinaryMask) -> GeoGraph {
    let (w, h) = skel.extent();
    let sk = Skeleton { on: skel.data(), w, h };
    let n = w * h;
    let is_node: Vec<bool> = (0..n).map(|i| sk.on[i] && sk.degree(i) != 2).collect();

    let mut b = Builder {
        graph: GeoGraph::new(),
        next_id: 0,
    };

    // Cluster node pixels (8-connected) in raster order.
    let mut cluster_of: HashMap<usize, i64> = HashMap::new();
    let mut clusters: Vec<(i64, Vec<usize>)> = Vec::new();
    let mut parent: HashMap<usize, usize> = HashMap::new();
    for start in 0..n {
        if !is_node[start] || cluster_of.contains_key(&start) {
            continue;
        }
        let mut members = vec![start];
        let mut seen = vec![start];
        cluster_of.insert(start, -1);
        while let Some(i) = seen.pop() {
            for j in sk.neighbors(i) {
                if is_node[j] && !cluster_of.contains_key(&j) {
                    cluster_of.insert(j, -1);
                    members.push(j);
                    seen.push(j);
                }
            }
        }
        members.sort_unstable();
        let cx = members.iter().map(|&i| sk.point(i).0).sum::<f64>() / members.len() as f64;
        let cy = members.iter().map(|&i| sk.point(i).1).sum::<f64>() / members.len() as f64;
        let anchor = *members
            .iter()
            .min_by(|&&a, &&c| {
                let da = (sk.point(a).0 - cx).powi(2) + (sk.point(a).1 - cy).powi(2);
                let dc = (sk.point(c).0 - cx).powi(2) + (sk.point(c).1 - cy).powi(2);
                da.total_cmp(&dc)
            })
            .unwrap();
        let id = b.node(sk.point(anchor));
        for &m in &members {
            cluster_of.insert(m, id);
        }
        // Breadth-first tree inside the cluster, rooted at the node pixel.
        let mut queue = std::collections::VecDeque::from([anchor]);
        parent.insert(anchor, anchor);
        while let Some(i) = queue.pop_front() {
            for j in sk.neighbors(i) {
                if is_node[j] && !parent.contains_key(&j) {
                    parent.insert(j, i);
                    queue.push_back(j);
                }
            }
        }
        clusters.push((id, members));
    }
    // Cluster pixels from `m` up to, but excluding, its node pixel.
    let to_anchor = |m: usize| {
        let mut out = Vec::new();
        let mut i = m;
        while parent[&i] != i {
            out.push(sk.point(i));
            i = parent[&i];
        }
        out
    };

    let mut covered = vec![false; n];
    let cover = |covered: &mut Vec<bool>, m: usize| {
        let mut i = m;
        while !covered[i] {
            covered[i] = true;
            i = parent[&i];
        }
    };
    let mut visited = vec![false; n];
    for (id, members) in &clusters {
        for &m in members {
            let starts: Vec<usize> = sk.neighbors(m).collect();
            for s in starts {
                if is_node[s] || visited[s] {
                    continue;
                }
                // Walk the degree-2 chain until it reaches a node pixel.
                cover(&mut covered, m);
                let mut pts = to_anchor(m);
                pts.reverse();
                let (mut prev, mut cur) = (m, s);
                let end = loop {
                    visited[cur] = true;
                    let first = prev == m;
                    pts.push(sk.point(cur));
                    let next = sk.neighbors(cur).find(|&j| j != prev && !(is_node[j] && j == m && first));
                    let Some(next) = next else {
                        break None;
                    };
                    if is_node[next] {
                        cover(&mut covered, next);
                        pts.extend(to_anchor(next));
                        break Some(cluster_of[&next]);
                    }
                    if visited[next] {
                        break None;
                    }
                    prev = cur;
                    cur = next;
                };
                match end {
                    Some(other) => b.chain(*id, other, pts),
                    // Only reachable on non-thin input; keep the pixels as a spur.
                    None => b.chain_dead_end(*id, pts),
                }
            }
        }
    }

    // Cluster pixels no chain passes through end short spurs.
    for (id, members) in &clusters {
        let mut rest: Vec<(Vec<(f64, f64)>, usize)> = members
            .iter()
            .filter(|&&m| !covered[m])
            .map(|&m| (to_anchor(m), m))
            .collect();
        rest.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
        for (mut pts, m) in rest {
            if covered[m] {
                continue;
            }
            cover(&mut covered, m);
            pts.reverse();
            b.chain_dead_end(*id, pts);
        }
    }

    // Whatever is left consists of pure cycles.
    for start in 0..n {
        if !sk.on[start] || is_node[start] || visited[start] {
            continue;
        }
        let mut order = vec![start];
        visited[start] = true;
        let mut prev = start;
        let mut cur = sk.neighbors(start).min().expect("cycle pixel has neighbors");
        while !visited[cur] {
            visited[cur] = true;
            order.push(cur);
            let next = sk.neighbors(cur).find(|&j| j != prev && !visited[j]);
            prev = cur;
            match next {
                Some(j) => cur = j,
                None => break,
            }
        }
        let pts: Vec<(f64, f64)> = order.iter().map(|&i| sk.point(i)).collect();
        let anchor = b.node(pts[0]);
        b.ring_through(anchor, pts[1..].to_vec());
    }
    b.graph
}

impl Builder {
    fn chain_dead_end(&mut self, a: i64, mut pts: Vec<(f64, f64)>) {
        let Some(last) = pts.pop() else {
            return;
        };
        let m = self.node(last);
        self.edge(a, m, pts);
    }
}
