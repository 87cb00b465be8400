use crate::graph::{sorted_degrees, GeoGraph};

use super::network::dist;
use super::MetricConfig;

/// Junction recall, precision and F1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionScore {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

struct Junction {
    id: i64,
    at: (f64, f64),
    degree: usize,
}

fn junctions(g: &GeoGraph) -> Vec<Junction> {
    sorted_degrees(g)
        .into_iter()
        .filter(|&(_, d)| d >= 3)
        .map(|(id, degree)| {
            let n = g.node(id).unwrap();
            Junction { id, at: (n.x, n.y), degree }
        })
        .collect()
}

/// One-to-one matching of points within `radius`, greedy by increasing
/// distance with ties broken by the keys. Returns `(left, right)` indices.
pub(crate) fn greedy_match<K: Ord + Copy>(
    left: &[((f64, f64), K)],
    right: &[((f64, f64), K)],
    radius: f64,
) -> Vec<(usize, usize)> {
    let mut cand = Vec::new();
    for (i, &(p, _)) in left.iter().enumerate() {
        for (j, &(q, _)) in right.iter().enumerate() {
            let d = dist(p, q);
            if d <= radius {
                cand.push((d, i, j));
            }
        }
    }
    cand.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then_with(|| left[x.1].1.cmp(&left[y.1].1))
            .then_with(|| right[x.2].1.cmp(&right[y.2].1))
    });
    let mut used_l = vec![false; left.len()];
    let mut used_r = vec![false; right.len()];
    let mut out = Vec::new();
    for (_, i, j) in cand {
        if !used_l[i] && !used_r[j] {
            used_l[i] = true;
            used_r[j] = true;
            out.push((i, j));
        }
    }
    out
}

pub(crate) fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Score junctions (nodes of degree at least 3). A matched ground-truth
/// junction contributes `min(deg_pred, deg_gt) / deg_gt` to recall and
/// symmetrically for precision.
pub fn jct(pred: &GeoGraph, gt: &GeoGraph, cfg: &MetricConfig) -> JunctionScore {
    let (jp, jg) = (junctions(pred), junctions(gt));
    let keyed = |js: &[Junction]| js.iter().map(|j| (j.at, j.id)).collect::<Vec<_>>();
    let pairs = greedy_match(&keyed(&jg), &keyed(&jp), cfg.snap_radius);
    let side = |own: &[Junction], scored: f64| {
        if own.is_empty() {
            if jp.is_empty() && jg.is_empty() { 1.0 } else { 0.0 }
        } else {
            scored / own.len() as f64
        }
    };
    let rec: f64 = pairs
        .iter()
        .map(|&(g, p)| jg[g].degree.min(jp[p].degree) as f64 / jg[g].degree as f64)
        .sum();
    let prec: f64 = pairs
        .iter()
        .map(|&(g, p)| jg[g].degree.min(jp[p].degree) as f64 / jp[p].degree as f64)
        .sum();
    let recall = side(&jg, rec);
    let precision = side(&jp, prec);
    JunctionScore { recall, precision, f1: f1(precision, recall) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    const PLUS: &str = "N 0 50 50\nN 1 0 50\nN 2 100 50\nN 3 50 0\nN 4 50 100\nE 0 1\nE 0 2\nE 0 3\nE 0 4";

    #[test]
    fn self_match() {
        let g = parse_graph(PLUS).unwrap();
        let s = jct(&g, &g, &MetricConfig::default());
        assert_eq!((s.recall, s.precision, s.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn missing_arm() {
        let gt = parse_graph(PLUS).unwrap();
        let pred = gt.without_edge(0, 4);
        let s = jct(&pred, &gt, &MetricConfig::default());
        assert_eq!(s.recall, 0.75);
        assert_eq!(s.precision, 1.0);
        assert!((s.f1 - 6.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn no_junctions() {
        let gt = parse_graph(PLUS).unwrap();
        let line = parse_graph("N 0 0 50\nN 1 100 50\nE 0 1").unwrap();
        assert_eq!(jct(&line, &gt, &MetricConfig::default()).f1, 0.0);
        assert_eq!(jct(&line, &line, &MetricConfig::default()).f1, 1.0);
    }

    #[test]
    fn far_junction_is_unmatched() {
        let gt = parse_graph(PLUS).unwrap();
        let moved = parse_graph(&PLUS.replace("N 0 50 50", "N 0 50 70")).unwrap();
        assert_eq!(jct(&moved, &gt, &MetricConfig::default()).f1, 0.0);
    }

    #[test]
    fn greedy_prefers_closest_then_key() {
        let l = [((0.0, 0.0), 1), ((4.0, 0.0), 2)];
        let r = [((2.0, 0.0), 7)];
        assert_eq!(greedy_match(&l, &r, 5.0), vec![(0, 0)]);
    }
}
