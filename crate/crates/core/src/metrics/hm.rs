//! Holes and marbles: from corresponding start points, drop markers at
//! regular travel distances along every path in each graph and match the
//! two marker sets.

use rayon::prelude::*;

use crate::graph::GeoGraph;

use super::apls::sample_rng;
use super::jct::{f1, greedy_match};
use super::network::{Loc, Network};
use super::MetricConfig;

const START_ATTEMPTS: usize = 64;
const HM_SEED: u64 = 0xD1B5_4A32_D192_ED03;
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Marker counts for one start point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HmCounts {
    pub matched: usize,
    pub gt: usize,
    pub pred: usize,
}

/// Points at travel distance `k * spacing` from `start`, for `k` in `1..=steps`.
pub(crate) fn markers(net: &Network, start: Loc, spacing: f64, steps: usize) -> Vec<(f64, f64)> {
    let d = net.distances(start);
    let mut out = Vec::new();
    for k in 1..=steps {
        let target = k as f64 * spacing;
        let tol = EPS * target.max(1.0);
        for (i, &di) in d.iter().enumerate() {
            if (di - target).abs() <= tol {
                out.push(net.pos[i]);
            }
        }
        for (e, &(a, b)) in net.ends.iter().enumerate() {
            let len = net.len[e];
            let on_start = match start {
                Loc::Edge { edge, offset } if edge == e => Some(offset),
                _ => None,
            };
            let travel = |t: f64| {
                let mut f = (d[a] + t).min(d[b] + len - t);
                if let Some(o) = on_start {
                    f = f.min((t - o).abs());
                }
                f
            };
            let mut cands = vec![target - d[a], len - (target - d[b])];
            if let Some(o) = on_start {
                cands.push(o - target);
                cands.push(o + target);
            }
            let mut kept: Vec<f64> = Vec::new();
            for t in cands {
                if !t.is_finite() || t <= EPS || t >= len - EPS {
                    continue;
                }
                if (travel(t) - target).abs() > tol || kept.iter().any(|&u| (u - t).abs() <= EPS) {
                    continue;
                }
                kept.push(t);
                out.push(net.point(Loc::Edge { edge: e, offset: t }));
            }
        }
    }
    out
}

pub(crate) fn sample_counts(pred: &Network, gt: &Network, gt_start: Loc, cfg: &MetricConfig) -> Option<HmCounts> {
    let p_start = pred.snap(gt.point(gt_start), cfg.snap_radius)?;
    let mg = markers(gt, gt_start, cfg.hm_radius, cfg.hm_steps);
    let mp = markers(pred, p_start, cfg.hm_radius, cfg.hm_steps);
    let key = |m: &[(f64, f64)]| m.iter().enumerate().map(|(i, &p)| (p, i)).collect::<Vec<_>>();
    let matched = greedy_match(&key(&mg), &key(&mp), cfg.hm_radius).len();
    Some(HmCounts { matched, gt: mg.len(), pred: mp.len() })
}

/// Marker counts for a single ground-truth start point, `None` when it
/// does not snap onto the prediction.
pub fn hm_sample(pred: &GeoGraph, gt: &GeoGraph, start: (f64, f64), cfg: &MetricConfig) -> Option<HmCounts> {
    let (p, g) = (Network::new(pred), Network::new(gt));
    let s = g.snap(start, cfg.snap_radius)?;
    sample_counts(&p, &g, s, cfg)
}

pub fn holes_marbles(pred: &GeoGraph, gt: &GeoGraph, cfg: &MetricConfig) -> HmScore {
    hm_from(&Network::new(pred), &Network::new(gt), cfg)
}

pub(crate) fn hm_from(pred: &Network, gt: &Network, cfg: &MetricConfig) -> HmScore {
    let seed = cfg.seed ^ HM_SEED;
    let per_sample: Vec<Option<HmCounts>> = (0..cfg.samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sample_rng(seed, s);
            (0..START_ATTEMPTS).find_map(|_| {
                let start = gt.random_location(&mut rng)?;
                sample_counts(pred, gt, start, cfg)
            })
        })
        .collect();
    let mut total = HmCounts::default();
    let mut any = false;
    for c in per_sample.into_iter().flatten() {
        any = true;
        total.matched += c.matched;
        total.gt += c.gt;
        total.pred += c.pred;
    }
    if !any {
        let v = if gt.total_length() == 0.0 && pred.total_length() == 0.0 { 1.0 } else { 0.0 };
        return HmScore { precision: v, recall: v, f1: v };
    }
    let ratio = |m: usize, n: usize| if n == 0 { 1.0 } else { m as f64 / n as f64 };
    let precision = ratio(total.matched, total.pred);
    let recall = ratio(total.matched, total.gt);
    HmScore { precision, recall, f1: f1(precision, recall) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    const FORK: &str = "N 0 0 100\nN 1 100 100\nN 2 200 100\nN 3 100 0\nE 0 1\nE 1 2\nE 1 3";

    #[test]
    fn markers_on_a_line() {
        let g = parse_graph("N 0 0 0\nN 1 100 0\nE 0 1").unwrap();
        let net = Network::new(&g);
        let m = markers(&net, Loc::Edge { edge: 0, offset: 40.0 }, 15.0, 8);
        let mut xs: Vec<f64> = m.iter().map(|p| p.0).collect();
        xs.sort_by(f64::total_cmp);
        let want = [10.0, 25.0, 55.0, 70.0, 85.0, 100.0];
        assert_eq!(xs.len(), want.len());
        for (x, w) in xs.iter().zip(want) {
            assert!((x - w).abs() < 1e-9, "{xs:?}");
        }
    }

    #[test]
    fn missing_branch_lowers_recall_only() {
        let gt = parse_graph(FORK).unwrap();
        let pred = gt.without_edge(1, 3);
        let cfg = MetricConfig::default();
        let c = hm_sample(&pred, &gt, (60.0, 100.0), &cfg).unwrap();
        assert_eq!(c.matched, c.pred);
        assert!(c.matched < c.gt, "{c:?}");
        let s = holes_marbles(&pred, &gt, &cfg);
        assert_eq!(s.precision, 1.0);
        assert!(s.recall < 1.0);
    }

    #[test]
    fn self_and_empty() {
        let g = parse_graph(FORK).unwrap();
        let cfg = MetricConfig { samples: 40, ..MetricConfig::default() };
        assert!((holes_marbles(&g, &g, &cfg).f1 - 1.0).abs() < 1e-9);
        assert_eq!(holes_marbles(&GeoGraph::new(), &g, &cfg).f1, 0.0);
    }
}
