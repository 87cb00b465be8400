use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::graph::GeoGraph;

use super::network::{Loc, Network};
use super::MetricConfig;

const PAIR_ATTEMPTS: usize = 64;
const REVERSE_SEED: u64 = 0x9E37_79B9_7F4A_7C15;

/// Score of one sampled path: `1 - min(1, |l_ref - l_target| / l_ref)`, or
/// 0 when the target has no corresponding path.
pub fn apls_contribution(l_ref: f64, l_target: Option<f64>) -> f64 {
    match l_target {
        Some(l) => 1.0 - ((l_ref - l).abs() / l_ref).min(1.0),
        None => 0.0,
    }
}

pub(crate) fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn sample_pair(net: &Network, cps: &[Loc], rng: &mut impl Rng) -> Option<(Loc, Loc, f64)> {
    if cps.len() < 2 {
        return None;
    }
    for _ in 0..PAIR_ATTEMPTS {
        let i = rng.random_range(0..cps.len());
        let mut j = rng.random_range(0..cps.len() - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = (cps[i], cps[j]);
        if let Some(l) = net.path_length(a, b) {
            if l > 0.0 {
                return Some((a, b, l));
            }
        }
    }
    None
}

/// Per-sample `(reference length, target length)` for paths sampled on the
/// reference graph and transferred to the target by snapping. Samples for
/// which no reference pair could be drawn are omitted.
pub(crate) fn transferred_paths(
    reference: &Network,
    target: &Network,
    cfg: &MetricConfig,
    seed: u64,
) -> Vec<(f64, Option<f64>)> {
    let cps = reference.control_points(cfg.control_spacing);
    let per_sample: Vec<Option<(f64, Option<f64>)>> = (0..cfg.samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sample_rng(seed, s);
            let (a, b, l_ref) = sample_pair(reference, &cps, &mut rng)?;
            let ta = target.snap(reference.point(a), cfg.snap_radius);
            let tb = target.snap(reference.point(b), cfg.snap_radius);
            let l_target = match (ta, tb) {
                (Some(ta), Some(tb)) => target.path_length(ta, tb),
                _ => None,
            };
            Some((l_ref, l_target))
        })
        .collect();
    per_sample.into_iter().flatten().collect()
}

fn has_paths(net: &Network) -> bool {
    net.total_length() > 0.0
}

fn directional(reference: &Network, target: &Network, cfg: &MetricConfig, seed: u64) -> f64 {
    let paths = transferred_paths(reference, target, cfg, seed);
    if paths.is_empty() {
        return if has_paths(target) { 0.0 } else { 1.0 };
    }
    paths.iter().map(|&(r, t)| apls_contribution(r, t)).sum::<f64>() / paths.len() as f64
}

/// One-sided APLS: paths sampled on `reference`, looked up in `target`.
pub fn apls_directional(reference: &GeoGraph, target: &GeoGraph, cfg: &MetricConfig) -> f64 {
    directional(&Network::new(reference), &Network::new(target), cfg, cfg.seed)
}

/// Mean of the ground-truth-to-prediction and prediction-to-ground-truth
/// passes.
pub fn apls(pred: &GeoGraph, gt: &GeoGraph, cfg: &MetricConfig) -> f64 {
    let (p, g) = (Network::new(pred), Network::new(gt));
    apls_from(&p, &g, cfg)
}

pub(crate) fn apls_from(pred: &Network, gt: &Network, cfg: &MetricConfig) -> f64 {
    0.5 * (directional(gt, pred, cfg, cfg.seed) + directional(pred, gt, cfg, cfg.seed ^ REVERSE_SEED))
}

/// Fraction of ground-truth paths whose prediction counterpart exists and
/// is within `rel_tol` relative length.
pub fn tlts(pred: &GeoGraph, gt: &GeoGraph, cfg: &MetricConfig) -> f64 {
    tlts_from(&Network::new(pred), &Network::new(gt), cfg)
}

pub(crate) fn tlts_from(pred: &Network, gt: &Network, cfg: &MetricConfig) -> f64 {
    let paths = transferred_paths(gt, pred, cfg, cfg.seed);
    if paths.is_empty() {
        return if has_paths(pred) { 0.0 } else { 1.0 };
    }
    let ok = paths
        .iter()
        .filter(|&&(r, t)| t.is_some_and(|t| (r - t).abs() / r <= cfg.rel_tol))
        .count();
    ok as f64 / paths.len() as f64
}
