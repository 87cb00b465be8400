//! Exhaustive reference for the pair weights, independent of the Kruskal
//! sweep: every pair of labeled pixels gets its maximin cost from a
//! widest-path search and is attributed to the pixel holding that cost.
//!
//! Attribution is unambiguous only when all prediction values are
//! distinct, which is how the oracle is meant to be used.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::grid::{ensure_same_extent, BinaryMask, Extent, LabelGrid, ScalarGrid};

use super::pairs::PairWeights;

#[derive(PartialEq)]
struct Widest(f32, usize);

impl Eq for Widest {}

impl Ord for Widest {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Widest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Maximin cost from `source` to every pixel over 4-connected paths; a
/// path's cost is its smallest pixel value, endpoints included.
pub fn maximin_from(pred: &ScalarGrid, source: (usize, usize)) -> Vec<f32> {
    let (w, h) = pred.extent();
    let vals = pred.data();
    let mut best = vec![f32::NEG_INFINITY; w * h];
    let mut done = vec![false; w * h];
    let s = source.1 * w + source.0;
    best[s] = vals[s];
    let mut heap = BinaryHeap::new();
    heap.push(Widest(vals[s], s));
    while let Some(Widest(cost, i)) = heap.pop() {
        if done[i] {
            continue;
        }
        done[i] = true;
        let (x, y) = (i % w, i / w);
        let mut relax = |j: usize| {
            let c = cost.min(vals[j]);
            if !done[j] && c > best[j] {
                best[j] = c;
                heap.push(Widest(c, j));
            }
        };
        if x > 0 {
            relax(i - 1);
        }
        if x + 1 < w {
            relax(i + 1);
        }
        if y > 0 {
            relax(i - w);
        }
        if y + 1 < h {
            relax(i + w);
        }
    }
    best
}

/// Maximin cost between two pixels.
pub fn maximin_bruteforce(pred: &ScalarGrid, q: (usize, usize), r: (usize, usize)) -> f32 {
    maximin_from(pred, q)[r.1 * pred.width() + r.0]
}

/// Pair weights by enumerating every labeled pair.
pub fn brute_force_pair_weights(
    pred: &ScalarGrid,
    labels: &LabelGrid,
    region: &BinaryMask,
) -> Result<PairWeights> {
    Ok(enumerate_pairs(pred, labels, region)?.weights)
}

/// Pair weights together with the pairwise loss sums: the squared maximin
/// cost over kept cross-label pairs, and the squared error at the
/// bottleneck over kept same-label pairs.
pub struct PairEnumeration {
    pub weights: PairWeights,
    pub dis: f64,
    pub conn: f64,
}

pub fn enumerate_pairs(
    pred: &ScalarGrid,
    labels: &LabelGrid,
    region: &BinaryMask,
) -> Result<PairEnumeration> {
    enumerate_pairs_against(pred, None, labels, region)
}

pub fn enumerate_pairs_against(
    pred: &ScalarGrid,
    gt_dist: Option<&ScalarGrid>,
    labels: &LabelGrid,
    region: &BinaryMask,
) -> Result<PairEnumeration> {
    ensure_same_extent(pred, labels)?;
    ensure_same_extent(pred, region)?;
    let (w, h) = pred.extent();
    let vals = pred.data();
    let lab = labels.data();
    let mut out = PairWeights::zeros(w, h);
    let (mut dis, mut conn) = (0.0f64, 0.0f64);

    for q in 0..w * h {
        if lab[q] == 0 {
            continue;
        }
        let costs = maximin_from(pred, (q % w, q / w));
        for r in q + 1..w * h {
            if lab[r] == 0 {
                continue;
            }
            let m = costs[r];
            let b = vals
                .iter()
                .position(|&v| v.total_cmp(&m) == Ordering::Equal)
                .expect("maximin cost is a pixel value");
            let mv = f64::from(m);
            if lab[q] != lab[r] {
                if region.data()[b] {
                    out.w[b] += 1;
                    dis += mv * mv;
                }
            } else if !region.data()[b] {
                out.v[b] += 1;
                if let Some(gt) = gt_dist {
                    let d = mv - f64::from(gt.data()[b]);
                    conn += d * d;
                }
            }
        }
    }
    Ok(PairEnumeration {
        weights: out,
        dis,
        conn,
    })
}
