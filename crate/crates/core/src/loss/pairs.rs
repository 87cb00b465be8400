//! Maximin pair weights via a single Kruskal sweep.
//!
//! Pixels are nodes of the 4-adjacency graph and each edge carries the
//! affinity `min(pred[p], pred[q])`. Edges are merged in decreasing
//! affinity; when two components meet, every pair of labeled pixels across
//! them has its maximin path bottlenecked at the smaller-valued endpoint of
//! the merging edge. Components carry a histogram of background labels so
//! the pair counts of a merge fall out of the two histograms.

use std::cmp::Ordering;

use crate::error::Result;
use crate::grid::{ensure_same_extent, BinaryMask, Extent, LabelGrid, ScalarGrid};

/// How the maximin search treats the road region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairSearch {
    /// Paths run anywhere; pairs whose bottleneck lands on the wrong side of
    /// the region test are dropped.
    #[default]
    Unconstrained,
    /// Cross-label paths see the background as free and same-label paths
    /// see the region as blocked, so every bottleneck lands where it counts.
    Constrained,
}

/// Per-pixel pair counts: `w` for pairs from different background
/// components, `v` for pairs from the same component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairWeights {
    width: usize,
    height: usize,
    pub w: Vec<u64>,
    pub v: Vec<u64>,
}

impl Extent for PairWeights {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
}

impl PairWeights {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            w: vec![0; width * height],
            v: vec![0; width * height],
        }
    }

    pub fn w_at(&self, x: usize, y: usize) -> u64 {
        self.w[y * self.width + x]
    }

    pub fn v_at(&self, x: usize, y: usize) -> u64 {
        self.v[y * self.width + x]
    }

    /// Copy window-local weights into this full-extent grid at `(x0, y0)`.
    pub fn paste(&mut self, local: &PairWeights, x0: usize, y0: usize) {
        for y in 0..local.height {
            let src = y * local.width;
            let dst = (y0 + y) * self.width + x0;
            self.w[dst..dst + local.width].copy_from_slice(&local.w[src..src + local.width]);
            self.v[dst..dst + local.width].copy_from_slice(&local.v[src..src + local.width]);
        }
    }
}

/// Number of labeled pixel pairs split into (cross-label, same-label).
pub fn pair_totals(labels: &LabelGrid) -> (u64, u64) {
    let sizes = labels.sizes();
    let total: u64 = sizes.iter().sum();
    let same: u64 = sizes.iter().map(|&s| s * s.saturating_sub(1) / 2).sum();
    let all = total * total.saturating_sub(1) / 2;
    (all - same, same)
}

struct LabelForest {
    parent: Vec<u32>,
    size: Vec<u32>,
    // Sorted (label, count) histogram per root.
    hist: Vec<Vec<(u32, u64)>>,
}

impl LabelForest {
    fn new(labels: &[u32]) -> Self {
        let n = labels.len();
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            hist: labels
                .iter()
                .map(|&l| if l > 0 { vec![(l, 1)] } else { Vec::new() })
                .collect(),
        }
    }

    fn find(&mut self, mut i: u32) -> u32 {
        let mut root = i;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[i as usize] != root {
            let next = self.parent[i as usize];
            self.parent[i as usize] = root;
            i = next;
        }
        root
    }

    /// Merge two roots and return the (cross, same) pair counts joined.
    fn union(&mut self, a: u32, b: u32) -> (u64, u64) {
        let (big, small) = if self.size[a as usize] >= self.size[b as usize] {
            (a, b)
        } else {
            (b, a)
        };
        let ha = std::mem::take(&mut self.hist[big as usize]);
        let hb = std::mem::take(&mut self.hist[small as usize]);
        let ta: u64 = ha.iter().map(|e| e.1).sum();
        let tb: u64 = hb.iter().map(|e| e.1).sum();

        let mut merged = Vec::with_capacity(ha.len() + hb.len());
        let mut same = 0u64;
        let (mut i, mut j) = (0, 0);
        while i < ha.len() && j < hb.len() {
            match ha[i].0.cmp(&hb[j].0) {
                Ordering::Less => {
                    merged.push(ha[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    merged.push(hb[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    same += ha[i].1 * hb[j].1;
                    merged.push((ha[i].0, ha[i].1 + hb[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&ha[i..]);
        merged.extend_from_slice(&hb[j..]);

        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.hist[big as usize] = merged;
        (ta * tb - same, same)
    }
}

/// 4-adjacency edges sorted by (affinity desc, lower index asc, higher index asc).
fn sorted_edges(values: &[f32], width: usize, height: usize) -> Vec<(f32, u32, u32)> {
    let mut edges = Vec::with_capacity(2 * width * height);
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            if x + 1 < width {
                edges.push((values[i].min(values[i + 1]), i as u32, i as u32 + 1));
            }
            if y + 1 < height {
                let j = i + width;
                edges.push((values[i].min(values[j]), i as u32, j as u32));
            }
        }
    }
    edges.sort_unstable_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    edges
}

/// The smaller-valued endpoint, ties going to the lower index.
#[inline]
pub(crate) fn bottleneck(values: &[f32], lo: u32, hi: u32) -> u32 {
    if values[hi as usize].total_cmp(&values[lo as usize]) == Ordering::Less {
        hi
    } else {
        lo
    }
}

#[derive(Clone, Copy)]
enum Keep {
    Both,
    CrossOnly,
    SameOnly,
}

fn sweep(values: &[f32], width: usize, height: usize, labels: &[u32], region: &[bool], keep: Keep, out: &mut PairWeights) {
    let mut forest = LabelForest::new(labels);
    let mut merges = 0usize;
    let n = width * height;
    for (_, lo, hi) in sorted_edges(values, width, height) {
        let ra = forest.find(lo);
        let rb = forest.find(hi);
        if ra == rb {
            continue;
        }
        let (cross, same) = forest.union(ra, rb);
        let b = bottleneck(values, lo, hi) as usize;
        if region[b] {
            if !matches!(keep, Keep::SameOnly) {
                out.w[b] += cross;
            }
        } else if !matches!(keep, Keep::CrossOnly) {
            out.v[b] += same;
        }
        merges += 1;
        if merges + 1 == n {
            break;
        }
    }
}

/// Kruskal sweep computing `w` (cross-label pairs bottlenecked inside the
/// region) and `v` (same-label pairs bottlenecked outside it).
pub fn compute_pair_weights(
    pred: &ScalarGrid,
    labels: &LabelGrid,
    region: &BinaryMask,
) -> Result<PairWeights> {
    compute_pair_weights_with(pred, labels, region, PairSearch::Unconstrained)
}

pub fn compute_pair_weights_with(
    pred: &ScalarGrid,
    labels: &LabelGrid,
    region: &BinaryMask,
    search: PairSearch,
) -> Result<PairWeights> {
    ensure_same_extent(pred, labels)?;
    ensure_same_extent(pred, region)?;
    let (w, h) = pred.extent();
    let mut out = PairWeights::zeros(w, h);
    if w * h == 0 {
        return Ok(out);
    }
    match search {
        PairSearch::Unconstrained => {
            sweep(pred.data(), w, h, labels.data(), region.data(), Keep::Both, &mut out);
        }
        PairSearch::Constrained => {
            let free_background: Vec<f32> = pred
                .data()
                .iter()
                .zip(region.data())
                .map(|(&v, &r)| if r { v } else { f32::INFINITY })
                .collect();
            sweep(&free_background, w, h, labels.data(), region.data(), Keep::CrossOnly, &mut out);
            let blocked_region: Vec<f32> = pred
                .data()
                .iter()
                .zip(region.data())
                .map(|(&v, &r)| if r { f32::NEG_INFINITY } else { v })
                .collect();
            sweep(&blocked_region, w, h, labels.data(), region.data(), Keep::SameOnly, &mut out);
        }
    }
    Ok(out)
}
