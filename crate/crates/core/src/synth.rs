//! Seeded generators for synthetic road graphs, predictions and small
//! pair-weight instances. Used by tests, the self-test command and
//! benchmarks.

use std::ops::Range;

use rand::Rng;

use crate::annotation::{ground_truth_from_centerline, GroundTruth};
use crate::graph::GeoGraph;
use crate::grid::{connected_components, distance_transform, BinaryMask, Connectivity, Extent, LabelGrid, ScalarGrid};

fn border_point(rng: &mut impl Rng, side: u8, w: usize, h: usize) -> (f64, f64) {
    let (xm, ym) = ((w - 1) as f64, (h - 1) as f64);
    match side {
        0 => (rng.random_range(0..w) as f64, 0.0),
        1 => (xm, rng.random_range(0..h) as f64),
        2 => (rng.random_range(0..w) as f64, ym),
        _ => (0.0, rng.random_range(0..h) as f64),
    }
}

/// `roads` straight roads, each running from one image border to another.
/// Roads may cross without a shared node; this is meant for rasterized
/// ground truth, not for graph metrics.
pub fn border_roads(rng: &mut impl Rng, width: usize, height: usize, roads: usize) -> GeoGraph {
    assert!(width >= 2 && height >= 2);
    let mut g = GeoGraph::new();
    for r in 0..roads {
        let s1 = rng.random_range(0..4u8);
        let s2 = (s1 + rng.random_range(1..4u8)) % 4;
        let a = border_point(rng, s1, width, height);
        let mut b = border_point(rng, s2, width, height);
        if a == b {
            b = ((width - 1) as f64 - a.0, (height - 1) as f64 - a.1);
        }
        let id = 2 * r as i64;
        g.add_node(id, a.0, a.1).expect("fresh id");
        g.add_node(id + 1, b.0, b.1).expect("fresh id");
        if a != b {
            g.add_edge(id, id + 1).expect("valid edge");
        }
    }
    g
}

/// Full-length horizontal roads at rows `ys` and vertical roads at columns
/// `xs`, with a node at every crossing and at every border end.
pub fn grid_of_roads(width: usize, height: usize, xs: &[usize], ys: &[usize]) -> GeoGraph {
    let mut cols: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
    let mut rows: Vec<f64> = ys.iter().map(|&y| y as f64).collect();
    let (xm, ym) = ((width - 1) as f64, (height - 1) as f64);
    let stops = |line: &[f64], end: f64| {
        let mut v = vec![0.0];
        v.extend(line.iter().copied().filter(|&c| c > 0.0 && c < end));
        v.push(end);
        v.dedup();
        v
    };
    cols.sort_by(f64::total_cmp);
    rows.sort_by(f64::total_cmp);
    let mut g = GeoGraph::new();
    let mut next = 0i64;
    let mut id_at = std::collections::HashMap::new();
    let mut node = |g: &mut GeoGraph, x: f64, y: f64| -> i64 {
        *id_at.entry((x.to_bits(), y.to_bits())).or_insert_with(|| {
            g.add_node(next, x, y).expect("fresh id");
            next += 1;
            next - 1
        })
    };
    for &y in &rows {
        let xs = stops(&cols, xm);
        for w in xs.windows(2) {
            let a = node(&mut g, w[0], y);
            let b = node(&mut g, w[1], y);
            g.add_edge(a, b).expect("valid edge");
        }
    }
    for &x in &cols {
        let ys = stops(&rows, ym);
        for w in ys.windows(2) {
            let a = node(&mut g, x, w[0]);
            let b = node(&mut g, x, w[1]);
            g.add_edge(a, b).expect("valid edge");
        }
    }
    g
}

/// Grid of full-length roads with 1 to 3 rows and 1 to 3 columns at
/// random positions.
pub fn random_road_grid(rng: &mut impl Rng, width: usize, height: usize) -> GeoGraph {
    let nx = rng.random_range(1..=3);
    let ny = rng.random_range(1..=3);
    let xs: Vec<usize> = (0..nx).map(|_| rng.random_range(0..width)).collect();
    let ys: Vec<usize> = (0..ny).map(|_| rng.random_range(0..height)).collect();
    grid_of_roads(width, height, &xs, &ys)
}

/// Planar graph on a jittered lattice: `nx` × `ny` nodes spaced `spacing`
/// apart with a `margin`, lattice edges kept with probability `keep`.
/// Jitter stays below a quarter spacing so edges never cross.
pub fn lattice_graph(rng: &mut impl Rng, nx: usize, ny: usize, spacing: f64, margin: f64, keep: f64) -> GeoGraph {
    let mut g = GeoGraph::new();
    let jitter = spacing / 4.0;
    for j in 0..ny {
        for i in 0..nx {
            let x = margin + i as f64 * spacing + rng.random_range(-jitter..jitter);
            let y = margin + j as f64 * spacing + rng.random_range(-jitter..jitter);
            g.add_node((j * nx + i) as i64, x.round(), y.round()).expect("fresh id");
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            let id = (j * nx + i) as i64;
            if i + 1 < nx && rng.random_bool(keep) {
                g.add_edge(id, id + 1).expect("valid edge");
            }
            if j + 1 < ny && rng.random_bool(keep) {
                g.add_edge(id, id + nx as i64).expect("valid edge");
            }
        }
    }
    g
}

/// Ground-truth distances plus uniform noise in `[-noise, noise]`.
pub fn noisy_prediction(rng: &mut impl Rng, gt: &GroundTruth, noise: f32) -> ScalarGrid {
    let data = gt.dist.data().iter().map(|&v| v + rng.random_range(-noise..=noise)).collect();
    ScalarGrid::new(gt.dist.width(), gt.dist.height(), data).expect("extent preserved")
}

/// A straight horizontal road across a square image whose prediction has
/// a hole: the distance map is computed as if the centerline pixels at
/// columns `gap` were missing.
#[derive(Debug, Clone)]
pub struct GapScenario {
    pub gt: GroundTruth,
    pub pred: ScalarGrid,
    pub gap: Vec<(usize, usize)>,
}

pub fn gap_scenario(size: usize, road_y: usize, gap: Range<usize>, dilate_radius: u32, dmax: f32) -> GapScenario {
    let centerline = BinaryMask::from_fn(size, size, |_, y| y == road_y);
    let gt = ground_truth_from_centerline(&centerline, dilate_radius, dmax);
    let broken = BinaryMask::from_fn(size, size, |x, y| y == road_y && !gap.contains(&x));
    let pred = distance_transform(&broken).map(|d| d.min(dmax));
    GapScenario { gt, pred, gap: gap.map(|x| (x, road_y)).collect() }
}

/// A small instance for checking pair weights against exhaustive search.
#[derive(Debug, Clone)]
pub struct PairInstance {
    pub pred: ScalarGrid,
    pub region: BinaryMask,
    pub labels: LabelGrid,
}

/// Random grid of at most 6×6 pixels whose background has 2 to 4
/// components, with pairwise distinct values.
pub fn pair_instance(rng: &mut impl Rng) -> PairInstance {
    loop {
        let w = rng.random_range(1..=6);
        let h = rng.random_range(1..=6);
        if w * h < 3 {
            continue;
        }
        let p = rng.random_range(0.2..0.6);
        let bits = (0..w * h).map(|_| rng.random_bool(p)).collect();
        let region = BinaryMask::new(w, h, bits).expect("extent");
        let labels = connected_components(&region.not(), Connectivity::Four);
        if !(2..=4).contains(&labels.component_count()) {
            continue;
        }
        let values: Vec<f32> = (0..w * h).map(|_| rng.random_range(-2.0f32..20.0)).collect();
        let mut sorted = values.clone();
        sorted.sort_by(f32::total_cmp);
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            continue;
        }
        let pred = ScalarGrid::new(w, h, values).expect("extent");
        return PairInstance { pred, region, labels };
    }
}
