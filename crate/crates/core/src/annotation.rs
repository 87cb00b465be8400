//! Ground-truth preparation from centerline annotations: rasterize the
//! graph, dilate it into the road region, label the background, and build
//! the capped distance map.

use crate::error::{Error, Result};
use crate::graph::GeoGraph;
use crate::grid::{
    connected_components, dilate, distance_transform, BinaryMask, Connectivity, LabelGrid,
    ScalarGrid,
};

pub const DEFAULT_DILATE_RADIUS: u32 = 5;
pub const DEFAULT_DMAX: f32 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// Dilated centerlines.
    pub region: BinaryMask,
    /// 4-connected components of the complement of `region`.
    pub labels: LabelGrid,
    /// Distance to the centerline, capped at `dmax`.
    pub dist: ScalarGrid,
    pub dmax: f32,
}

fn pixel_of(id: i64, x: f64, y: f64, width: usize, height: usize) -> Result<(i64, i64)> {
    let (px, py) = (x.round(), y.round());
    if !(px >= 0.0 && py >= 0.0 && px < width as f64 && py < height as f64) {
        return Err(Error::NodeOutOfRange {
            id,
            x,
            y,
            width,
            height,
        });
    }
    Ok((px as i64, py as i64))
}

/// Bresenham segment, both endpoints included.
pub fn draw_line(mask: &mut BinaryMask, from: (i64, i64), to: (i64, i64)) {
    let (mut x, mut y) = from;
    let dx = (to.0 - x).abs();
    let dy = -(to.1 - y).abs();
    let sx = if x < to.0 { 1 } else { -1 };
    let sy = if y < to.1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        mask.set(x as usize, y as usize, true);
        if (x, y) == to {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Draw every edge as 8-connected digital segments between rounded
/// points. Nodes without edges become single pixels.
pub fn rasterize(graph: &GeoGraph, width: usize, height: usize) -> Result<BinaryMask> {
    let mut mask = BinaryMask::empty(width, height);
    for n in graph.nodes() {
        let (x, y) = pixel_of(n.id, n.x, n.y, width, height)?;
        mask.set(x as usize, y as usize, true);
    }
    for e in graph.edges() {
        let pts = graph.polyline(e);
        let mut prev = None;
        for (i, &(x, y)) in pts.iter().enumerate() {
            // Interior points are reported against the edge's first node.
            let id = if i + 1 == pts.len() { e.b } else { e.a };
            let p = pixel_of(id, x, y, width, height)?;
            if let Some(q) = prev {
                draw_line(&mut mask, q, p);
            }
            prev = Some(p);
        }
    }
    Ok(mask)
}

/// Centerline mask, road region, background labels and capped distance map.
pub fn build_ground_truth(
    graph: &GeoGraph,
    width: usize,
    height: usize,
    dilate_radius: u32,
    dmax: f32,
) -> Result<GroundTruth> {
    if !(dmax > 0.0 && dmax.is_finite()) {
        return Err(Error::Config(format!("dmax must be positive, got {dmax}")));
    }
    let centerline = rasterize(graph, width, height)?;
    Ok(ground_truth_from_centerline(&centerline, dilate_radius, dmax))
}

pub fn ground_truth_from_centerline(
    centerline: &BinaryMask,
    dilate_radius: u32,
    dmax: f32,
) -> GroundTruth {
    let region = dilate(centerline, dilate_radius);
    let labels = connected_components(&region.not(), Connectivity::Four);
    let dist = distance_transform(centerline).map(|d| d.min(dmax));
    GroundTruth {
        region,
        labels,
        dist,
        dmax,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::grid::Extent;

    #[test]
    fn axis_aligned_edge() {
        let g = parse_graph("N 0 1 1\nN 1 5 1\nE 0 1").unwrap();
        let m = rasterize(&g, 8, 4).unwrap();
        assert_eq!(m.count(), 5);
        assert!((1..=5).all(|x| m.get(x, 1)));
    }

    #[test]
    fn diagonal_edge() {
        let g = parse_graph("N 0 0 0\nN 1 3 3\nE 0 1").unwrap();
        let m = rasterize(&g, 4, 4).unwrap();
        assert_eq!(m.count(), 4);
        assert!((0..4).all(|i| m.get(i, i)));
    }

    #[test]
    fn empty_graph_and_isolated_node() {
        assert_eq!(rasterize(&GeoGraph::new(), 5, 5).unwrap().count(), 0);
        let g = parse_graph("N 4 2.4 3.6").unwrap();
        let m = rasterize(&g, 5, 5).unwrap();
        assert_eq!(m.count(), 1);
        assert!(m.get(2, 4));
    }

    #[test]
    fn out_of_range_node() {
        let g = parse_graph("N 0 1 1\nN 12 9.7 1\nE 0 12").unwrap();
        assert!(matches!(
            rasterize(&g, 10, 10),
            Err(Error::NodeOutOfRange { id: 12, .. })
        ));
    }

    #[test]
    fn bresenham_is_eight_connected_and_symmetric_in_length() {
        for &(a, b) in &[((0, 0), (7, 3)), ((6, 1), (0, 5)), ((2, 7), (3, 0))] {
            let mut m = BinaryMask::empty(8, 8);
            draw_line(&mut m, a, b);
            let span = (a.0 - b.0).abs().max((a.1 - b.1).abs()) as usize + 1;
            assert_eq!(m.count(), span);
            let l = connected_components(&m, Connectivity::Eight);
            assert_eq!(l.component_count(), 1);
        }
    }

    #[test]
    fn empty_graph_ground_truth() {
        let gt = build_ground_truth(&GeoGraph::new(), 32, 32, 5, 20.0).unwrap();
        assert_eq!(gt.region.count(), 0);
        assert_eq!(gt.labels.component_count(), 1);
        assert!(gt.dist.data().iter().all(|&d| d == 20.0));
    }

    #[test]
    fn vertical_line_splits_tile() {
        let g = parse_graph("N 0 31 0\nN 1 31 63\nE 0 1").unwrap();
        let gt = build_ground_truth(&g, 64, 64, 5, 20.0).unwrap();
        assert_eq!(gt.labels.component_count(), 2);
        for y in 0..64 {
            let band: Vec<usize> = (0..64).filter(|&x| gt.region.get(x, y)).collect();
            assert_eq!(band, (26..=36).collect::<Vec<_>>());
        }
        assert_eq!(gt.labels.get(0, 0), 1);
        assert_eq!(gt.labels.get(63, 0), 2);
        assert_eq!(gt.dist.get(31, 10), 0.0);
        assert_eq!(gt.dist.get(0, 10), 20.0);
        assert_eq!(gt.dist.get(40, 10), 9.0);
    }

    #[test]
    fn region_labels_partition_and_lipschitz() {
        let g = parse_graph("N 0 2 3\nN 1 40 29\nN 2 12 37\nE 0 1\nE 1 2").unwrap();
        let gt = build_ground_truth(&g, 48, 40, 3, 8.0).unwrap();
        let (w, h) = gt.dist.extent();
        let center = rasterize(&g, 48, 40).unwrap();
        for y in 0..h {
            for x in 0..w {
                assert_eq!(gt.region.get(x, y), gt.labels.get(x, y) == 0);
                assert!(gt.dist.get(x, y) <= 8.0);
                if center.get(x, y) {
                    assert!(gt.region.get(x, y));
                    assert_eq!(gt.dist.get(x, y), 0.0);
                }
                let d = gt.dist.get(x, y);
                for (nx, ny) in [(x + 1, y), (x, y + 1)] {
                    if nx < w && ny < h {
                        let e = gt.dist.get(nx, ny);
                        if d < 8.0 && e < 8.0 {
                            assert!((d - e).abs() <= 1.0 + 1e-6);
                        }
                    }
                }
            }
        }
    }
}
