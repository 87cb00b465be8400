use serde::Serialize;

use crate::annotation::rasterize;
use crate::error::Result;
use crate::graph::GeoGraph;
use crate::grid::{distance_transform, BinaryMask};

/// Correctness, completeness and quality of a pixel-level comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ccq {
    pub correctness: f64,
    pub completeness: f64,
    pub quality: f64,
}

fn matched(a: &BinaryMask, b: &BinaryMask, buffer: f64) -> usize {
    let d = distance_transform(b);
    a.true_pixels()
        .filter(|&(x, y)| f64::from(d.get(x, y)) <= buffer)
        .count()
}

/// CCQ on two centerline masks of equal extent.
pub fn ccq_masks(pred: &BinaryMask, gt: &BinaryMask, buffer: f64) -> Ccq {
    let (np, ng) = (pred.count(), gt.count());
    if np == 0 || ng == 0 {
        let v = if np == ng { 1.0 } else { 0.0 };
        return Ccq { correctness: v, completeness: v, quality: v };
    }
    let tp = matched(pred, gt, buffer);
    let tg = matched(gt, pred, buffer);
    let (fp, fn_) = (np - tp, ng - tg);
    Ccq {
        correctness: tp as f64 / np as f64,
        completeness: tg as f64 / ng as f64,
        quality: tp as f64 / (tp + fp + fn_) as f64,
    }
}

/// Rasterize both graphs on a `width` × `height` grid and compare them.
pub fn ccq(pred: &GeoGraph, gt: &GeoGraph, width: usize, height: usize, buffer: f64) -> Result<Ccq> {
    Ok(ccq_masks(&rasterize(pred, width, height)?, &rasterize(gt, width, height)?, buffer))
}
