//! Connectivity scores comparing a predicted road graph with ground truth:
//! APLS and TLTS (shortest-path similarity), JCT (junctions), holes and
//! marbles (local reachability) and CCQ (pixel co-occurrence).
//!
//! Sampling is seeded and every sample draws from its own ChaCha stream,
//! so results do not depend on the number of worker threads.

mod apls;
mod ccq;
mod hm;
mod jct;
mod network;

pub use apls::{apls, apls_contribution, apls_directional, tlts};
pub use ccq::{ccq, ccq_masks, Ccq};
pub use hm::{hm_sample, holes_marbles, HmCounts, HmScore};
pub use jct::{jct, JunctionScore};
pub use network::shortest_path_length;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::GeoGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricConfig {
    pub seed: u64,
    pub samples: usize,
    /// CCQ co-occurrence distance in pixels.
    pub buffer: f64,
    pub snap_radius: f64,
    pub rel_tol: f64,
    /// Marker spacing for holes and marbles.
    pub hm_radius: f64,
    /// Markers per path; the travel budget is `hm_steps * hm_radius`.
    pub hm_steps: usize,
    /// Spacing of the extra sample points injected along long edges.
    pub control_spacing: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 500,
            buffer: 5.0,
            snap_radius: 15.0,
            rel_tol: 0.05,
            hm_radius: 15.0,
            hm_steps: 8,
            control_spacing: 50.0,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if !(positive(self.buffer) && positive(self.snap_radius) && positive(self.hm_radius)) {
            return Err(Error::Config("buffer, snap radius and marker radius must be positive".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Config(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        if self.hm_steps == 0 || !positive(self.control_spacing) {
            return Err(Error::Config("marker steps and control spacing must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub apls: f64,
    pub tlts: f64,
    pub jct_recall: f64,
    pub jct_precision: f64,
    pub jct_f1: f64,
    pub hm_precision: f64,
    pub hm_recall: f64,
    pub hm_f1: f64,
    pub ccq_correctness: f64,
    pub ccq_completeness: f64,
    pub ccq_quality: f64,
}

impl MetricReport {
    /// `key=value` lines in field order.
    pub fn to_text(&self) -> String {
        let fields = [
            ("apls", self.apls),
            ("tlts", self.tlts),
            ("jct_recall", self.jct_recall),
            ("jct_precision", self.jct_precision),
            ("jct_f1", self.jct_f1),
            ("hm_precision", self.hm_precision),
            ("hm_recall", self.hm_recall),
            ("hm_f1", self.hm_f1),
            ("ccq_correctness", self.ccq_correctness),
            ("ccq_completeness", self.ccq_completeness),
            ("ccq_quality", self.ccq_quality),
        ];
        fields.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// All five scores. Graphs are rasterized on a `width` × `height` grid for CCQ.
pub fn evaluate(pred: &GeoGraph, gt: &GeoGraph, width: usize, height: usize, cfg: &MetricConfig) -> Result<MetricReport> {
    cfg.validate()?;
    let c = ccq(pred, gt, width, height, cfg.buffer)?;
    let (p, g) = (network::Network::new(pred), network::Network::new(gt));
    let j = jct(pred, gt, cfg);
    let h = hm::hm_from(&p, &g, cfg);
    Ok(MetricReport {
        apls: apls::apls_from(&p, &g, cfg),
        tlts: apls::tlts_from(&p, &g, cfg),
        jct_recall: j.recall,
        jct_precision: j.precision,
        jct_f1: j.f1,
        hm_precision: h.precision,
        hm_recall: h.recall,
        hm_f1: h.f1,
        ccq_correctness: c.correctness,
        ccq_completeness: c.completeness,
        ccq_quality: c.quality,
    })
}
