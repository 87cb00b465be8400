//! Graph extraction from a predicted distance map: threshold, thin,
//! trace the skeleton into a graph, prune short spurs.

mod prune;
mod skeleton;
mod thin;

pub use prune::prune;
pub use skeleton::skeleton_to_graph;
pub use thin::thin;

use crate::error::{Error, Result};
use crate::graph::GeoGraph;
use crate::grid::{BinaryMask, Extent, ScalarGrid};

pub const DEFAULT_TAU: f32 = 4.0;
pub const DEFAULT_MIN_SPUR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractConfig {
    pub tau: f32,
    pub min_spur: f64,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            min_spur: DEFAULT_MIN_SPUR,
        }
    }
}

/// Pixels whose predicted distance is strictly below `tau`.
pub fn threshold(dist: &ScalarGrid, tau: f32) -> BinaryMask {
    BinaryMask::from_fn(dist.width(), dist.height(), |x, y| dist.get(x, y) < tau)
}

pub fn extract_graph(dist: &ScalarGrid, cfg: &ExtractConfig) -> Result<GeoGraph> {
    if !cfg.tau.is_finite() || cfg.min_spur.is_nan() || cfg.min_spur < 0.0 {
        return Err(Error::Config(format!("bad extraction settings {cfg:?}")));
    }
    if let Some((x, y)) = dist.find_non_finite() {
        return Err(Error::NonFinite { x, y });
    }
    let skel = thin(&threshold(dist, cfg.tau));
    Ok(prune(&skeleton_to_graph(&skel), cfg.min_spur))
}
