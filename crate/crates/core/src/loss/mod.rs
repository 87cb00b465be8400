//! Connectivity-oriented loss for distance-map regression.
//!
//! The total loss is
//!
//! ```text
//! L = mse + alpha * (dis + beta * conn)
//! mse  = sum_p (pred[p] - gt[p])^2
//! dis  = sum_p w[p] * pred[p]^2
//! conn = sum_p v[p] * (pred[p] - gt[p])^2
//! ```
//!
//! where `w` and `v` come from the Kruskal sweep in [`pairs`]. In windowed
//! mode the pair weights are computed independently per tile, with
//! background components relabeled inside each tile, and pasted into one
//! full-extent weight grid. Tiles are disjoint so every pixel has exactly
//! one weight.

mod gradcheck;
pub mod oracle;
mod pairs;
mod terms;

pub use gradcheck::{grad_check, GradCheckReport};
pub use pairs::{compute_pair_weights, compute_pair_weights_with, pair_totals, PairSearch, PairWeights};
pub use terms::{loss_conn, loss_dis, loss_mse};

use rayon::prelude::*;

use crate::annotation::GroundTruth;
use crate::error::{Error, Result};
use crate::grid::{
    connected_components, ensure_same_extent, tile, Connectivity, Crop, Extent, ScalarGrid,
    WindowSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossMode {
    #[default]
    Windowed,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub alpha: f64,
    pub beta: f64,
    pub window: usize,
    pub mode: LossMode,
    pub search: PairSearch,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            alpha: 1e-4,
            beta: 0.1,
            window: 64,
            mode: LossMode::Windowed,
            search: PairSearch::Unconstrained,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!("beta must be >= 0, got {}", self.beta)));
        }
        if self.window < 2 {
            return Err(Error::Config(format!("window must be >= 2, got {}", self.window)));
        }
        Ok(())
    }

    /// Windows the topology terms are evaluated on.
    pub fn windows(&self, width: usize, height: usize) -> Vec<WindowSpec> {
        match self.mode {
            LossMode::Windowed => tile(width, height, self.window),
            LossMode::Global => vec![WindowSpec::full(width, height)],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossBreakdown {
    pub mse: f64,
    pub dis: f64,
    pub conn: f64,
    pub total: f64,
    pub grad: ScalarGrid,
}

fn check_inputs(pred: &ScalarGrid, gt: &GroundTruth, cfg: &LossConfig) -> Result<()> {
    cfg.validate()?;
    ensure_same_extent(pred, &gt.dist)?;
    ensure_same_extent(pred, &gt.region)?;
    if let Some((x, y)) = pred.find_non_finite() {
        return Err(Error::NonFinite { x, y });
    }
    Ok(())
}

/// Pair weights of one window, in window-local coordinates.
pub fn window_pair_weights(
    pred: &ScalarGrid,
    gt: &GroundTruth,
    win: &WindowSpec,
    search: PairSearch,
) -> Result<PairWeights> {
    let local_pred = pred.crop(win)?;
    let local_region = gt.region.crop(win)?;
    let labels = connected_components(&local_region.not(), Connectivity::Four);
    compute_pair_weights_with(&local_pred, &labels, &local_region, search)
}

/// Full-extent pair weights for the configured mode. Windows are processed
/// on the current rayon pool; the result does not depend on its size.
pub fn pair_weights(pred: &ScalarGrid, gt: &GroundTruth, cfg: &LossConfig) -> Result<PairWeights> {
    check_inputs(pred, gt, cfg)?;
    let (w, h) = pred.extent();
    if cfg.mode == LossMode::Global {
        return compute_pair_weights_with(pred, &gt.labels, &gt.region, cfg.search);
    }
    let windows = cfg.windows(w, h);
    let locals = windows
        .par_iter()
        .map(|win| window_pair_weights(pred, gt, win, cfg.search))
        .collect::<Result<Vec<_>>>()?;
    let mut full = PairWeights::zeros(w, h);
    for (win, local) in windows.iter().zip(&locals) {
        full.paste(local, win.x0, win.y0);
    }
    Ok(full)
}

/// Loss terms and combined gradient given precomputed weights.
pub fn combine(
    pred: &ScalarGrid,
    gt_dist: &ScalarGrid,
    weights: &PairWeights,
    cfg: &LossConfig,
) -> Result<LossBreakdown> {
    ensure_same_extent(pred, gt_dist)?;
    ensure_same_extent(pred, weights)?;
    let (mut mse, mut dis, mut conn) = (0.0f64, 0.0f64, 0.0f64);
    let mut grad = Vec::with_capacity(pred.len());
    for i in 0..pred.len() {
        let p = f64::from(pred.data()[i]);
        let d = p - f64::from(gt_dist.data()[i]);
        let (w, v) = (weights.w[i] as f64, weights.v[i] as f64);
        mse += d * d;
        dis += w * p * p;
        conn += v * d * d;
        let g = 2.0 * d + cfg.alpha * (2.0 * w * p + cfg.beta * 2.0 * v * d);
        grad.push(g as f32);
    }
    let total = mse + cfg.alpha * (dis + cfg.beta * conn);
    Ok(LossBreakdown {
        mse,
        dis,
        conn,
        total,
        grad: ScalarGrid::new(pred.width(), pred.height(), grad)?,
    })
}

/// Regression plus topology loss with its gradient.
pub fn total_loss(pred: &ScalarGrid, gt: &GroundTruth, cfg: &LossConfig) -> Result<LossBreakdown> {
    let weights = pair_weights(pred, gt, cfg)?;
    combine(pred, &gt.dist, &weights, cfg)
}

/// Loss restricted to one window: the regression term over the window's
/// pixels plus the window's topology terms. A change to a single pixel
/// changes `total_loss` by exactly the change of the loss of its window.
pub fn window_loss(
    pred: &ScalarGrid,
    gt: &GroundTruth,
    cfg: &LossConfig,
    win: &WindowSpec,
) -> Result<f64> {
    check_inputs(pred, gt, cfg)?;
    let weights = match cfg.mode {
        LossMode::Windowed => window_pair_weights(pred, gt, win, cfg.search)?,
        LossMode::Global => {
            compute_pair_weights_with(pred, &gt.labels, &gt.region, cfg.search)?.crop_to(win)
        }
    };
    let local = combine(&pred.crop(win)?, &gt.dist.crop(win)?, &weights, cfg)?;
    Ok(local.total)
}

impl PairWeights {
    fn crop_to(&self, win: &WindowSpec) -> PairWeights {
        let mut out = PairWeights::zeros(win.w, win.h);
        for y in 0..win.h {
            for x in 0..win.w {
                let src = (win.y0 + y) * self.width() + win.x0 + x;
                out.w[y * win.w + x] = self.w[src];
                out.v[y * win.w + x] = self.v[src];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::build_ground_truth;
    use crate::graph::parse_graph;

    fn road_gt() -> GroundTruth {
        let g = parse_graph("N 0 0 12\nN 1 39 20\nN 2 20 0\nN 3 24 29\nE 0 1\nE 2 3").unwrap();
        build_ground_truth(&g, 40, 30, 3, 20.0).unwrap()
    }

    fn configs() -> Vec<LossConfig> {
        let mut out = Vec::new();
        for mode in [LossMode::Windowed, LossMode::Global] {
            for window in [8, 16, 64] {
                for search in [PairSearch::Unconstrained, PairSearch::Constrained] {
                    out.push(LossConfig { alpha: 0.5, beta: 2.0, window, mode, search });
                }
            }
        }
        out
    }

    #[test]
    fn zero_at_ground_truth() {
        let gt = road_gt();
        for cfg in configs() {
            let b = total_loss(&gt.dist, &gt, &cfg).unwrap();
            assert_eq!((b.mse, b.dis, b.conn, b.total), (0.0, 0.0, 0.0, 0.0), "{cfg:?}");
            assert!(b.grad.data().iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn total_is_the_weighted_sum() {
        let gt = road_gt();
        let pred = gt.dist.map(|d| (d * 0.7 + 1.3).sin() * 6.0 + d);
        for cfg in configs() {
            let b = total_loss(&pred, &gt, &cfg).unwrap();
            let expect = b.mse + cfg.alpha * (b.dis + cfg.beta * b.conn);
            assert!((b.total - expect).abs() <= 1e-12 * expect.abs());
            assert!(b.grad.data().iter().all(|g| g.is_finite()));
        }
    }

    #[test]
    fn terms_agree_with_standalone_functions() {
        let gt = road_gt();
        let pred = gt.dist.map(|d| (d * 1.7).cos() * 3.0 + d);
        let cfg = LossConfig { mode: LossMode::Global, ..LossConfig::default() };
        let pw = pair_weights(&pred, &gt, &cfg).unwrap();
        let b = combine(&pred, &gt.dist, &pw, &cfg).unwrap();
        assert_eq!(b.mse, loss_mse(&pred, &gt.dist).unwrap().0);
        assert_eq!(b.dis, loss_dis(&pred, &pw).unwrap().0);
        assert_eq!(b.conn, loss_conn(&pred, &gt.dist, &pw).unwrap().0);
    }

    #[test]
    fn window_and_global_agree_on_single_window() {
        let gt = road_gt();
        let pred = gt.dist.map(|d| 10.0 - d);
        let a = total_loss(&pred, &gt, &LossConfig { window: 64, ..LossConfig::default() }).unwrap();
        let b = total_loss(&pred, &gt, &LossConfig { mode: LossMode::Global, ..LossConfig::default() }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gradient_support() {
        let gt = road_gt();
        let mut pred = gt.dist.clone();
        pred.set(3, 4, pred.get(3, 4) + 2.0);
        let cfg = LossConfig::default();
        let pw = pair_weights(&pred, &gt, &cfg).unwrap();
        let b = total_loss(&pred, &gt, &cfg).unwrap();
        for i in 0..pred.len() {
            if pw.w[i] == 0 && pw.v[i] == 0 && pred.data()[i] == gt.dist.data()[i] {
                assert_eq!(b.grad.data()[i], 0.0);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let gt = road_gt();
        let mut pred = gt.dist.clone();
        pred.set(5, 6, f32::NAN);
        assert_eq!(
            total_loss(&pred, &gt, &LossConfig::default()),
            Err(Error::NonFinite { x: 5, y: 6 })
        );
        let small = ScalarGrid::zeros(4, 4);
        assert!(matches!(
            total_loss(&small, &gt, &LossConfig::default()),
            Err(Error::ExtentMismatch { .. })
        ));
        let bad = LossConfig { window: 1, ..LossConfig::default() };
        assert!(total_loss(&gt.dist, &gt, &bad).is_err());
    }

    #[test]
    fn window_loss_tracks_total_loss_differences() {
        let gt = road_gt();
        let pred = gt.dist.map(|d| (d * 2.1).sin() * 4.0 + d);
        for cfg in configs() {
            let base = total_loss(&pred, &gt, &cfg).unwrap().total;
            let mut bumped = pred.clone();
            bumped.set(17, 11, pred.get(17, 11) + 0.25);
            let moved = total_loss(&bumped, &gt, &cfg).unwrap().total;
            let win = *cfg
                .windows(40, 30)
                .iter()
                .find(|w| w.contains(17, 11))
                .unwrap();
            let local = window_loss(&bumped, &gt, &cfg, &win).unwrap()
                - window_loss(&pred, &gt, &cfg, &win).unwrap();
            assert!((moved - base - local).abs() <= 1e-9 * base.abs().max(1.0), "{cfg:?}");
        }
    }
}
