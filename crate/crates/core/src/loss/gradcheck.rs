use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotation::GroundTruth;
use crate::error::{Error, Result};
use crate::grid::{Extent, ScalarGrid};

use super::{total_loss, window_loss, LossConfig};

/// Outcome of a finite-difference gradient check.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    /// Pixels actually compared.
    pub checked: usize,
    /// `(x, y, analytic, numeric)` of the worst pixel.
    pub worst: Option<(usize, usize, f64, f64)>,
}

/// Relative error with a floor on the denominator, so that gradients that
/// are zero up to round-off do not blow up the ratio.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-3)
}

/// Compare the analytic gradient against central differences at `samples`
/// random pixels. A pixel is only used when its value is more than
/// `10 * eps` away from every other value in its window, so the Kruskal
/// ordering (and with it the pair weights) stays fixed across the probe.
pub fn grad_check(
    pred: &ScalarGrid,
    gt: &GroundTruth,
    cfg: &LossConfig,
    eps: f32,
    samples: usize,
    seed: u64,
) -> Result<GradCheckReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    let analytic = total_loss(pred, gt, cfg)?.grad;
    let (w, h) = pred.extent();
    let windows = cfg.windows(w, h);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GradCheckReport {
        max_rel_err: 0.0,
        checked: 0,
        worst: None,
    };
    if w * h == 0 {
        return Ok(report);
    }
    let attempts = samples.saturating_mul(200).max(1000);
    let mut probe = pred.clone();
    for _ in 0..attempts {
        if report.checked == samples {
            break;
        }
        let (x, y) = (rng.random_range(0..w), rng.random_range(0..h));
        let win = windows
            .iter()
            .find(|win| win.contains(x, y))
            .expect("windows cover the grid");
        let value = pred.get(x, y);
        let separated = (win.y0..win.y0 + win.h).all(|yy| {
            (win.x0..win.x0 + win.w)
                .all(|xx| (xx, yy) == (x, y) || (pred.get(xx, yy) - value).abs() > 10.0 * eps)
        });
        if !separated {
            continue;
        }
        let up = value + eps;
        let down = value - eps;
        probe.set(x, y, up);
        let l_up = window_loss(&probe, gt, cfg, win)?;
        probe.set(x, y, down);
        let l_down = window_loss(&probe, gt, cfg, win)?;
        probe.set(x, y, value);

        let numeric = (l_up - l_down) / (f64::from(up) - f64::from(down));
        let a = f64::from(analytic.get(x, y));
        let err = relative_error(a, numeric);
        report.checked += 1;
        if report.worst.is_none() || err > report.max_rel_err {
            report.max_rel_err = err;
            report.worst = Some((x, y, a, numeric));
        }
    }
    Ok(report)
}
