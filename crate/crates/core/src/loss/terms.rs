use crate::error::Result;
use crate::grid::{ensure_same_extent, Extent, ScalarGrid};

use super::pairs::PairWeights;

fn grid_from(like: &ScalarGrid, data: Vec<f32>) -> ScalarGrid {
    ScalarGrid::new(like.width(), like.height(), data).expect("extent preserved")
}

/// Squared error against the capped ground-truth distance map.
pub fn loss_mse(pred: &ScalarGrid, gt_dist: &ScalarGrid) -> Result<(f64, ScalarGrid)> {
    ensure_same_extent(pred, gt_dist)?;
    let mut value = 0.0f64;
    let grad = pred
        .data()
        .iter()
        .zip(gt_dist.data())
        .map(|(&p, &t)| {
            let d = f64::from(p) - f64::from(t);
            value += d * d;
            (2.0 * d) as f32
        })
        .collect();
    Ok((value, grid_from(pred, grad)))
}

/// `sum_p w[p] * pred[p]^2`, with `w` held constant for the gradient.
pub fn loss_dis(pred: &ScalarGrid, weights: &PairWeights) -> Result<(f64, ScalarGrid)> {
    ensure_same_extent(pred, weights)?;
    let mut value = 0.0f64;
    let grad = pred
        .data()
        .iter()
        .zip(&weights.w)
        .map(|(&p, &w)| {
            if w == 0 {
                return 0.0;
            }
            let (p, w) = (f64::from(p), w as f64);
            value += w * p * p;
            (2.0 * w * p) as f32
        })
        .collect();
    Ok((value, grid_from(pred, grad)))
}

/// `sum_p v[p] * (pred[p] - gt[p])^2`, with `v` held constant for the gradient.
pub fn loss_conn(
    pred: &ScalarGrid,
    gt_dist: &ScalarGrid,
    weights: &PairWeights,
) -> Result<(f64, ScalarGrid)> {
    ensure_same_extent(pred, gt_dist)?;
    ensure_same_extent(pred, weights)?;
    let mut value = 0.0f64;
    let grad = pred
        .data()
        .iter()
        .zip(gt_dist.data())
        .zip(&weights.v)
        .map(|((&p, &t), &v)| {
            if v == 0 {
                return 0.0;
            }
            let (d, v) = (f64::from(p) - f64::from(t), v as f64);
            value += v * d * d;
            (2.0 * v * d) as f32
        })
        .collect();
    Ok((value, grid_from(pred, grad)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{connected_components, BinaryMask, Connectivity};
    use crate::loss::compute_pair_weights;

    fn row(v: &[f32]) -> ScalarGrid {
        ScalarGrid::new(v.len(), 1, v.to_vec()).unwrap()
    }

    fn fixture_weights(pred: &ScalarGrid) -> PairWeights {
        let region = BinaryMask::new(5, 1, vec![false, false, true, false, false]).unwrap();
        let labels = connected_components(&region.not(), Connectivity::Four);
        compute_pair_weights(pred, &labels, &region).unwrap()
    }

    #[test]
    fn mse_examples() {
        let g = row(&[1.0, 2.0, 3.0]);
        let (v, grad) = loss_mse(&g, &g).unwrap();
        assert_eq!(v, 0.0);
        assert!(grad.data().iter().all(|&d| d == 0.0));

        let (v, grad) = loss_mse(&row(&[1.0, 2.0]), &row(&[0.0, 2.0])).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(grad.data(), &[2.0, 0.0]);

        // A capped target of 20 stands in for an uncapped distance of 35.
        let (v, _) = loss_mse(&row(&[35.0]), &row(&[20.0])).unwrap();
        assert_eq!(v, 225.0);

        assert!(loss_mse(&row(&[1.0]), &row(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn dis_fixture() {
        let pred = row(&[5.0, 5.0, 3.0, 5.0, 5.0]);
        let pw = fixture_weights(&pred);
        let (v, grad) = loss_dis(&pred, &pw).unwrap();
        assert_eq!(v, 36.0);
        assert_eq!(grad.data(), &[0.0, 0.0, 24.0, 0.0, 0.0]);
    }

    #[test]
    fn dis_vanishes_on_zero_bottlenecks_or_zero_weights() {
        let pred = row(&[5.0, 5.0, 0.0, 5.0, 5.0]);
        let pw = fixture_weights(&pred);
        assert_eq!(pw.w[2], 4);
        assert_eq!(loss_dis(&pred, &pw).unwrap().0, 0.0);

        let none = PairWeights::zeros(5, 1);
        let (v, g) = loss_dis(&row(&[1.0, 2.0, 3.0, 4.0, 5.0]), &none).unwrap();
        assert_eq!(v, 0.0);
        assert!(g.data().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn dis_is_monotone_in_gap_value() {
        let at = |gap: f32| {
            let pred = row(&[5.0, 5.0, gap, 5.0, 5.0]);
            let pw = fixture_weights(&pred);
            assert_eq!(pw.w[2], 4);
            loss_dis(&pred, &pw).unwrap().0
        };
        let base = at(3.0);
        for up in [3.001, 3.5, 4.0, 4.999] {
            assert!(at(up) > base);
        }
        for down in [0.0, 1.0, 2.999] {
            assert!(at(down) < base);
        }
    }

    #[test]
    fn conn_examples() {
        let mut pw = PairWeights::zeros(2, 1);
        pw.v[0] = 1;
        let (v, grad) = loss_conn(&row(&[4.0, 7.0]), &row(&[5.0, 1.0]), &pw).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(grad.data(), &[-2.0, 0.0]);

        let g = row(&[4.0, 7.0]);
        assert_eq!(loss_conn(&g, &g, &pw).unwrap().0, 0.0);
        let (v, _) = loss_conn(&row(&[4.0, 7.0]), &row(&[0.0, 0.0]), &PairWeights::zeros(2, 1)).unwrap();
        assert_eq!(v, 0.0);
    }
}
