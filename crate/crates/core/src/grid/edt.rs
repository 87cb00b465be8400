//! Exact Euclidean distance transform (Felzenszwalb & Huttenlocher).
//!
//! Squared distances are computed in two separable passes of the lower
//! envelope of parabolas. All intermediate values are integers held in
//! `f64`, so the result is exact.

use super::{BinaryMask, Extent, ScalarGrid};

/// Squared distance of each pixel to the nearest true pixel, or `None` for
/// every pixel when the mask has no true pixel.
pub fn squared_distance_transform(mask: &BinaryMask) -> Option<Vec<f64>> {
    let (w, h) = mask.extent();
    if !mask.data().iter().any(|&b| b) {
        return None;
    }
    let mut grid: Vec<f64> = mask
        .data()
        .iter()
        .map(|&b| if b { 0.0 } else { f64::INFINITY })
        .collect();

    let mut scratch = Envelope::with_capacity(w.max(h));
    let mut column = vec![0.0; h];
    let mut out = vec![0.0; w.max(h)];

    for x in 0..w {
        for y in 0..h {
            column[y] = grid[y * w + x];
        }
        scratch.transform(&column, &mut out[..h]);
        for y in 0..h {
            grid[y * w + x] = out[y];
        }
    }
    let mut row = vec![0.0; w];
    for y in 0..h {
        row.copy_from_slice(&grid[y * w..(y + 1) * w]);
        scratch.transform(&row, &mut grid[y * w..(y + 1) * w]);
    }
    Some(grid)
}

/// Euclidean distance to the nearest true pixel. An all-false mask yields
/// `width + height` everywhere.
pub fn distance_transform(mask: &BinaryMask) -> ScalarGrid {
    let (w, h) = mask.extent();
    match squared_distance_transform(mask) {
        Some(sq) => {
            ScalarGrid::new(w, h, sq.into_iter().map(|d| d.sqrt() as f32).collect())
                .expect("extent preserved")
        }
        None => ScalarGrid::filled(w, h, (w + h) as f32),
    }
}

struct Envelope {
    sites: Vec<usize>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self {
            sites: Vec::with_capacity(n),
            bounds: Vec::with_capacity(n + 1),
        }
    }

    // 1-D pass: out[q] = min_p f[p] + (q - p)^2, skipping infinite sites.
    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        self.sites.clear();
        self.bounds.clear();
        for (q, &fq) in f.iter().enumerate() {
            if !fq.is_finite() {
                continue;
            }
            loop {
                let Some(&p) = self.sites.last() else {
                    self.sites.push(q);
                    self.bounds.push(f64::NEG_INFINITY);
                    break;
                };
                let s = intersection(f, p, q);
                if s <= *self.bounds.last().unwrap() {
                    self.sites.pop();
                    self.bounds.pop();
                } else {
                    self.sites.push(q);
                    self.bounds.push(s);
                    break;
                }
            }
        }
        if self.sites.is_empty() {
            out.fill(f64::INFINITY);
            return;
        }
        let mut k = 0;
        for (q, o) in out.iter_mut().enumerate() {
            let qf = q as f64;
            while k + 1 < self.sites.len() && self.bounds[k + 1] < qf {
                k += 1;
            }
            let p = self.sites[k];
            let d = qf - p as f64;
            *o = f[p] + d * d;
        }
    }
}

fn intersection(f: &[f64], p: usize, q: usize) -> f64 {
    let (pf, qf) = (p as f64, q as f64);
    ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(mask: &BinaryMask) -> ScalarGrid {
        let (w, h) = mask.extent();
        let on: Vec<_> = mask.true_pixels().collect();
        let mut out = ScalarGrid::zeros(w, h);
        for y in 0..h {
            for x in 0..w {
                let best = on
                    .iter()
                    .map(|&(px, py)| {
                        let dx = px as f64 - x as f64;
                        let dy = py as f64 - y as f64;
                        dx * dx + dy * dy
                    })
                    .fold(f64::INFINITY, f64::min);
                out.set(x, y, if best.is_finite() { best.sqrt() as f32 } else { (w + h) as f32 });
            }
        }
        out
    }

    #[test]
    fn pythagorean_triple() {
        let m = BinaryMask::from_fn(6, 6, |x, y| x == 0 && y == 0);
        let d = distance_transform(&m);
        assert_eq!(d.get(3, 4), 5.0);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn two_corners() {
        let m = BinaryMask::from_fn(8, 8, |x, y| (x, y) == (0, 0) || (x, y) == (7, 7));
        let d = distance_transform(&m);
        assert_eq!(d.get(4, 4), (18.0f64).sqrt() as f32);
        assert!((d.get(4, 4) - 4.2426).abs() < 1e-4);
    }

    #[test]
    fn empty_mask_sentinel() {
        let d = distance_transform(&BinaryMask::empty(7, 5));
        assert!(d.data().iter().all(|&v| v == 12.0));
    }

    proptest! {
        #[test]
        fn equals_brute_force(
            w in 1usize..=16, h in 1usize..=16,
            bits in proptest::collection::vec(prop::bool::weighted(0.15), 256),
        ) {
            let m = BinaryMask::from_fn(w, h, |x, y| bits[y * 16 + x]);
            prop_assert_eq!(distance_transform(&m), brute(&m));
        }
    }
}
