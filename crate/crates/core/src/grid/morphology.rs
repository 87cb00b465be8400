use super::{squared_distance_transform, BinaryMask, Extent};

/// Dilate with a Euclidean disk: a pixel is set when some input pixel lies
/// within distance `radius` of it.
pub fn dilate(mask: &BinaryMask, radius: u32) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let (w, h) = mask.extent();
    let Some(sq) = squared_distance_transform(mask) else {
        return mask.clone();
    };
    let limit = f64::from(radius) * f64::from(radius);
    BinaryMask::new(w, h, sq.into_iter().map(|d| d <= limit).collect()).expect("extent preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn radius_zero_is_identity() {
        let m = BinaryMask::from_fn(11, 11, |x, y| (x, y) == (5, 5));
        assert_eq!(dilate(&m, 0), m);
    }

    #[test]
    fn radius_one_is_a_plus() {
        let m = BinaryMask::from_fn(11, 11, |x, y| (x, y) == (5, 5));
        let d = dilate(&m, 1);
        assert_eq!(d.count(), 5);
        for p in [(5, 5), (4, 5), (6, 5), (5, 4), (5, 6)] {
            assert!(d.get(p.0, p.1));
        }
    }

    #[test]
    fn line_band_has_rounded_ends() {
        let m = BinaryMask::from_fn(40, 30, |x, y| y == 15 && (10..30).contains(&x));
        let d = dilate(&m, 5);
        for y in 0..30 {
            for x in 0..40 {
                let dx = if x < 10 { 10 - x as i64 } else if x >= 30 { x as i64 - 29 } else { 0 };
                let dy = y as i64 - 15;
                assert_eq!(d.get(x, y), dx * dx + dy * dy <= 25, "pixel {x},{y}");
            }
        }
        // 11 px thick in the middle, thinner past the ends.
        assert_eq!((0..30).filter(|&y| d.get(20, y)).count(), 11);
        assert_eq!((0..30).filter(|&y| d.get(33, y)).count(), 7);
    }

    #[test]
    fn huge_radius_fills() {
        let m = BinaryMask::from_fn(9, 4, |x, y| (x, y) == (0, 0));
        assert_eq!(dilate(&m, 100).count(), 36);
        assert_eq!(dilate(&BinaryMask::empty(3, 3), 100).count(), 0);
    }

    proptest! {
        #[test]
        fn dilation_is_monotone(
            r1 in 0u32..4, r2 in 0u32..4,
            bits in proptest::collection::vec(prop::bool::weighted(0.1), 144),
        ) {
            let m = BinaryMask::new(12, 12, bits).unwrap();
            let twice = dilate(&dilate(&m, r1), r2);
            let once = dilate(&m, r1.max(r2));
            for (a, b) in twice.data().iter().zip(once.data()) {
                prop_assert!(*a || !*b);
            }
        }
    }
}
