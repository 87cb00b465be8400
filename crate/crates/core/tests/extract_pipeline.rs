use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roadtopo::annotation::{build_ground_truth, rasterize};
use roadtopo::extract::{extract_graph, skeleton_to_graph, thin, threshold, ExtractConfig};
use roadtopo::graph::GeoGraph;
use roadtopo::grid::{distance_transform, BinaryMask, Extent};
use roadtopo::metrics::ccq;
use roadtopo::synth::{lattice_graph, random_road_grid};

const MIN_QUALITY: f64 = 0.95;

fn recovered_quality(g: &GeoGraph, w: usize, h: usize) -> f64 {
    let gt = build_ground_truth(g, w, h, 5, 20.0).unwrap();
    let out = extract_graph(&gt.dist, &ExtractConfig::default()).unwrap();
    ccq(&out, g, w, h, 5.0).unwrap().quality
}

#[test]
fn lattice_graphs_are_recovered_from_their_distance_maps() {
    for seed in 0..15 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (nx, ny) = (rng.random_range(2..5), rng.random_range(2..5));
        let g = lattice_graph(&mut rng, nx, ny, 48.0, 24.0, 0.8);
        if g.edge_count() == 0 {
            continue;
        }
        let (w, h) = (48 * nx, 48 * ny);
        let q = recovered_quality(&g, w, h);
        assert!(q >= MIN_QUALITY, "seed {seed}: quality {q}");
    }
}

#[test]
fn road_grids_are_recovered_from_their_distance_maps() {
    for seed in 0..15 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let (w, h) = (rng.random_range(64..200), rng.random_range(64..200));
        let g = random_road_grid(&mut rng, w, h);
        let q = recovered_quality(&g, w, h);
        assert!(q >= MIN_QUALITY, "seed {seed}: quality {q}");
    }
}

#[test]
fn skeleton_graph_covers_every_skeleton_pixel() {
    for seed in 0..40 {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
        let g = lattice_graph(&mut rng, 3, 3, 40.0, 20.0, 0.7);
        let (w, h) = (120, 120);
        let gt = build_ground_truth(&g, w, h, 5, 20.0).unwrap();
        let skel = thin(&threshold(&gt.dist, 4.0));
        let drawn = rasterize(&skeleton_to_graph(&skel), w, h).unwrap();
        let near = distance_transform(&drawn);
        for (x, y) in skel.true_pixels() {
            assert!(near.get(x, y) <= 1.0, "seed {seed}: ({x}, {y}) at {}", near.get(x, y));
        }
    }
}

fn mask_strategy() -> impl Strategy<Value = BinaryMask> {
    (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
        prop::collection::vec(prop::bool::weighted(0.55), w * h)
            .prop_map(move |bits| BinaryMask::new(w, h, bits).unwrap())
    })
}

proptest! {
    #[test]
    fn thin_is_idempotent(m in mask_strategy()) {
        let once = thin(&m);
        prop_assert_eq!(thin(&once), once);
    }

    #[test]
    fn thin_only_removes_pixels(m in mask_strategy()) {
        let t = thin(&m);
        prop_assert!(t.true_pixels().all(|(x, y)| m.get(x, y)));
        prop_assert_eq!((t.width(), t.height()), (m.width(), m.height()));
    }
}
