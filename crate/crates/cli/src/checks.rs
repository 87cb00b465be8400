//! Self-checks shared by the `selftest` command and the acceptance suite.
//! Every check is deterministic and carries its tolerances as constants.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use roadtopo::annotation::{build_ground_truth, GroundTruth};
use roadtopo::extract::{extract_graph, ExtractConfig};
use roadtopo::graph::{parse_graph, GeoGraph};
use roadtopo::grid::{connected_components, BinaryMask, Connectivity, Extent, ScalarGrid, WindowSpec};
use roadtopo::io::{decode_grid, encode_grid};
use roadtopo::loss::oracle::enumerate_pairs_against;
use roadtopo::loss::{
    compute_pair_weights, grad_check, loss_conn, loss_dis, pair_weights, total_loss, LossConfig, LossMode,
    PairSearch,
};
use roadtopo::metrics::{apls_contribution, apls_directional, ccq, evaluate, MetricConfig};
use roadtopo::synth::{
    border_roads, gap_scenario, grid_of_roads, lattice_graph, noisy_prediction, pair_instance, random_road_grid,
};

pub const ORACLE_REL_TOL: f64 = 1e-9;
pub const GRAD_EPS: f32 = 1e-3;
pub const GRAD_MAX_REL_ERR: f64 = 1e-3;
pub const GRAD_PIXELS: usize = 50;
pub const METRIC_TOL: f64 = 1e-9;
pub const E2E_MIN_QUALITY: f64 = 0.95;
pub const PERF_SIDE: usize = 1024;
pub const PERF_BUDGET: Duration = Duration::from_secs(2);

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, failures: Vec<String>, ok: String) -> Self {
        match failures.first() {
            None => Check { name, passed: true, detail: ok },
            Some(first) => Check {
                name,
                passed: false,
                detail: format!("{} failure(s), first: {first}", failures.len()),
            },
        }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

/// Kruskal weights and pairwise loss sums against exhaustive enumeration
/// on `seeds` random small instances.
pub fn oracle_equivalence(seeds: u64) -> Check {
    let mut failures = Vec::new();
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = pair_instance(&mut rng);
        let (w, h) = inst.pred.extent();
        let gt = ScalarGrid::new(w, h, (0..w * h).map(|_| rng.random_range(0.0f32..20.0)).collect())
            .expect("extent");
        let fast = compute_pair_weights(&inst.pred, &inst.labels, &inst.region).expect("valid instance");
        let slow = enumerate_pairs_against(&inst.pred, Some(&gt), &inst.labels, &inst.region).expect("valid instance");
        if fast != slow.weights {
            failures.push(format!("seed {seed}: weight grids differ"));
            continue;
        }
        let dis = loss_dis(&inst.pred, &fast).expect("extent").0;
        let conn = loss_conn(&inst.pred, &gt, &fast).expect("extent").0;
        if rel(dis, slow.dis) > ORACLE_REL_TOL || rel(conn, slow.conn) > ORACLE_REL_TOL {
            failures.push(format!("seed {seed}: dis {dis} vs {}, conn {conn} vs {}", slow.dis, slow.conn));
        }
    }
    Check::new("oracle equivalence", failures, format!("{seeds} instances match exactly"))
}

/// The 1x5 row [5, 5, 3, 5, 5] with the middle pixel as road.
pub fn pair_fixture() -> Check {
    let pred = ScalarGrid::new(5, 1, vec![5.0, 5.0, 3.0, 5.0, 5.0]).expect("extent");
    let region = BinaryMask::from_fn(5, 1, |x, _| x == 2);
    let labels = connected_components(&region.not(), Connectivity::Four);
    let weights = compute_pair_weights(&pred, &labels, &region).expect("extent");
    let (dis, grad) = loss_dis(&pred, &weights).expect("extent");
    let got = (weights.w_at(2, 0), dis, grad.get(2, 0));
    let failures = if got == (4, 36.0, 24.0) {
        Vec::new()
    } else {
        vec![format!("w[2], L_dis, grad[2] = {got:?}, expected (4, 36, 24)")]
    };
    Check::new("1x5 fixture", failures, "w[2]=4 L_dis=36 grad[2]=24".into())
}

fn small_instance(seed: u64) -> (ScalarGrid, GroundTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let roads = rng.random_range(1..=3);
    let g = border_roads(&mut rng, 16, 16, roads);
    let gt = build_ground_truth(&g, 16, 16, 2, 20.0).expect("graph fits");
    let pred = noisy_prediction(&mut rng, &gt, 3.0);
    (pred, gt)
}

/// Central differences on `instances` random 16x16 problems, for the
/// default weights and for a strong topology weight.
pub fn gradient_check(instances: u64) -> Check {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for seed in 0..instances {
        let (pred, gt) = small_instance(seed);
        for alpha in [1e-4, 1e-2] {
            let cfg = LossConfig { alpha, ..LossConfig::default() };
            match grad_check(&pred, &gt, &cfg, GRAD_EPS, GRAD_PIXELS, seed) {
                Ok(r) if r.checked == GRAD_PIXELS && r.max_rel_err <= GRAD_MAX_REL_ERR => {
                    worst = worst.max(r.max_rel_err)
                }
                Ok(r) => failures.push(format!("seed {seed} alpha {alpha}: {r:?}")),
                Err(e) => failures.push(format!("seed {seed}: {e}")),
            }
        }
    }
    Check::new(
        "gradient check",
        failures,
        format!("{instances} instances x {GRAD_PIXELS} px, max relative error {worst:.3e}"),
    )
}

fn loss_configs() -> Vec<LossConfig> {
    let mut out = Vec::new();
    for search in [PairSearch::Unconstrained, PairSearch::Constrained] {
        for window in [16, 32, 64] {
            out.push(LossConfig { window, search, ..LossConfig::default() });
        }
        out.push(LossConfig { mode: LossMode::Global, search, ..LossConfig::default() });
    }
    out
}

/// Loss and gradient are exactly zero when the prediction is the capped
/// ground-truth distance map, on random road grids.
pub fn zero_at_ground_truth(graphs: u64) -> Check {
    let mut failures = Vec::new();
    for seed in 0..graphs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w, h) = (rng.random_range(48..200), rng.random_range(48..200));
        let g = random_road_grid(&mut rng, w, h);
        let gt = build_ground_truth(&g, w, h, 5, 20.0).expect("graph fits");
        for cfg in loss_configs() {
            let b = total_loss(&gt.dist, &gt, &cfg).expect("valid input");
            if b.total != 0.0 || b.grad.data().iter().any(|&v| v != 0.0) {
                failures.push(format!("seed {seed} {cfg:?}: total {}", b.total));
            }
        }
    }
    Check::new("zero at ground truth", failures, format!("{graphs} graphs x 8 settings"))
}

/// Every window weight stays below a quarter of the squared window area.
pub fn weight_bound(instances: u64) -> Check {
    let mut failures = Vec::new();
    let mut peak = 0.0f64;
    for seed in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w, h) = (rng.random_range(40..130), rng.random_range(40..130));
        let roads = rng.random_range(1..=4);
        let g = border_roads(&mut rng, w, h, roads);
        let gt = build_ground_truth(&g, w, h, rng.random_range(1..=5), 20.0).expect("graph fits");
        let pred = noisy_prediction(&mut rng, &gt, 8.0);
        for window in [8, 16, 32, 64] {
            for search in [PairSearch::Unconstrained, PairSearch::Constrained] {
                let cfg = LossConfig { window, search, ..LossConfig::default() };
                let pw = pair_weights(&pred, &gt, &cfg).expect("valid input");
                for win in cfg.windows(w, h) {
                    let n = win.area() as u64;
                    for y in win.y0..win.y0 + win.h {
                        for x in win.x0..win.x0 + win.w {
                            let wp = pw.w_at(x, y);
                            peak = peak.max(4.0 * wp as f64 / (n * n) as f64);
                            if 4 * wp > n * n {
                                failures.push(format!("seed {seed} window {win:?}: w={wp}"));
                            }
                        }
                    }
                }
            }
        }
    }
    Check::new("weight bound", failures, format!("max 4w/N^2 = {peak:.4}"))
}

/// A road with a three-pixel hole: the hole's window pays, nothing else
/// does, and zeroing the hole clears the penalty.
pub fn gap_closing() -> Check {
    let mut failures = Vec::new();
    let s = gap_scenario(128, 32, 40..43, 5, 20.0);
    let cfg = LossConfig::default();
    let weights = pair_weights(&s.pred, &s.gt, &cfg).expect("valid input");
    let (dis, grad) = loss_dis(&s.pred, &weights).expect("extent");
    let win = WindowSpec { x0: 0, y0: 0, w: 64, h: 64 };
    if dis <= 0.0 {
        failures.push(format!("L_dis = {dis}, expected > 0"));
    }
    let mut support = 0;
    for y in 0..128 {
        for x in 0..128 {
            if grad.get(x, y) != 0.0 {
                support += 1;
                if !win.contains(x, y) {
                    failures.push(format!("gradient outside the gap window at ({x}, {y})"));
                }
            }
        }
    }
    let mut fixed = s.pred.clone();
    for &(x, y) in &s.gap {
        fixed.set(x, y, 0.0);
    }
    let after = pair_weights(&fixed, &s.gt, &cfg).expect("valid input");
    let dis_after = loss_dis(&fixed, &after).expect("extent").0;
    if dis_after != 0.0 {
        failures.push(format!("L_dis after closing = {dis_after}"));
    }
    Check::new(
        "gap closing",
        failures,
        format!("L_dis {dis:.1} on {support} px inside the gap window, 0 after closing"),
    )
}

fn line(y: f64) -> GeoGraph {
    parse_graph(&format!("N 0 20 {y}\nN 1 180 {y}\nE 0 1")).expect("valid graph")
}

/// Self-comparison scores 1 on all five metrics; a line shifted by 6 px
/// has CCQ 0 at buffer 5.
pub fn metric_identities(graphs: u64) -> Check {
    let mut failures = Vec::new();
    for seed in 0..graphs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (nx, ny) = (rng.random_range(2..5), rng.random_range(2..5));
        let g = lattice_graph(&mut rng, nx, ny, 48.0, 20.0, 0.85);
        let cfg = MetricConfig { seed, samples: 200, ..MetricConfig::default() };
        let r = evaluate(&g, &g, 200, 200, &cfg).expect("valid graphs");
        for (k, v) in [("apls", r.apls), ("tlts", r.tlts), ("jct_f1", r.jct_f1), ("hm_f1", r.hm_f1), ("ccq", r.ccq_quality)] {
            if (v - 1.0).abs() > METRIC_TOL {
                failures.push(format!("seed {seed}: {k} = {v}"));
            }
        }
    }
    let far = ccq(&line(106.0), &line(100.0), 200, 200, 5.0).expect("valid graphs");
    if (far.correctness, far.completeness, far.quality) != (0.0, 0.0, 0.0) {
        failures.push(format!("6 px shift: {far:?}"));
    }
    let near = ccq(&line(103.0), &line(100.0), 200, 200, 5.0).expect("valid graphs");
    if (near.correctness, near.completeness) != (1.0, 1.0) {
        failures.push(format!("3 px shift: {near:?}"));
    }
    Check::new("metric identities", failures, format!("{graphs} graphs, shifted-line CCQ 0"))
}

/// One sampled pair whose prediction path is 110 px against 100 px.
pub fn apls_fixture() -> Check {
    let mut failures = Vec::new();
    let formula = apls_contribution(100.0, Some(110.0));
    if (formula - 0.9).abs() > METRIC_TOL {
        failures.push(format!("contribution {formula}"));
    }
    let gt = parse_graph("N 0 0 50\nN 1 100 50\nE 0 1").expect("valid graph");
    let bend = (55.0f64 * 55.0 - 50.0 * 50.0).sqrt();
    let mut pred = GeoGraph::new();
    pred.add_node(0, 0.0, 50.0).expect("fresh id");
    pred.add_node(1, 100.0, 50.0).expect("fresh id");
    pred.add_edge_via(0, 1, vec![(50.0, 50.0 + bend)]).expect("valid edge");
    let cfg = MetricConfig { samples: 1, control_spacing: 1000.0, ..MetricConfig::default() };
    let score = apls_directional(&gt, &pred, &cfg);
    if (score - 0.9).abs() > METRIC_TOL {
        failures.push(format!("single-pair score {score}"));
    }
    Check::new("apls fixture", failures, format!("contribution {formula}, sampled {score:.12}"))
}

fn pipeline(g: &GeoGraph, w: usize, h: usize) -> Result<(f64, f64), String> {
    let gt = build_ground_truth(g, w, h, 5, 20.0).map_err(|e| e.to_string())?;
    let pred = decode_grid(&encode_grid(&gt.dist)).map_err(|e| e.to_string())?;
    let loss = total_loss(&pred, &gt, &LossConfig::default()).map_err(|e| e.to_string())?;
    let out = extract_graph(&pred, &ExtractConfig::default()).map_err(|e| e.to_string())?;
    let back = parse_graph(&out.to_text()).map_err(|e| e.to_string())?;
    let r = evaluate(&back, g, w, h, &MetricConfig { seed: 17, ..MetricConfig::default() }).map_err(|e| e.to_string())?;
    Ok((loss.total, r.ccq_quality))
}

/// Ground truth, loss, extraction and evaluation on 256x256 road grids
/// with the prediction equal to the ground-truth distance map.
pub fn end_to_end() -> Check {
    let mut failures = Vec::new();
    let mut graphs = vec![grid_of_roads(256, 256, &[40, 128, 210], &[64, 190])];
    let mut rng = ChaCha8Rng::seed_from_u64(256);
    graphs.extend((0..4).map(|_| random_road_grid(&mut rng, 256, 256)));
    let mut lowest = 1.0f64;
    for (i, g) in graphs.iter().enumerate() {
        match pipeline(g, 256, 256) {
            Ok((total, quality)) => {
                lowest = lowest.min(quality);
                if total != 0.0 || quality < E2E_MIN_QUALITY {
                    failures.push(format!("grid {i}: loss {total}, quality {quality}"));
                }
            }
            Err(e) => failures.push(format!("grid {i}: {e}")),
        }
    }
    Check::new("end to end", failures, format!("{} grids, lowest quality {lowest:.4}", graphs.len()))
}

/// Windowed forward and backward on a 1024x1024 grid with one worker,
/// plus bitwise agreement across worker counts.
pub fn performance() -> Check {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1024);
    let g = border_roads(&mut rng, PERF_SIDE, PERF_SIDE, 12);
    let gt = build_ground_truth(&g, PERF_SIDE, PERF_SIDE, 5, 20.0).expect("graph fits");
    let pred = noisy_prediction(&mut rng, &gt, 4.0);
    let cfg = LossConfig::default();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        let start = Instant::now();
        let b = pool.install(|| total_loss(&pred, &gt, &cfg)).expect("valid input");
        (b, start.elapsed())
    };
    let _ = run(1);
    let (one, took) = run(1);
    if took >= PERF_BUDGET {
        failures.push(format!("single worker took {took:?}"));
    }
    for threads in [2, 4, 8] {
        let (other, _) = run(threads);
        if other.total.to_bits() != one.total.to_bits() || other.grad != one.grad {
            failures.push(format!("{threads} workers disagree with 1"));
        }
    }
    Check::new("performance", failures, format!("{took:?} with one worker, identical across 1/2/4/8"))
}

/// The checks run by `selftest`: everything except the timing budget.
pub fn selftest(seeds: u64) -> Vec<Check> {
    let graphs = seeds.clamp(1, 20);
    vec![
        oracle_equivalence(seeds),
        pair_fixture(),
        gradient_check(graphs),
        zero_at_ground_truth(graphs),
        weight_bound(graphs.min(8)),
        gap_closing(),
        metric_identities(graphs),
        apls_fixture(),
        end_to_end(),
    ]
}
