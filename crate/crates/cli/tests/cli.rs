use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use roadtopo::annotation::build_ground_truth;
use roadtopo::graph::parse_graph;
use roadtopo::grid::Extent;
use roadtopo::io::{decode_grid, encode_grid};
use roadtopo::synth::noisy_prediction;

const CROSS: &str = "# two crossing roads\nN 0 0 60\nN 1 60 60\nN 2 119 60\nN 3 60 0\nN 4 60 119\nE 0 1\nE 1 2\nE 1 3\nE 1 4\n";

fn roadtopo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roadtopo")).args(args).output().expect("binary runs")
}

fn values(out: &Output) -> BTreeMap<String, String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

struct Scene {
    dir: TempDir,
}

impl Scene {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        fs::write(dir.path().join("gt.txt"), CROSS).unwrap();
        Scene { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }

    fn gengt(&self) {
        let out = roadtopo(&[
            "gengt", "--graph", &self.arg("gt.txt"), "--width", "120", "--height", "120",
            "--out-dist", &self.arg("dist.grd"), "--out-region", &self.arg("region.grd"),
            "--out-labels", &self.arg("labels.grd"),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }

    fn noisy_pred(&self) {
        let g = parse_graph(CROSS).unwrap();
        let gt = build_ground_truth(&g, 120, 120, 5, 20.0).unwrap();
        let pred = noisy_prediction(&mut ChaCha8Rng::seed_from_u64(5), &gt, 3.0);
        fs::write(self.path("noisy.grd"), encode_grid(&pred)).unwrap();
    }
}

fn read_grid_file(p: &Path) -> roadtopo::grid::ScalarGrid {
    decode_grid(&fs::read(p).unwrap()).unwrap()
}

#[test]
fn gengt_writes_all_grids() {
    let s = Scene::new();
    s.gengt();
    let dist = read_grid_file(&s.path("dist.grd"));
    let region = read_grid_file(&s.path("region.grd"));
    let labels = read_grid_file(&s.path("labels.grd"));
    assert_eq!((dist.width(), dist.height()), (120, 120));
    assert_eq!(dist.get(60, 60), 0.0);
    assert_eq!(dist.get(0, 0), 20.0);
    assert_eq!(dist.get(0, 60), 0.0);
    assert!(region.data().iter().all(|&v| v == 0.0 || v == 1.0));
    assert_eq!(labels.data().iter().cloned().fold(0.0f32, f32::max), 4.0);
}

#[test]
fn loss_is_zero_at_ground_truth() {
    let s = Scene::new();
    s.gengt();
    let out = roadtopo(&[
        "loss", "--pred", &s.arg("dist.grd"), "--gt-graph", &s.arg("gt.txt"), "--out-grad", &s.arg("grad.grd"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = values(&out);
    for k in ["mse", "dis", "conn", "total"] {
        assert_eq!(v[k], "0", "{k}");
    }
    assert!(read_grid_file(&s.path("grad.grd")).data().iter().all(|&g| g == 0.0));
}

#[test]
fn loss_output_does_not_depend_on_threads() {
    let s = Scene::new();
    s.noisy_pred();
    let run = |threads: &str, grad: &str| {
        let out = roadtopo(&[
            "loss", "--pred", &s.arg("noisy.grd"), "--gt-graph", &s.arg("gt.txt"), "--window", "32",
            "--threads", threads, "--out-grad", &s.arg(grad),
        ]);
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    let one = run("1", "g1.grd");
    let four = run("4", "g4.grd");
    assert_eq!(one, four);
    assert_eq!(fs::read(s.path("g1.grd")).unwrap(), fs::read(s.path("g4.grd")).unwrap());
    let v = values(&roadtopo(&["loss", "--pred", &s.arg("noisy.grd"), "--gt-graph", &s.arg("gt.txt"), "--global"]));
    assert!(v["total"].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn gradcheck_passes_on_a_noisy_prediction() {
    let s = Scene::new();
    s.noisy_pred();
    let out = roadtopo(&[
        "gradcheck", "--pred", &s.arg("noisy.grd"), "--gt-graph", &s.arg("gt.txt"), "--samples", "30", "--alpha", "0.01",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = values(&out);
    assert!(v["max_rel_err"].parse::<f64>().unwrap() <= 1e-3);
    assert_eq!(v["checked"], "30");
}

#[test]
fn extract_then_eval_recovers_the_cross() {
    let s = Scene::new();
    s.gengt();
    let out = roadtopo(&["extract", "--pred", &s.arg("dist.grd"), "--out", &s.arg("pred.txt")]);
    assert_eq!(out.status.code(), Some(0));
    let v = values(&out);
    assert_eq!(v["edges"], "4");
    let out = roadtopo(&[
        "eval", "--pred-graph", &s.arg("pred.txt"), "--gt-graph", &s.arg("gt.txt"), "--width", "120", "--height",
        "120", "--samples", "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = values(&out);
    assert!(v["ccq_quality"].parse::<f64>().unwrap() >= 0.95);
    assert!(v["jct_f1"].parse::<f64>().unwrap() == 1.0);
}

#[test]
fn self_evaluation_is_perfect_and_json_matches() {
    let s = Scene::new();
    let out = roadtopo(&[
        "eval", "--pred-graph", &s.arg("gt.txt"), "--gt-graph", &s.arg("gt.txt"), "--width", "120", "--height", "120",
        "--samples", "100", "--json", &s.arg("report.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = values(&out);
    assert_eq!(v.len(), 11);
    for k in ["apls", "tlts", "jct_f1", "hm_f1", "ccq_quality"] {
        assert!((v[k].parse::<f64>().unwrap() - 1.0).abs() <= 1e-9, "{k}={}", v[k]);
    }
    let json: serde_json::Value = serde_json::from_slice(&fs::read(s.path("report.json")).unwrap()).unwrap();
    for (k, text) in &v {
        assert_eq!(json[k].as_f64().unwrap(), text.parse::<f64>().unwrap(), "{k}");
    }
}

#[test]
fn eval_is_deterministic() {
    let s = Scene::new();
    fs::write(s.path("pred.txt"), "N 0 0 60\nN 1 60 62\nN 2 119 60\nN 3 60 0\nE 0 1\nE 1 2\nE 1 3\n").unwrap();
    let run = || {
        roadtopo(&[
            "eval", "--pred-graph", &s.arg("pred.txt"), "--gt-graph", &s.arg("gt.txt"), "--width", "120", "--height",
            "120", "--samples", "80", "--seed", "3",
        ])
        .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn selftest_passes_with_few_seeds() {
    let out = roadtopo(&["selftest", "--seeds", "5"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 9);
    assert!(!text.contains("FAIL"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["frobnicate"],
        vec!["loss", "--bogus"],
        vec!["loss", "--pred", "a", "--gt-graph", "b", "--window", "8", "--global"],
        vec!["selftest", "--seeds", "many"],
        vec![],
    ] {
        let out = roadtopo(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let s = Scene::new();
    s.gengt();
    let out = roadtopo(&["loss", "--pred", &s.arg("dist.grd"), "--gt-graph", &s.arg("gt.txt"), "--window", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(roadtopo(&["--help"]).status.code(), Some(0));
}

#[test]
fn io_and_format_errors_exit_with_three() {
    let s = Scene::new();
    s.gengt();
    let missing = roadtopo(&["extract", "--pred", &s.arg("nope.grd"), "--out", &s.arg("o.txt")]);
    assert_eq!(missing.status.code(), Some(3));

    let mut bytes = fs::read(s.path("dist.grd")).unwrap();
    bytes.push(0);
    fs::write(s.path("trailing.grd"), &bytes).unwrap();
    let trailing = roadtopo(&["extract", "--pred", &s.arg("trailing.grd"), "--out", &s.arg("o.txt")]);
    assert_eq!(trailing.status.code(), Some(3));

    fs::write(s.path("bad.txt"), "N 0 1\n").unwrap();
    let bad = roadtopo(&[
        "gengt", "--graph", &s.arg("bad.txt"), "--width", "10", "--height", "10", "--out-dist", &s.arg("d.grd"),
    ]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 1"));

    let outside = roadtopo(&[
        "gengt", "--graph", &s.arg("gt.txt"), "--width", "50", "--height", "50", "--out-dist", &s.arg("d.grd"),
    ]);
    assert_eq!(outside.status.code(), Some(3));
}

#[test]
fn in_process_run_reports_exit_codes() {
    assert_eq!(roadtopo_cli::run(["roadtopo", "nonsense"]), roadtopo_cli::EXIT_USAGE);
    assert_eq!(roadtopo_cli::run(["roadtopo", "selftest", "--seeds", "0"]), roadtopo_cli::EXIT_USAGE);
}
