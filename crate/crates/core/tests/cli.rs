mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use common::clique_edges;
use serde_json::json;

fn anglemin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anglemin")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Two 20-node cliques with 1-based ids; the first `labeled` nodes of each
/// clique carry their community. Returns (edges, labels, truth).
fn clique_files(dir: &Path, labeled: usize) -> (PathBuf, PathBuf, PathBuf) {
    let mut edges = String::new();
    let mut labels = String::new();
    let mut truth = String::new();
    for c in 0..2 {
        for (a, b) in clique_edges(c * 20..(c + 1) * 20) {
            edges.push_str(&format!("{} {}\n", a + 1, b + 1));
        }
        for v in c * 20..(c + 1) * 20 {
            if v - c * 20 < labeled {
                labels.push_str(&format!("{}\t{}\n", v + 1, c + 1));
            }
            truth.push_str(&format!("{}\t{}\n", v + 1, c + 1));
        }
    }
    let paths = (dir.join("edges.txt"), dir.join("labels.txt"), dir.join("truth.txt"));
    fs::write(&paths.0, edges).unwrap();
    fs::write(&paths.1, labels).unwrap();
    fs::write(&paths.2, truth).unwrap();
    paths
}

fn tiny_config() -> serde_json::Value {
    json!({
        "config_id": "tiny",
        "n": 60,
        "k": 2,
        "theta_law": "gamma_dense",
        "balance": "balanced",
        "n_labeled": [10, 30],
        "repetitions": 3,
        "seed": 11
    })
}

#[test]
fn missing_config_field_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = tiny_config();
    cfg.as_object_mut().unwrap().remove("repetitions");
    let file = dir.path().join("cfg.json");
    fs::write(&file, cfg.to_string()).unwrap();
    let out = anglemin(&["simulate", "--config", path(&file), "--out", path(&dir.path().join("out"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("repetitions"), "{}", stderr(&out));
}

#[test]
fn tiny_simulation_is_fast_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cfg.json");
    fs::write(&file, tiny_config().to_string()).unwrap();
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let start = Instant::now();
        let out = anglemin(&["simulate", "--config", path(&file), "--out", path(&out_dir)]);
        assert!(start.elapsed().as_secs_f64() < 10.0);
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(out_dir.join("manifest.json").exists());
        outputs.push((
            fs::read(out_dir.join("results.csv")).unwrap(),
            fs::read(out_dir.join("aggregate.csv")).unwrap(),
            fs::read(out_dir.join("curve_tiny.dat")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    let results = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert_eq!(results.lines().count(), 1 + 3 * 2 * 5);
}

#[test]
fn predict_assigns_clique_member() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, labels, _) = clique_files(dir.path(), 10);
    let node = dir.path().join("node.txt");
    fs::write(&node, "21 22 23 24 25\n").unwrap();
    let base = ["predict", "--edges", path(&edges), "--labels", path(&labels), "--k", "2", "--new-node", path(&node)];
    for method in ["anglemin", "anglemin-plus", "subnetwork"] {
        let mut args = base.to_vec();
        args.extend(["--method", method]);
        let out = anglemin(&args);
        assert!(out.status.success(), "{method}: {}", stderr(&out));
        assert!(stdout(&out).starts_with("label=2\n"), "{method}: {}", stdout(&out));

        args.push("--json");
        let out = anglemin(&args);
        let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(value["label"], 2);
        assert_eq!(value["fallback"], false);
    }
}

#[test]
fn predict_warns_on_isolated_node() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, labels, _) = clique_files(dir.path(), 10);
    let node = dir.path().join("node.txt");
    fs::write(&node, "").unwrap();
    let out = anglemin(&["predict", "--edges", path(&edges), "--labels", path(&labels), "--k", "2", "--new-node", path(&node)]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning"), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("label="));
}

#[test]
fn predict_rejects_out_of_range_neighbor() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, labels, _) = clique_files(dir.path(), 10);
    let node = dir.path().join("node.txt");
    fs::write(&node, "41\n").unwrap();
    let out = anglemin(&["predict", "--edges", path(&edges), "--labels", path(&labels), "--k", "2", "--new-node", path(&node)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_check_reports_structural_cosine() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("params.json");
    fs::write(
        &file,
        json!({
            "p": [[1.0, 0.5], [0.5, 1.0]],
            "theta": [0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
            "labels": [1, 2, 1, 2, 1, 2],
            "labeled": [0, 1],
            "theta_star": 0.5,
            "community": 1
        })
        .to_string(),
    )
    .unwrap();
    let out = anglemin(&["oracle-check", "--params", path(&file)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("0.800000"), "{}", stdout(&out));

    let out = anglemin(&["oracle-check", "--params", path(&file), "--json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(value.is_object());
}

#[test]
fn insample_recovers_cliques() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, labels, truth) = clique_files(dir.path(), 5);
    let out_dir = dir.path().join("out");
    let out = anglemin(&[
        "insample",
        "--edges",
        path(&edges),
        "--labels",
        path(&labels),
        "--k",
        "2",
        "--truth",
        path(&truth),
        "--out",
        path(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let accuracy: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("accuracy="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(accuracy >= 0.95, "accuracy {accuracy}");
    let predictions = fs::read_to_string(out_dir.join("predictions.tsv")).unwrap();
    assert_eq!(predictions.lines().count(), 30);
}

#[test]
fn realdata_on_cliques_has_no_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _, truth) = clique_files(dir.path(), 0);
    let out_dir = dir.path().join("out");
    let out = anglemin(&[
        "realdata",
        "--edges",
        path(&edges),
        "--labels",
        path(&truth),
        "--k",
        "2",
        "--fractions",
        "0.5",
        "--out",
        path(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert!(row.ends_with("0.0000\t0.0000"), "{row}");
    }
    assert!(out_dir.join("results.csv").exists());
}

#[test]
fn bad_label_file_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, labels, _) = clique_files(dir.path(), 5);
    fs::write(&labels, "1\t3\n").unwrap();
    let out = anglemin(&["insample", "--edges", path(&edges), "--labels", path(&labels), "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("label 3"), "{}", stderr(&out));
}
