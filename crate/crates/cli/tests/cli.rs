use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gnncost_core::graph::{ingest_edge_list, load_binary_csr};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn gnncost(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnncost"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes `body` as `run.toml` inside `dir` and returns its path.
fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path
}

const SYNTHETIC: &str = r#"
[dataset]
name = "synthetic"
synthetic = { kind = "power_law", n = 2000, avg_degree = 8.0, seed = 3 }
feature_dim = 32
num_classes = 4
train_fraction = 0.5

[partition]
k = 4

[model]
kind = "graphsage"
layers = 2
hidden = 16

[sampler]
fanout = 5
batch_size = 128
rng_root = 11
"#;

fn analyze_json(config: &Path, out: &Path, extra: &[&str]) -> serde_json::Value {
    let mut args = vec![
        "analyze",
        "--config",
        path_str(config),
        "--out",
        path_str(out),
    ];
    args.extend_from_slice(extra);
    let o = gnncost(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn golden_three_cycle_report_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixtures().join("cycle3.toml");
    let o = gnncost(&[
        "analyze",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let produced = fs::read(dir.path().join("report.json")).unwrap();
    let golden = fs::read(fixtures().join("cycle3_report.json")).unwrap();
    assert!(
        produced == golden,
        "report.json differs from the golden file"
    );
}

#[test]
fn golden_three_cycle_values_match_hand_computation() {
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(fixtures().join("cycle3_report.json")).unwrap()).unwrap();
    // Parts {0,1} and {2}: part 0 needs vertex 2, part 1 needs 0 and 1.
    // Two layers of width 4 at 4 bytes: 2 * (1 + 2) * 4 * 4.
    assert_eq!(v["gamma_fg_volume"], 96);
    // Every sampled frontier is the whole cycle. Three micro-batches: two on
    // worker 0 (one remote vertex each) and one on worker 1 (two remote).
    assert_eq!(v["gamma_mb"], (1 + 1 + 2) * 4 * 4);
    // GCN [4, 4, 2]: layer 1 c_e = 8, c_v = 32; layer 2 c_e = 8, c_v = 16.
    let fg = 6 * 8 + 3 * 32 + 6 * 8 + 3 * 16;
    assert_eq!(v["theta_fg_forward"], fg);
    // Per batch: layer 1 outputs 3 vertices over 6 edges, layer 2 outputs the seed over 2 edges.
    let mb = 3 * (6 * 8 + 3 * 32 + 2 * 8 + 16);
    assert_eq!(v["theta_mb_forward"], mb);
    assert_eq!(v["theta_mb"].as_f64().unwrap(), 2.0 * mb as f64);
    // Sampling work per batch: vertices 3 + 3 + 1 plus edges 6 + 2.
    assert_eq!(v["sampling_work"], 3 * 15);
    assert_eq!(v["gamma_ratio"].as_f64().unwrap(), 1.5);
}

#[test]
fn ingest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let gcsr = dir.path().join("c.gcsr");
    let input = fixtures().join("cycle3.edges");
    let o = gnncost(&[
        "ingest",
        "--input",
        path_str(&input),
        "--output",
        path_str(&gcsr),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let loaded = load_binary_csr(fs::File::open(&gcsr).unwrap()).unwrap();
    let direct = ingest_edge_list(fs::read(&input).unwrap().as_slice(), false, None).unwrap();
    assert_eq!(loaded, direct);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["pass"], true);
}

#[test]
fn ingest_truncated_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.edges");
    fs::write(&input, "0 1\n1 2\n2").unwrap();
    let o = gnncost(&["ingest", "--input", path_str(&input)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn ingest_meta_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixtures().join("cycle3.edges");
    let gcsr = dir.path().join("c.gcsr");
    let o = gnncost(&[
        "ingest",
        "--input",
        path_str(&input),
        "--output",
        path_str(&gcsr),
        "--symmetrize",
        "--expected-m",
        "60",
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(gcsr.exists());
}

#[test]
fn bad_flag_exits_1() {
    assert_eq!(code(&gnncost(&["analyze", "--no-such-flag"])), 1);
    assert_eq!(code(&gnncost(&["--help"])), 0);
}

#[test]
fn workers_not_equal_k_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &SYNTHETIC.replace("rng_root = 11", "rng_root = 11\nworkers = 3"),
    );
    let o = gnncost(&[
        "analyze",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("sampler.workers"), "{}", stderr(&o));
}

#[test]
fn invalid_config_lists_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let body = SYNTHETIC
        .replace("train_fraction = 0.5", "train_fraction = 1.5")
        .replace("batch_size = 128", "batch_size = 0")
        .replace("k = 4", "k = 4\nslack = -1.0");
    let cfg = write_config(dir.path(), &body);
    let o = gnncost(&["analyze", "--config", path_str(&cfg)]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    for field in [
        "dataset.train_fraction",
        "sampler.batch_size",
        "partition.slack",
    ] {
        assert!(err.contains(field), "missing {field} in: {err}");
    }
}

#[test]
fn unknown_config_key_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &SYNTHETIC.replace("hidden = 16", "hidden = 16\nhiddn = 3"),
    );
    let o = gnncost(&["analyze", "--config", path_str(&cfg)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("hiddn"), "{}", stderr(&o));
}

#[test]
fn single_partition_marks_gamma_ratio_undefined() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SYNTHETIC.replace("k = 4", "k = 1"));
    let v = analyze_json(&cfg, dir.path(), &[]);
    assert!(v["gamma_ratio"].is_null());
    assert_eq!(v["gamma_mb"], 0);
    assert!(v["flags"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f.as_str().unwrap().contains("gamma_ratio")));
}

#[test]
fn sweep_rejects_k_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SYNTHETIC);
    let o = gnncost(&[
        "sweep",
        "--config",
        path_str(&cfg),
        "--k-list",
        "2,1,4",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 1);
    assert!(!dir.path().join("sweep.csv").exists());
}

#[test]
fn sweep_single_k_matches_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SYNTHETIC);
    let a = dir.path().join("a");
    let s = dir.path().join("s");
    let o = gnncost(&[
        "analyze",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(&a),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = gnncost(&[
        "sweep",
        "--config",
        path_str(&cfg),
        "--k-list",
        "4",
        "--out",
        path_str(&s),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        fs::read(a.join("report.csv")).unwrap(),
        fs::read(s.join("sweep.csv")).unwrap()
    );
    assert_eq!(fs::read(s.join("sweep/k4.json")).unwrap(), {
        let o = gnncost(&[
            "analyze",
            "--config",
            path_str(&cfg),
            "--out",
            path_str(&a),
            "--format",
            "json",
        ]);
        assert_eq!(code(&o), 0);
        fs::read(a.join("report.json")).unwrap()
    });
}

#[test]
fn sweep_power_law_rows_are_finite_and_positive() {
    let dir = tempfile::tempdir().unwrap();
    let body = SYNTHETIC
        .replace(
            "n = 2000, avg_degree = 8.0",
            "n = 100000, avg_degree = 10.0",
        )
        .replace("batch_size = 128", "batch_size = 4096")
        .replace("train_fraction = 0.5", "train_fraction = 0.1");
    let cfg = write_config(dir.path(), &body);
    let o = gnncost(&[
        "sweep",
        "--config",
        path_str(&cfg),
        "--k-list",
        "2,4,8",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "gamma_ratio").unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for (row, k) in rows.iter().zip(["2", "4", "8"]) {
        assert_eq!(row.len(), headers.len());
        assert_eq!(&row[headers.iter().position(|h| h == "k").unwrap()], k);
        let r: f64 = row[col].parse().unwrap();
        assert!(r.is_finite() && r > 0.0, "gamma_ratio {r}");
    }
}

#[test]
fn sample_stats_with_zero_fanout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SYNTHETIC.replace("fanout = 5", "fanout = 0"));
    let o = gnncost(&[
        "sample-stats",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("sample_stats.json")).unwrap()).unwrap();
    for layer in v["layers"].as_array().unwrap().iter().skip(1) {
        assert_eq!(layer["total_edges"], 0);
    }
    // Only the 1000 seeds are ever in a frontier, once per layer.
    assert_eq!(v["sampling_work"], 3 * 1000);
    let f = v["sampling_fraction"].as_f64().unwrap();
    assert!(f > 0.0 && f < 1.0);
}

#[test]
fn sample_stats_empty_train_mask_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("train.txt"), "# no training vertices\n").unwrap();
    let cfg = write_config(
        dir.path(),
        &SYNTHETIC.replace("train_fraction = 0.5", "train_mask = \"train.txt\""),
    );
    let o = gnncost(&[
        "sample-stats",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("empty"), "{}", stderr(&o));
}

#[test]
fn partition_writes_metis_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SYNTHETIC);
    let o = gnncost(&[
        "partition",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("partition.txt")).unwrap();
    assert_eq!(text.lines().count(), 2000);
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("partition.json")).unwrap()).unwrap();
    assert_eq!(v["k"], 4);
    assert_eq!(v["part_sizes"].as_array().unwrap().len(), 4);
}

#[test]
fn outputs_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let body = SYNTHETIC.replace("fanout = 5", "fanouts = [4, 3]");
    let cfg = write_config(dir.path(), &body);
    let mut outputs = Vec::new();
    for (i, jobs) in ["1", "8", "8"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        for cmd in ["analyze", "sample-stats"] {
            let o = gnncost(&[
                cmd,
                "--config",
                path_str(&cfg),
                "--out",
                path_str(&out),
                "--jobs",
                jobs,
            ]);
            assert_eq!(code(&o), 0, "{}", stderr(&o));
        }
        let o = gnncost(&[
            "sweep",
            "--config",
            path_str(&cfg),
            "--k-list",
            "2,3",
            "--out",
            path_str(&out),
            "--jobs",
            jobs,
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let files = [
            "report.json",
            "report.csv",
            "sample_stats.json",
            "sweep.csv",
            "sweep/k2.json",
            "sweep/k3.json",
        ];
        outputs.push(files.map(|f| fs::read(out.join(f)).unwrap()));
    }
    assert!(outputs[0] == outputs[1] && outputs[1] == outputs[2]);
}

#[test]
fn seed_flag_changes_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SYNTHETIC);
    let a = analyze_json(&cfg, &dir.path().join("a"), &["--seed", "1"]);
    let b = analyze_json(&cfg, &dir.path().join("b"), &["--seed", "2"]);
    assert_eq!(a["provenance"]["sampler"]["rng_root"], 1);
    assert_ne!(a["gamma_mb"], b["gamma_mb"]);
}
