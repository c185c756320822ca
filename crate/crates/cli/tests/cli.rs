use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
        .display()
        .to_string()
}

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edutrap"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn assert_manifest_outputs_exist(dir: &Path) {
    let m = manifest(dir);
    for name in m["outputs"].as_array().unwrap() {
        let p = dir.join(name.as_str().unwrap());
        assert!(fs::metadata(&p).unwrap().len() > 0, "{} empty", p.display());
    }
}

#[test]
fn sweep_reference_grid() {
    let dir = TempDir::new().unwrap();
    let o = run(
        dir.path(),
        &["sweep", "--scenario", &data("reference.toml"), "--k-grid", "0:0.05:2"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("mismatch.csv"));
    assert_eq!(rows[0], ["K", "t_naive", "t_inf", "mismatch", "case_naive", "case_inf"]);
    assert_eq!(rows.len(), 42);
    assert_eq!(rows[1][3], "0");
    assert_eq!(rows[21][0], "1");
    assert_eq!(rows[21][1], "0.5625");
    assert_manifest_outputs_exist(dir.path());
}

#[test]
fn numbers_have_at_most_twelve_significant_digits() {
    let dir = TempDir::new().unwrap();
    let o = run(
        dir.path(),
        &[
            "sweep",
            "--scenario",
            &data("reference.toml"),
            "--k-grid",
            "0:0.05:2",
            "--noncog",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    for file in ["mismatch.csv", "gap.csv"] {
        for row in csv_rows(&dir.path().join(file)).iter().skip(1) {
            for cell in row.iter().filter(|c| c.parse::<f64>().is_ok()) {
                let digits: String = cell.chars().filter(char::is_ascii_digit).collect();
                assert!(digits.trim_start_matches('0').len() <= 12, "{cell}");
            }
        }
    }
}

#[test]
fn identical_invocations_give_identical_artifacts() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [
        "tiers",
        "--scenario",
        &data("tiers_switch.toml"),
        "--k-grid",
        "0:0.05:2",
    ];
    assert_eq!(run(a.path(), &args).status.code(), Some(0));
    assert_eq!(run(b.path(), &args).status.code(), Some(0));
    for f in ["tiers.csv", "tiers.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
    let rows = csv_rows(&a.path().join("tiers.csv"));
    assert_eq!(
        rows[0],
        ["K", "tau_low", "tau_high", "delta", "choice", "t_naive", "t_inf", "mismatch", "jump"]
    );
    assert_eq!(rows.iter().filter(|r| r[8] == "true").count(), 1);
}

#[test]
fn check_p1_verified() {
    let dir = TempDir::new().unwrap();
    let o = run(
        dir.path(),
        &["check", "--scenario", &data("reference.toml"), "--prop", "P1"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("verified"));
    let r: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("check_P1.json")).unwrap()).unwrap();
    assert_eq!(r["status"], "verified");
}

#[test]
fn a7_violation_refused() {
    let dir = TempDir::new().unwrap();
    let scen = data("a7_violation.toml");
    let o = run(
        dir.path(),
        &[
            "audit",
            "--scenario",
            &scen,
            "--t-grid",
            "0:0.1:1",
            "--k-grid",
            "0:0.25:2",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("A7"));
    assert!(stderr(&o).contains("t = 1, K = 0"));
    let o = run(
        dir.path(),
        &["check", "--scenario", &scen, "--prop", "P1", "--oracle-points", "2001"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("A7"));
    let o = run(dir.path(), &["sweep", "--scenario", &scen, "--k-grid", "0:0.1:1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("assumption A7"));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let scen = data("reference.toml");
    for grid in ["0:0:2", "2:0.1:0", "0:0.3:1", "x"] {
        let o = run(dir.path(), &["sweep", "--scenario", &scen, "--k-grid", grid]);
        assert_eq!(o.status.code(), Some(2), "grid {grid}");
    }
    let o = run(
        dir.path(),
        &["sweep", "--scenario", "missing.toml", "--k-grid", "0:0.1:1"],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = run(
        dir.path(),
        &["sweep", "--scenario", &scen, "--k-grid", "0:0.1:1", "--bogus"],
    );
    assert_eq!(o.status.code(), Some(2));
    let bad = dir.path().join("bad.toml");
    fs::write(
        &bad,
        fs::read_to_string(&scen).unwrap().replace("bA = 0.4", "bA = -0.4"),
    )
    .unwrap();
    let o = run(dir.path(), &["solve", "--scenario", bad.to_str().unwrap(), "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bA must be > 0"));
}

#[test]
fn solve_and_adoption() {
    let dir = TempDir::new().unwrap();
    let scen = data("reference.toml");
    let o = run(
        dir.path(),
        &["solve", "--scenario", &scen, "--k", "1", "--planner", "naive"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("tA=0.5625"));
    let o = run(
        dir.path(),
        &[
            "adoption",
            "--scenario",
            &scen,
            "--ta",
            "0.5",
            "--c-grid",
            "0.3:-0.01:0.21",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(csv_rows(&dir.path().join("adoption.csv")).len(), 11);
    let o = run(
        dir.path(),
        &[
            "adoption",
            "--scenario",
            &scen,
            "--ta",
            "0.5",
            "--c-grid",
            "0.5:-0.01:0.4",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
}

fn judgments_csv() -> String {
    // Three models judge every pair of five skills in both orders; the
    // lower-numbered skill always wins, except model m3 contradicts itself
    // on one pair.
    let mut s = String::from("model_id,skill_i,skill_j,order,verdict\n");
    for m in ["m1", "m2", "m3"] {
        for i in 0..5 {
            for j in i + 1..5 {
                let contradict = m == "m3" && i == 0 && j == 4;
                s += &format!("{m},k{i},k{j},IJ,1\n");
                s += &format!("{m},k{i},k{j},JI,{}\n", if contradict { 1 } else { 2 });
            }
        }
        s += &format!("{m},k5,k0,IJ,{}\n", if m == "m1" { 1 } else { 2 });
    }
    s
}

#[test]
fn index_pipeline_end_to_end() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("judgments.csv");
    fs::write(&input, judgments_csv()).unwrap();
    let o = run(dir.path(), &["index", "elo", "--in", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ratings = csv_rows(&dir.path().join("ratings.csv"));
    assert_eq!(ratings[0], ["skill_id", "rating", "n_comparisons"]);
    let total: f64 = ratings.iter().skip(1).map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 6000.0).abs() < 1e-6);
    let elo: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("elo.json")).unwrap()).unwrap();
    assert_eq!(elo["single_order_pairs"], 3);
    assert_eq!(elo["draws_from_disagreement"], 1);

    let matrix = dir.path().join("scores_matrix.csv");
    let o = run(dir.path(), &["index", "pca", "--in", matrix.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let index = csv_rows(&dir.path().join("index.csv"));
    assert_eq!(index[0], ["skill_id", "pc1"]);
    let k0: f64 = index.iter().find(|r| r[0] == "k0").unwrap()[1].parse().unwrap();
    let k4: f64 = index.iter().find(|r| r[0] == "k4").unwrap()[1].parse().unwrap();
    assert!(k0 > k4);

    let pairs = dir.path().join("pairs.csv");
    let mut text = String::from("skill_id,x,y\n");
    for i in 0..30 {
        text += &format!("s{i},{},{}\n", i % 9, (i * 7) % 13);
    }
    fs::write(&pairs, text).unwrap();
    let args = [
        "index",
        "tau",
        "--in",
        pairs.to_str().unwrap(),
        "--bootstrap",
        "1000",
        "--method",
        "bca",
        "--seed",
        "7",
    ];
    let a = TempDir::new().unwrap();
    assert_eq!(run(a.path(), &args).status.code(), Some(0));
    assert_eq!(run(dir.path(), &args).status.code(), Some(0));
    let sa = fs::read(a.path().join("stats.json")).unwrap();
    assert_eq!(sa, fs::read(dir.path().join("stats.json")).unwrap());
    let stats: Value = serde_json::from_slice(&sa).unwrap();
    for key in ["tau", "ci_lo", "ci_hi", "method", "B", "seed"] {
        assert!(!stats[key].is_null(), "{key}");
    }
    assert_eq!(manifest(a.path())["seed"], 7);
}

#[test]
fn duplicate_judgments_refused() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("dup.csv");
    fs::write(
        &input,
        "model_id,skill_i,skill_j,order,verdict\nm,a,b,IJ,1\nm,a,b,IJ,2\n",
    )
    .unwrap();
    let o = run(dir.path(), &["index", "elo", "--in", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("duplicate judgment"));
}
