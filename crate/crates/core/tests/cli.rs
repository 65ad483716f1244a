//! End-to-end tests of the binary: exit codes, determinism, file round trips.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_special-kahler"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn catalog_list_names_every_entry() {
    let out = run(&["catalog", "list"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    for name in [
        "half_plane",
        "disc",
        "punctured_disc",
        "log_metric",
        "conical(0.5)",
        "picard_local(0.5)",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
    assert!(text.contains("model-only"));
}

#[test]
fn catalog_sample_is_deterministic_and_parseable() {
    let a = run(&["catalog", "sample", "punctured_disc", "--resolution", "16"]);
    let b = run(&["catalog", "sample", "punctured_disc", "--resolution", "16"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout, "output is not deterministic");
    let text = stdout(&a);
    assert!(text.starts_with("# schema_version=1"));
    assert!(text.contains("i_radial,i_angular,r,theta,value"));
    // 16x16 grid => 16*16 data rows + 3 header lines
    assert_eq!(text.lines().count(), 3 + 256);
}

#[test]
fn unknown_metric_exits_2() {
    let out = run(&["catalog", "sample", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown catalog entry"));
}

#[test]
fn verify_reports_and_model_only_exits_5() {
    let out = run(&["verify", "disc", "--resolution", "64", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let kmin = report["levels"][0]["curvature_min"].as_f64().unwrap();
    assert!((kmin + 1.0).abs() < 1e-2, "curvature_min = {kmin}");

    let out = run(&["verify", "punctured_disc", "--resolution", "48", "--refinements", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["levels"].as_array().unwrap().len(), 3);
    for key in ["flatness", "eta_closedness", "eta_codifferential", "eta_kw"] {
        // A null order means the residual sits at the rounding floor at every
        // level, which is stronger than any convergence order.
        match report["fitted_orders"][key].as_f64() {
            Some(order) => assert!(order >= 1.8, "{key} fitted order = {order}"),
            None => {
                for level in report["levels"].as_array().unwrap() {
                    let res = if key == "flatness" {
                        level["flatness"].as_f64().unwrap()
                    } else {
                        level["eta"][key.trim_start_matches("eta_")].as_f64().unwrap()
                    };
                    assert!(res <= 1e-12, "{key} residual {res} above rounding floor");
                }
            }
        }
    }

    let out = run(&["verify", "picard_local(0.5)"]);
    assert_eq!(out.status.code(), Some(5));
    assert!(stderr(&out).contains("model-only"));
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

const GOOD_CONFIG: &str = r#"{
    "schema_version": 1,
    "grid": {"r_in": 0.05, "r_out": 0.9, "n_radial": 32, "n_angular": 8},
    "harmonic": {"kind": "coordinate_x", "a": 0.0},
    "beta": 0.5,
    "tol": 1e-8,
    "max_iter": 30
}"#;

#[test]
fn solve_writes_solution_with_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GOOD_CONFIG);
    let out_path = dir.path().join("u.csv");
    let out = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# schema_version=1 config="));
    let hash = first.rsplit('=').next().unwrap();
    assert_eq!(hash.len(), 64, "expected sha256 hex, got '{hash}'");
    assert!(stderr(&out).contains("converged=true"));
}

#[test]
fn solve_beta_constraint_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &GOOD_CONFIG.replace("0.5", "1.5"));
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stderr(&out).contains("beta < n+1"));
}

#[test]
fn solve_non_convergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &GOOD_CONFIG.replace("\"max_iter\": 30", "\"max_iter\": 1"));
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("converged=false"));
}

#[test]
fn solve_rejects_malformed_configs() {
    let dir = tempfile::tempdir().unwrap();
    // unknown field
    let cfg = write_config(dir.path(), &GOOD_CONFIG.replace("\"beta\"", "\"betta\""));
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    // wrong schema version
    let cfg = write_config(
        dir.path(),
        &GOOD_CONFIG.replace("\"schema_version\": 1", "\"schema_version\": 7"),
    );
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // missing file
    let out = run(&["solve", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_catalog_entries_match_expectations() {
    let out = run(&["classify", "punctured_disc"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["branch"]["logarithmic"]["n_plus_1"], 1);
    assert!(stderr(&out).contains("agrees"));
    assert!(stderr(&out).contains("bounded factor"));

    let out = run(&["classify", "conical(0.5)"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let beta = v["branch"]["power"]["beta"].as_f64().unwrap();
    assert!((beta - 0.5).abs() <= 0.02, "beta = {beta}");
}

#[test]
fn plot_emits_python_and_checks_input_exists() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("w.csv");
    let out = run(&[
        "catalog",
        "sample",
        "disc",
        "--resolution",
        "16",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let out = run(&["plot", "--input", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let script = stdout(&out);
    assert!(script.contains("matplotlib"));
    assert!(script.contains(csv.to_str().unwrap()));

    let out = run(&["plot", "--input", "/nonexistent/data.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("does not exist"));
}

#[test]
fn convergence_reports_second_order() {
    let out = run(&[
        "convergence",
        "punctured_disc",
        "--base",
        "16",
        "--levels",
        "3",
        "--tol",
        "1e-9",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let order = v["fitted_order"].as_f64().unwrap();
    assert!((1.5..=2.5).contains(&order), "order = {order}");

    let out = run(&["convergence", "picard_local(0.5)"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("catalog"));
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}
