mod common;

use common::{csv_rows, hspace, hspace_ok, write_edges};
use tempfile::tempdir;

#[test]
fn embed_path3_matches_the_dense_solution() {
    let dir = tempdir().unwrap();
    std::fs::write(dir.path().join("p3.txt"), "% path\n1 2\n2 3\n").unwrap();
    hspace_ok(dir.path(), &["embed", "p3.txt", "--alpha", "1", "--dim", "1", "--out", "p3"]);
    let text = std::fs::read_to_string(dir.path().join("p3.coords.csv")).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["label", "c1"]);
    assert_eq!(rows.len(), 4);
    // N_1 of the path has eigenvector (1, 0, -1)/√2 for eigenvalue 0
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!((c[0].abs() - h).abs() < 1e-12 && c[1].abs() < 1e-12 && (c[0] + c[2]).abs() < 1e-12);
    let eig: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p3.eigen.json")).unwrap()).unwrap();
    assert!((eig["eigenvalues"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(eig["meta"]["config"]["alpha"], "1");
}

#[test]
fn missing_input_exits_2_and_names_the_path() {
    let dir = tempdir().unwrap();
    let out = hspace(dir.path(), &["embed", "no-such-graph.txt", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-graph.txt"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempdir().unwrap();
    write_edges(&dir.path().join("g.txt"), &[(0, 1), (1, 2), (2, 3)]);
    let out = hspace(dir.path(), &["evaluate", "g.txt", "--methods", "CN,Foo"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Foo") && err.contains("Katz"), "{err}");
    assert_eq!(hspace(dir.path(), &["embed", "g.txt", "--alpha", "x"]).status.code(), Some(2));
    assert_eq!(hspace(dir.path(), &["bogus"]).status.code(), Some(2));
    assert_eq!(hspace(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn parse_error_reports_the_line() {
    let dir = tempdir().unwrap();
    std::fs::write(dir.path().join("bad.txt"), "1 2\n3\n").unwrap();
    let out = hspace(dir.path(), &["embed", "bad.txt", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.txt:2"));
}

#[test]
fn computational_failure_exits_1() {
    let dir = tempdir().unwrap();
    write_edges(&dir.path().join("g.txt"), &[(0, 1), (1, 2)]);
    // d = 5 needs at least 6 nodes
    let out = hspace(dir.path(), &["embed", "g.txt", "--dim", "5", "--out", "x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempdir().unwrap();
    std::fs::write(dir.path().join("p3.txt"), "1 2\n2 3\n").unwrap();
    std::fs::write(dir.path().join("run.cfg"), "# settings\nalpha = 0.5\ndim = 1\n").unwrap();
    hspace_ok(dir.path(), &["embed", "p3.txt", "--config", "run.cfg", "--alpha", "2", "--out", "a"]);
    let text = std::fs::read_to_string(dir.path().join("a.coords.csv")).unwrap();
    assert!(text.contains("# alpha: 2\n") && text.contains("# dim: 1\n"), "{text}");

    std::fs::write(dir.path().join("typo.cfg"), "alpah = 0.5\n").unwrap();
    let out = hspace(dir.path(), &["embed", "p3.txt", "--config", "typo.cfg", "--out", "b"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn correlate_against_own_embedding_is_one() {
    let dir = tempdir().unwrap();
    hspace_ok(dir.path(), &["generate", "--nodes", "150", "--mean-degree", "6", "--seed", "4", "--out", "m"]);
    hspace_ok(dir.path(), &["embed", "m.edges.txt", "--alpha", "0.85", "--dim", "3", "--out", "e"]);
    let text = hspace_ok(
        dir.path(),
        &["correlate", "m.edges.txt", "--coords", "e.coords.csv", "--alphas", "0.85", "--dims", "3"],
    );
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["alpha", "d=3"]);
    let v: f64 = rows[1][1].parse().unwrap();
    assert!((v - 1.0).abs() < 1e-12, "{v}");
}

#[test]
fn common_neighbours_on_a_long_cycle_is_a_coin_flip() {
    let dir = tempdir().unwrap();
    let n = 400u32;
    let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    write_edges(&dir.path().join("cycle.txt"), &edges);
    let text = hspace_ok(
        dir.path(),
        &["evaluate", "cycle.txt", "--methods", "CN", "--reps", "5", "--no-precision", "--format", "json"],
    );
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let auc = v["reports"][0]["auc"].as_f64().unwrap();
    // only the n pairs at distance two ever share a neighbour
    assert!((auc - 0.5).abs() <= 0.01, "{auc}");
}

#[test]
fn evaluate_wide_layout_has_a_column_per_method() {
    let dir = tempdir().unwrap();
    hspace_ok(dir.path(), &["generate", "--nodes", "120", "--mean-degree", "6", "--out", "m"]);
    let text = hspace_ok(
        dir.path(),
        &["evaluate", "m.edges.txt", "--methods", "CN,RA,hybrid:CN", "--reps", "2", "--layout", "wide", "--network", "toy"],
    );
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["network", "metric", "CN", "RA", "hybrid:CN"]);
    assert_eq!(rows[1][..2], ["toy", "auc"]);
    assert_eq!(rows[2][..2], ["toy", "precision"]);
}

#[test]
fn theory_curve_over_beta() {
    let dir = tempdir().unwrap();
    let text = hspace_ok(dir.path(), &["theory", "--betas", "1.5,2,3", "--panels", "128"]);
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["beta", "mu", "auc"]);
    let aucs: Vec<f64> = rows[1..].iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(aucs.len(), 3);
    assert!(aucs.windows(2).all(|w| w[0] < w[1]), "{aucs:?}");
}

#[test]
fn tune_reports_selection_and_profiles() {
    let dir = tempdir().unwrap();
    hspace_ok(dir.path(), &["generate", "--nodes", "150", "--mean-degree", "6", "--out", "m"]);
    let text = hspace_ok(
        dir.path(),
        &["tune", "m.edges.txt", "--alphas", "0.5:0.5:1.5", "--dims", "2,3,4", "--format", "json"],
    );
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["alpha_profile"].as_array().unwrap().len(), 3);
    assert_eq!(v["dim_profile"].as_array().unwrap().len(), 3);
    let best = v["selected"]["auc"].as_f64().unwrap();
    assert!(v["dim_profile"].as_array().unwrap().iter().all(|p| p["auc"].as_f64().unwrap() <= best));
    assert_eq!(v["meta"]["command"], "tune");
}
