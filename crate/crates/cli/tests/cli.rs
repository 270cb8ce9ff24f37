use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgscatter"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<HashMap<String, String>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect())
        .collect()
}

fn f(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key} = {:?}", row[key]))
}

/// `(1/γ)[[3(ζ̄ - ζ), 8], [8, 3(ζ̄ - ζ)]]` with `ζ = e^{-ik}`.
fn ring_entry(k: f64, i: usize, j: usize) -> (f64, f64) {
    let (zr, zi) = (k.cos(), -k.sin());
    let (gr, gi) = (9.0 * zr - zr, 9.0 * zi + zi);
    let (nr, ni) = if i == j { (0.0, -6.0 * zi) } else { (8.0, 0.0) };
    let d = gr * gr + gi * gi;
    ((nr * gr + ni * gi) / d, (ni * gr - nr * gi) / d)
}

fn links_file(dir: &tempfile::TempDir, body: &str) -> String {
    let path = dir.path().join("links.json");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn y_graph_row() {
    let out = run(&["smatrix", &data("y_graph.json"), "--k", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i == j { -1.0 / 3.0 } else { 2.0 / 3.0 };
            assert!((f(&rows[0], &format!("s_{i}_{j}_re")) - expected).abs() < 1e-12);
            assert!(f(&rows[0], &format!("s_{i}_{j}_im")).abs() < 1e-12);
        }
    }
    assert!(f(&rows[0], "unitarity_residual") < 1e-12);
}

#[test]
fn ring_row_matches_closed_form() {
    let out = run(&["smatrix", &data("ring.json"), "--k", "1"]);
    assert!(out.status.success());
    let row = &csv_rows(&stdout(&out))[0];
    for i in 0..2 {
        for j in 0..2 {
            let (re, im) = ring_entry(1.0, i, j);
            assert!((f(row, &format!("s_{i}_{j}_re")) - re).abs() < 1e-12);
            assert!((f(row, &format!("s_{i}_{j}_im")) - im).abs() < 1e-12);
        }
    }
}

#[test]
fn malformed_file_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(data("ring.json")).unwrap().replace("\"length\": 1.0}", "\"lenght\": 1.0}");
    std::fs::write(&path, text).unwrap();
    let out = run(&["smatrix", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("lenght"), "{}", stderr(&out));

    std::fs::write(&path, r#"{"vertices": 1, "edges": [], "conditions": "kirchhoff"}"#).unwrap();
    let out = run(&["smatrix", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rays"));
}

#[test]
fn invalid_graph_and_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, r#"{"vertices": 2, "edges": [], "rays": [{"vertex": 0}, {"vertex": 1}], "conditions": "kirchhoff"}"#).unwrap();
    let out = run(&["smatrix", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not connected"));

    assert_eq!(run(&["smatrix", &data("ring.json"), "--k", "0"]).status.code(), Some(2));
    assert_eq!(run(&["smatrix", &data("ring.json")]).status.code(), Some(2));
    let reversed = run(&["smatrix", &data("ring.json"), "--k-min", "2", "--k-max", "1", "--steps", "3"]);
    assert_eq!(reversed.status.code(), Some(2));
    assert_eq!(run(&["smatrix", &data("ring.json"), "--k", "1", "--steps", "3"]).status.code(), Some(2));
}

#[test]
fn compose_matches_smatrix_of_the_joined_graph() {
    let composed = run(&[
        "compose",
        &data("y_graph.json"),
        &data("y_graph.json"),
        "--links",
        &data("links_two_y.json"),
        "--k",
        "1",
    ]);
    assert!(composed.status.success(), "{}", stderr(&composed));
    let direct = run(&["smatrix", &data("ring.json"), "--k", "1"]);
    let (c, d) = (&csv_rows(&stdout(&composed))[0], &csv_rows(&stdout(&direct))[0]);
    for i in 0..2 {
        for j in 0..2 {
            for part in ["re", "im"] {
                let key = format!("s_{i}_{j}_{part}");
                assert!((f(c, &key) - f(d, &key)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn unlinked_pieces_are_block_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let links = links_file(&dir, r#"{"links": []}"#);
    let y = data("y_graph.json");
    let out = run(&["compose", &y, &y, "--links", &links, "--k", "2", "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["size"], 6);
    let s = &doc["rows"][0]["s"];
    for i in 0..6 {
        for j in 0..6 {
            let expected = if i / 3 != j / 3 {
                0.0
            } else if i == j {
                -1.0 / 3.0
            } else {
                2.0 / 3.0
            };
            assert!((s[i][j][0].as_f64().unwrap() - expected).abs() < 1e-12);
            assert!(s[i][j][1].as_f64().unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn compose_flags_condition_a_at_embedded_eigenvalue() {
    let (lo, hi) = ((PI - 0.1).to_string(), (PI + 0.1).to_string());
    let out = run(&[
        "compose",
        &data("y_graph.json"),
        &data("y_graph.json"),
        "--links",
        &data("links_two_y.json"),
        "--k-min",
        &lo,
        "--k-max",
        &hi,
        "--steps",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    let flagged: Vec<_> = rows.iter().filter(|r| r["status"] == "condition_a").collect();
    assert_eq!(flagged.len(), 1);
    assert!((f(flagged[0], "k") - PI).abs() < 1e-12);
    assert!(f(flagged[0], "sigma_min") < 1e-10);
    assert!(flagged[0]["s_0_0_re"].is_empty());
    assert_eq!(rows.iter().filter(|r| r["status"] == "ok").count(), 2);
}

#[test]
fn smatrix_flags_degenerate_rows() {
    let out = run(&["smatrix", &data("ring.json"), "--k", &PI.to_string()]);
    assert!(out.status.success());
    let row = &csv_rows(&stdout(&out))[0];
    assert_eq!(row["status"], "degenerate");
    assert!(!row["sigma_min"].is_empty());
}

#[test]
fn bad_links_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let y = data("y_graph.json");
    let cases = [
        (r#"{"links": [{"a": {"graph": 0, "ray": 7}, "b": {"graph": 1, "ray": 0}, "length": 1.0}]}"#, "links[0].a.ray"),
        (r#"{"links": [{"a": {"graph": 0, "ray": 0}, "b": {"graph": 2, "ray": 0}, "length": 1.0}]}"#, "links[0].b.graph"),
        (r#"{"links": [{"a": {"graph": 0, "ray": 0}, "b": {"graph": 1, "ray": 0}, "length": -1.0}]}"#, "links[0].length"),
        (r#"{"links": [{"a": {"graph": 0, "ray": 0}, "b": {"graph": 0, "ray": 0}, "length": 1.0}]}"#, "linked twice"),
        (r#"{"links": [{"a": {"graph": 0, "ray": 0}, "b": {"graph": 1, "ray": 0}, "length": 1.0, "x": 1}]}"#, "unknown field `x`"),
    ];
    for (body, needle) in cases {
        let links = links_file(&dir, body);
        let out = run(&["compose", &y, &y, "--links", &links, "--k", "1"]);
        assert_eq!(out.status.code(), Some(2), "{body}");
        assert!(stderr(&out).contains(needle), "{}", stderr(&out));
    }
}

#[test]
fn compare_ring_and_triangle() {
    for graph in ["ring.json", "triangle.json"] {
        let out = run(&["compare", &data(graph), "--k-min", "0.5", "--k-max", "3", "--steps", "50"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let rows = csv_rows(&stdout(&out));
        assert_eq!(rows.len(), 50);
        for r in &rows {
            assert_eq!((r["direct"].as_str(), r["composed"].as_str()), ("ok", "ok"));
            assert!(f(r, "deviation") < 1e-8);
        }
    }
}

#[test]
fn compare_exits_1_above_tolerance() {
    let out = run(&["compare", &data("triangle.json"), "--k-min", "0.5", "--k-max", "3", "--steps", "5", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(csv_rows(&stdout(&out)).len(), 5);
    assert!(stderr(&out).contains("exceeds tolerance"));
}

#[test]
fn compare_refuses_potential_across_cut() {
    let out = run(&["compare", &data("potential_full_edge.json"), "--k", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("cut point"));
    let out = run(&["embedded", &data("potential_full_edge.json"), "--k", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

fn embedded_ks(graph: &str) -> Vec<(f64, usize)> {
    let out = run(&["embedded", &data(graph), "--k-min", "0.5", "--k-max", "7", "--steps", "200", "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["k"].as_f64().unwrap(), r["kernel_dimension"].as_u64().unwrap() as usize))
        .collect()
}

#[test]
fn embedded_reports() {
    let ring = embedded_ks("ring.json");
    assert_eq!(ring.len(), 2);
    for ((k, dim), target) in ring.iter().zip([PI, 2.0 * PI]) {
        assert!((k - target).abs() < 1e-6 && *dim >= 1);
    }
    assert!(embedded_ks("y_graph.json").is_empty());
    let edge = embedded_ks("dirichlet_edge.json");
    assert_eq!(edge.len(), 4);
    for (j, (k, dim)) in edge.iter().enumerate() {
        assert!((k - (j + 1) as f64 * PI / 2.0).abs() < 1e-6 && *dim >= 1);
    }
}

/// Every number in a CSV table, row-major, empty cells as `None`.
fn csv_numbers(text: &str, skip: &[&str]) -> Vec<Option<f64>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let mut out = Vec::new();
    for line in lines {
        for (name, cell) in header.iter().zip(line.split(',')) {
            if !skip.contains(name) {
                out.push(if cell.is_empty() { None } else { Some(cell.parse().unwrap()) });
            }
        }
    }
    out
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let sweep = ["--k-min", "2.9", "--k-max", "3.4", "--steps", "7"];
    let args: Vec<Vec<String>> = vec![
        ["smatrix", &data("triangle.json")].iter().map(|s| s.to_string()).collect(),
        ["compose", &data("y_graph.json"), &data("y_graph.json"), "--links", &data("links_two_y.json")]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    ];
    for base in args {
        let mut a: Vec<&str> = base.iter().map(String::as_str).collect();
        a.extend(sweep);
        let csv = stdout(&run(&a));
        a.extend(["--format", "json"]);
        let doc: Value = serde_json::from_str(&stdout(&run(&a))).unwrap();
        let size = doc["size"].as_u64().unwrap() as usize;
        let mut from_json = Vec::new();
        for row in doc["rows"].as_array().unwrap() {
            from_json.push(row["k"].as_f64());
            from_json.push(row["sigma_min"].as_f64());
            for i in 0..size {
                for j in 0..size {
                    from_json.push(row["s"][i][j][0].as_f64());
                    from_json.push(row["s"][i][j][1].as_f64());
                }
            }
            from_json.push(row["unitarity_residual"].as_f64());
        }
        assert_eq!(csv_numbers(&csv, &["status"]), from_json);
    }

    let csv = stdout(&run(&["embedded", &data("dirichlet_edge.json"), "--k-min", "0.5", "--k-max", "7", "--steps", "200"]));
    let json = stdout(&run(&["embedded", &data("dirichlet_edge.json"), "--k-min", "0.5", "--k-max", "7", "--steps", "200", "--format", "json"]));
    let doc: Value = serde_json::from_str(&json).unwrap();
    let from_json: Vec<Option<f64>> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| ["k", "sigma_min", "kernel_dimension", "kernel_sigma"].map(|key| r[key].as_f64()))
        .collect();
    assert_eq!(csv_numbers(&csv, &[]), from_json);
}

#[test]
fn output_is_deterministic_and_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let args = ["compare", &data("triangle.json"), "--k-min", "0.5", "--k-max", "6", "--steps", "64", "--format", "json"];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    let out = run(&with_file);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), a);
    let ks: Vec<f64> = serde_json::from_str::<Value>(&a).unwrap()["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["k"].as_f64().unwrap())
        .collect();
    assert!(ks.windows(2).all(|w| w[0] < w[1]));
}
