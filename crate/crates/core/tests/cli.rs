use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

use nullcore::classes::enumerate_class;
use nullcore::field::{irreducible_cubics, FieldSpec};
use nullcore::graph::{build_gamma, parse_edge_csv};

fn nullcore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nullcore")).args(args).env_remove("NULLCORE_BUDGET").output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_set(dir: &Path, name: &str, doc: Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, doc.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

/// `C = companion(x^3 + x + 1)` over `F_2` and the first-row family `E_{C, e1}`.
fn q2_family() -> (Vec<u32>, Vec<Vec<u32>>) {
    let f = FieldSpec::gf(2).unwrap();
    let inv = enumerate_class(&irreducible_cubics(&f)[0]).unwrap();
    let c = inv.companion();
    let fam = inv.e_set(&c, &[1, 0, 0]).unwrap().iter().map(|b| b.codes().to_vec()).collect();
    (c.codes().to_vec(), fam)
}

#[test]
fn core_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (c, fam) = q2_family();
    assert_eq!(fam.len(), 4);

    let path = write_set(dir.path(), "family.json", json!({ "q": 2, "m": [1, 1, 0, 1], "set": fam }));
    let out = nullcore(&["core-check", "--set", &path]);
    assert_eq!(out.status.code(), Some(3));
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "non-core");
    assert_eq!(report["witness"]["kind"], "null-polynomial");
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));

    // {C, C^2, C^2 + C}
    let f = FieldSpec::gf(2).unwrap();
    let cm = nullcore::linalg::FMat::new(&f, 3, 3, c).unwrap();
    let c2 = &cm * &cm;
    let set: Vec<Vec<u32>> = [cm.clone(), c2.clone(), &c2 + &cm].iter().map(|m| m.codes().to_vec()).collect();
    let path = write_set(dir.path(), "triangle.json", json!({ "q": 2, "set": set }));
    let out = nullcore(&["core-check", "--set", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], "core");

    let path = write_set(dir.path(), "empty.json", json!({ "q": 2, "set": [] }));
    assert_eq!(nullcore(&["core-check", "--set", &path]).status.code(), Some(2));

    let path = write_set(dir.path(), "bad.json", json!({ "q": 2, "set": [[0, 1, 2, 0, 0, 0, 0, 0, 0]] }));
    assert_eq!(nullcore(&["core-check", "--set", &path]).status.code(), Some(2));

    let path = write_set(dir.path(), "mismatch.json", json!({ "q": 2, "set": set }));
    assert_eq!(nullcore(&["core-check", "--q", "3", "--set", &path]).status.code(), Some(2));

    std::fs::write(dir.path().join("junk.json"), "{not json").unwrap();
    let junk = dir.path().join("junk.json");
    assert_eq!(nullcore(&["core-check", "--set", junk.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_all_q2_passes() {
    let out = nullcore(&["verify", "--q", "2", "--campaign", "all", "--mode", "exhaustive"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["config"]["campaign"], "all");
    assert_eq!(report["q"], 2);
    assert!(report["claims"].as_array().unwrap().len() > 20);
}

#[test]
fn verify_budget_and_seed_rules() {
    assert_eq!(nullcore(&["verify", "--q", "5", "--campaign", "triples", "--mode", "exhaustive"]).status.code(), Some(4));
    assert_eq!(nullcore(&["verify", "--q", "3", "--campaign", "triples", "--mode", "randomized"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_nullcore"))
        .args(["verify", "--q", "2", "--campaign", "triples"])
        .env("NULLCORE_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(nullcore(&["verify", "--q", "6", "--campaign", "counts"]).status.code(), Some(2));
    assert_eq!(nullcore(&["verify", "--q", "2", "--m", "1,0,0,1", "--campaign", "counts"]).status.code(), Some(2));
    assert_eq!(nullcore(&["verify", "--q", "2", "--campaign", "nonsense"]).status.code(), Some(2));
}

#[test]
fn randomized_reports_are_deterministic() {
    let args = ["verify", "--q", "3", "--campaign", "triples", "--mode", "randomized", "--samples", "2000", "--seed", "7"];
    let (a, b) = (nullcore(&args), nullcore(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = stdout_json(&a);
    assert_eq!(report["config"]["seed"], 7);
    assert_eq!(report["m"], json!([1, 2, 0, 1]));
    let c = nullcore(&["verify", "--q", "3", "--campaign", "triples", "--mode", "randomized", "--samples", "2000", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn sample_subsets_q2() {
    let out = nullcore(&["sample-subsets", "--q", "2", "--sizes", "1,2,3,4,5", "--mode", "exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = stdout_json(&out)["rows"].as_array().unwrap().clone();
    let core: Vec<u64> = rows.iter().map(|r| r["core"].as_u64().unwrap()).collect();
    let checked: Vec<u64> = rows.iter().map(|r| r["checked"].as_u64().unwrap()).collect();
    assert_eq!(checked, [24, 276, 2024, 10626, 42504]);
    assert_eq!(core[..2], [0, 0]);
    assert!(0 < core[2] && core[2] < checked[2]);
    assert!(0 < core[3] && core[3] < checked[3]);
    assert_eq!(core[4], checked[4]);
}

#[test]
fn graph_exports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let out = nullcore(&["graph", "--q", "2", "--format", "edge-csv", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let bytes = std::fs::read(&csv).unwrap();
    assert_eq!(bytes.iter().filter(|&&b| b == b'\n').count(), 24);
    let f = FieldSpec::gf(2).unwrap();
    let g = build_gamma(&irreducible_cubics(&f)[0]).unwrap();
    assert_eq!(parse_edge_csv(&bytes, 24).unwrap(), g.adjacency());
    let again = nullcore(&["graph", "--q", "2", "--format", "edge-csv"]);
    assert_eq!(again.stdout, bytes);

    let dot = nullcore(&["graph", "--q", "2", "--format", "dot"]);
    let text = String::from_utf8(dot.stdout).unwrap();
    assert!(text.starts_with("graph gamma {\n"));
    assert_eq!(text.matches(" -- ").count(), 24);

    let summary = stdout_json(&nullcore(&["graph", "--q", "2"]));
    assert_eq!(summary["regular_degree"], 2);
    assert_eq!(summary["components"], 8);
}

#[test]
fn class_and_cubics_listing() {
    let out = nullcore(&["class", "--q", "2"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["size"], 24);
    assert_eq!(doc["members"].as_array().unwrap().len(), 24);
    let cubics = stdout_json(&nullcore(&["cubics", "--q", "2"]));
    assert_eq!(cubics["cubics"], json!([[1, 1, 0, 1], [1, 0, 1, 1]]));
}
