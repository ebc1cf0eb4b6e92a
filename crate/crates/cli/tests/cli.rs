//! Golden-file and exit-code tests driving every command, plus the
//! determinism criterion: repeated runs and different thread counts must
//! produce byte-identical JSON.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linkring"))
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).parent().unwrap().parent().unwrap().to_path_buf()
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .current_dir(workspace_root())
        .env_remove("LINKRING_MAX_COSETS")
        .env_remove("LINKRING_NODE_CAP")
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(workspace_root().join("golden").join(name))
        .unwrap_or_else(|e| panic!("golden file {name}: {e}"))
}

fn assert_golden(args: &[&str], name: &str) {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout, golden(name), "{args:?} drifted from golden/{name}");
}

#[test]
fn golden_enumerate() {
    assert_golden(
        &["enumerate", "--pres", "fixtures/L_S4.txt", "--sub", "s,t"],
        "enumerate_L_S4_st.json",
    );
    // index 4, as the stabilizer indices demand
    let v: serde_json::Value = serde_json::from_str(&golden("enumerate_L_S4_st.json")).unwrap();
    assert_eq!(v["index"], 4);
}

#[test]
fn golden_lowindex_s4() {
    assert_golden(
        &["lowindex", "--amalgam", "S4", "--index", "6", "--exact", "--lr-filter"],
        "lowindex_S4_index6_lr.json",
    );
    let v: serde_json::Value = serde_json::from_str(&golden("lowindex_S4_index6_lr.json")).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);
    assert_eq!(v["classes"][0]["orbit_counts"]["vertex"], 1);
    assert_eq!(v["classes"][0]["orbit_counts"]["arc"], 2);
    assert_eq!(v["classes"][0]["orbit_counts"]["edge"], 2);
}

#[test]
fn golden_amalgam_validate() {
    assert_golden(&["amalgam", "validate", "--amalgam", "S4"], "amalgam_validate_S4.json");
}

#[test]
fn golden_graph_analyze() {
    assert_golden(
        &[
            "graph",
            "analyze",
            "fixtures/c5c7.g",
            "--gens",
            "fixtures/c5c7_dihedral.gens",
            "--all-decompositions",
            "--self-dual",
        ],
        "graph_analyze_c5c7.json",
    );
    let v: serde_json::Value = serde_json::from_str(&golden("graph_analyze_c5c7.json")).unwrap();
    assert_eq!(v["aut_order"], 140);
    assert_eq!(v["verdict"]["is_lr_group"], true);
    assert_eq!(v["decompositions"].as_array().unwrap().len(), 1);
    assert_eq!(v["self_dual"]["self_dual"], false);
}

#[test]
fn golden_build_completion() {
    assert_golden(
        &["graph", "build-completion", "--amalgam", "S4"],
        "graph_build_completion_S4.json",
    );
}

#[test]
fn golden_table1_all() {
    assert_golden(&["table1", "--all"], "table1_all.json");
    let v: serde_json::Value = serde_json::from_str(&golden("table1_all.json")).unwrap();
    assert_eq!(v["all_matched"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 6);
    // the 7AT row reports no maximal LR-subgroup, with the certificate
    let seven = &v["reports"][5];
    assert_eq!(seven["amalgam"], "7AT");
    assert!(seven["maximal"].is_null());
    assert_eq!(seven["seven_at"]["generation_index"], 1);
}

#[test]
fn exit_codes() {
    // usage errors
    assert_eq!(run(&["table1", "--amalgam", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["table1"]).status.code(), Some(2));
    assert_eq!(
        run(&["lowindex", "--amalgam", "S4", "--index", "65"]).status.code(),
        Some(2),
        "index cap is 64"
    );
    // parse errors
    assert_eq!(
        run(&["enumerate", "--pres", "fixtures/k5.g", "--sub", ""]).status.code(),
        Some(2),
        "a graph file is not a presentation"
    );
    // resource errors
    let seven = run(&["lowindex", "--amalgam", "7AT", "--index", "2"]);
    assert_eq!(seven.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&seven.stderr);
    assert!(msg.contains("infeasible"), "documented limitation named: {msg}");
    assert_eq!(
        run(&["enumerate", "--pres", "fixtures/L_S4.txt", "--sub", "s,t", "--max-cosets", "1"])
            .status
            .code(),
        Some(3)
    );
    // success paths
    assert_eq!(run(&["table1", "--amalgam", "S4"]).status.code(), Some(0));
    assert_eq!(run(&["amalgam", "validate", "--all"]).status.code(), Some(0));
}

#[test]
fn text_format_renders() {
    let out = run(&["table1", "--amalgam", "7AT", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("NONE"), "{text}");
    let out = run(&["amalgam", "validate", "--amalgam", "4AT", "--format", "text"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("|L| = 432"));
}

#[test]
fn criterion_9_determinism_across_runs_and_threads() {
    let first = run(&["table1", "--all"]);
    assert!(first.status.success());
    let second = run(&["table1", "--all"]);
    let threaded = run(&["table1", "--all", "--threads", "8"]);
    assert!(second.status.success() && threaded.status.success());
    assert_eq!(first.stdout, second.stdout, "repeated runs byte-identical");
    assert_eq!(first.stdout, threaded.stdout, "thread count does not change the bytes");
    println!("criterion 9 (byte-identical reports across runs and thread counts): PASS");
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join("linkring-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&["table1", "--amalgam", "S4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.contains("\"all_matched\": true"));
    std::fs::remove_file(&path).ok();
}
