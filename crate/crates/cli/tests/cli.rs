use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qpmut"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: Option<&str>) -> String {
    let out = run(args, stdin);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn invariants(qp: &str) -> Value {
    json(&ok(&["invariants", "--input", "-", "--kind", "none"], Some(qp)))
}

#[test]
fn gen_families() {
    let s11 = json(&ok(&["gen", "--family", "surface", "--g", "1", "--b", "1"], None));
    assert_eq!(s11["n"], 4);
    let q333 = json(&ok(&["gen", "--family", "pqr", "--p", "3", "--q", "3", "--r", "3"], None));
    assert_eq!(q333["n"], 8);
    let a2 = json(&ok(&["gen", "--family", "disc", "--points", "5"], None));
    assert_eq!(a2["n"], 2);
    let x6 = json(&ok(&["gen", "--family", "x6"], None));
    assert_eq!(x6["arrows"].as_array().unwrap().len(), 9);
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--family", "surface", "--g", "1", "--b", "2"];
    assert_eq!(ok(&args, None), ok(&args, None));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["gen", "--family", "surface", "--g", "0", "--b", "1"], None).status.code(), Some(1));
    assert_eq!(run(&["gen", "--family", "pqr", "--p", "3"], None).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(run(&["mutate", "--input", "/nonexistent.json", "--at", "0"], None).status.code(), Some(1));
    assert_eq!(run(&["verify-paper", "--only", "nope"], None).status.code(), Some(1));
    assert_eq!(run(&["--help"], None).status.code(), Some(0));
}

#[test]
fn degenerate_mutation_exits_with_two() {
    let triangle = r#"{"n":3,"arrows":[{"id":"a","source":0,"target":1},{"id":"b","source":1,"target":2},{"id":"c","source":2,"target":0}],"potential":[]}"#;
    let out = run(&["mutate", "--input", "-", "--at", "0"], Some(triangle));
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn double_mutation_restores_the_structural_key() {
    let seed = ok(&["gen", "--family", "pqr", "--p", "2", "--q", "4", "--r", "4"], None);
    for k in ["0", "3", "6"] {
        let once = ok(&["mutate", "--input", "-", "--at", k], Some(&seed));
        let twice = ok(&["mutate", "--input", "-", "--at", k], Some(&once));
        assert_eq!(invariants(&twice)["structural_key"], invariants(&seed)["structural_key"]);
    }
}

#[test]
fn torus_with_one_boundary_is_mutation_invariant() {
    let seed = ok(&["gen", "--family", "surface", "--g", "1", "--b", "1"], None);
    for k in 0..4 {
        let m = ok(&["mutate", "--input", "-", "--at", &k.to_string()], Some(&seed));
        assert_eq!(invariants(&m)["quiver_key"], invariants(&seed)["quiver_key"]);
    }
}

#[test]
fn trace_lists_premutation_and_steps() {
    let seed = ok(&["gen", "--family", "surface", "--g", "0", "--b", "3"], None);
    let t = json(&ok(&["mutate", "--input", "-", "--at", "0", "--trace"], Some(&seed)));
    assert!(t["premutated"]["arrows"].is_array());
    assert!(t["substitutions"].is_array());
    assert_eq!(t["result"]["n"], 6);
}

#[test]
fn star_mutation_doubles_the_determinant() {
    let seed = ok(&["gen", "--family", "pqr", "--p", "2", "--q", "3", "--r", "6"], None);
    let before = json(&ok(&["invariants", "--input", "-", "--kind", "jacobian"], Some(&seed)));
    assert_eq!(before["jacobian"]["cartan_det"], 4);
    // vertex r-2 = 4 on the third arm sits at index 2 + 1 + 2 + 3
    let m = ok(&["mutate", "--input", "-", "--at", "8"], Some(&seed));
    let after = json(&ok(&["invariants", "--input", "-", "--kind", "jacobian"], Some(&m)));
    assert_eq!(after["jacobian"]["cartan_det"], 8);
}

#[test]
fn enumeration_is_thread_independent() {
    let seed = ok(&["gen", "--family", "surface", "--g", "1", "--b", "2"], None);
    let one = ok(&["enumerate", "--input", "-", "--threads", "1"], Some(&seed));
    let four = ok(&["enumerate", "--input", "-", "--threads", "4"], Some(&seed));
    assert_eq!(one, four);
    let report = json(&one);
    assert_eq!(report["stats"]["size"], 56);
    assert_eq!(report["verdicts"]["delta2"]["status"], "verified");
}

#[test]
fn enumerate_writes_dot_and_out() {
    let dir = std::env::temp_dir().join(format!("qpmut-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let dot = dir.join("x6.dot");
    let out = dir.join("x6.json");
    let seed = ok(&["gen", "--family", "x6"], None);
    ok(
        &["enumerate", "--input", "-", "--dot", dot.to_str().unwrap(), "--out", out.to_str().unwrap()],
        Some(&seed),
    );
    let graph = std::fs::read_to_string(&dot).unwrap();
    assert!(graph.starts_with("graph"));
    assert_eq!(graph.matches("[label=\"").count() - graph.matches(" -- ").count(), 5);
    let report = json(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(report["stats"]["size"], 5);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn delta_on_the_a3_disc_refutes() {
    let seed = ok(&["gen", "--family", "disc", "--points", "6"], None);
    let d = json(&ok(&["delta", "--input", "-"], Some(&seed)));
    assert_eq!(d["verdicts"]["delta2"]["status"], "refuted");
    assert_eq!(d["stats"]["size"], 4);
}

#[test]
fn verify_paper_selects_suites() {
    let out = ok(&["verify-paper", "--only", "exceptional", "--threads", "2"], None);
    assert!(out.contains("[PASS]  7") && out.contains("[PASS]  8") && out.contains("[PASS]  9"));
    assert!(!out.contains("]  1 ") && !out.contains("] 10 "));
    let only = ok(&["verify-paper", "--only", "5"], None);
    assert!(only.contains("1 of 1 checks passed"));
}
