//! End-to-end checks of the exit-code contract and file outputs.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fanplanar"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn complete_graph(nx: usize, ny: usize) -> String {
    let mut s = String::new();
    for i in 1..=nx {
        s.push_str(&format!("x a{i}\n"));
    }
    for j in 1..=ny {
        s.push_str(&format!("y b{j}\n"));
    }
    for i in 1..=nx {
        for j in 1..=ny {
            s.push_str(&format!("e a{i} b{j}\n"));
        }
    }
    s
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn decide_k35_is_early_reject_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k35.graph", &complete_graph(3, 5));
    let out = bin().args(["decide"]).arg(&g).arg("--json").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["answer"], "NO");
    assert_eq!(report["method"], "EARLY_REJECT");
    assert!(report["certificate"].is_null());
}

#[test]
fn decide_certificate_passes_verify() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k23.graph", &complete_graph(2, 3));
    let cert = dir.path().join("cert.json");
    let out = bin().args(["decide"]).arg(&g).arg("--certificate").arg(&cert).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(cert.exists());

    let out = bin().args(["verify"]).arg(&g).arg(&cert).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("fan-planar: true"));
}

#[test]
fn decide_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k23.graph", &complete_graph(2, 3));
    let svg = dir.path().join("cert.svg");
    let out = bin().args(["decide"]).arg(&g).arg("--svg").arg(&svg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let content = std::fs::read_to_string(&svg).unwrap();
    assert!(content.starts_with("<svg"));
    assert_eq!(content.matches("<circle").count(), 5);
}

#[test]
fn reduce_k25_prints_k22_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k25.graph", &complete_graph(2, 5));
    let trace = dir.path().join("trace.json");
    let out = bin().args(["reduce"]).arg(&g).arg("--trace").arg(&trace).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    // K_{2,2}: two X-vertices, two kept twins, four edges
    assert_eq!(text.lines().filter(|l| l.starts_with("e ")).count(), 4);
    assert_eq!(text.lines().filter(|l| l.starts_with("y ")).count(), 2);
    let tr: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(tr["steps"].as_array().unwrap().len(), 3);
}

#[test]
fn oracle_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let yes = write(dir.path(), "k23.graph", &complete_graph(2, 3));
    let no = write(dir.path(), "k35.graph", &complete_graph(3, 5));

    assert_eq!(bin().args(["oracle"]).arg(&yes).output().unwrap().status.code(), Some(0));
    assert_eq!(bin().args(["oracle"]).arg(&no).output().unwrap().status.code(), Some(1));
    // a one-node budget cannot finish K_{3,5}
    let out = bin().args(["oracle"]).arg(&no).args(["--max-nodes", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.graph", "x a\nz oops\n");
    let out = bin().args(["decide"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["decide"]).arg(dir.path().join("missing.graph")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_random_is_deterministic() {
    let a = bin().args(["gen", "--random", "2", "2", "3", "7"]).output().unwrap();
    let b = bin().args(["gen", "--random", "2", "2", "3", "7"]).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn gen_exhaustive_streams_all_graphs() {
    let out = bin().args(["gen", "--exhaustive", "1", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.matches("---").count(), 3); // 2^2 graphs, 3 separators
}

#[test]
fn decide_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k23.graph", &complete_graph(2, 3));
    for method in ["auto", "dp", "bf"] {
        let out = bin().args(["decide"]).arg(&g).args(["--method", method]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "method {method}");
    }
    let out = bin()
        .args(["decide"])
        .arg(&g)
        .args(["--method", "bf", "--reduce-first"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
