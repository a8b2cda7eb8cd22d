use std::fs;
use std::path::Path;
use std::process::Command;

use quiver_ci_cli::{run, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK};

const G1: &str = "vertex v1\nvertex v2\narrow v1 -> v2\narrow v1 -> v2\narrow v1 -> v2\narrow v2 -> v1\narrow v2 -> v1\n";
const C1: &str = "vertex v1\nvertex v2\narrow v1 -> v2\narrow v1 -> v2\narrow v2 -> v1\narrow v2 -> v1\n";

fn qv(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qv").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn file(dir: &Path, name: &str, contents: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn classify_g1_ci() {
    let dir = tempfile::tempdir().unwrap();
    let g1 = file(dir.path(), "g1.qv", G1);
    let (code, out, _) = qv(&["classify", &g1, "--ci"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("CI: false\n"), "{out}");
    assert!(out.contains("3 minimal generators vs F = 2"), "{out}");
}

#[test]
fn reduce_c1_trace() {
    let dir = tempfile::tempdir().unwrap();
    let c1 = file(dir.path(), "c1.qv", C1);
    let (code, out, _) = qv(&["reduce", &c1, "--trace"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "RIV(v1,v2)");
    assert!(lines[1].starts_with("RII(") && lines[1].ends_with(", 4 loops)"), "{out}");
    assert_eq!(lines[2], "terminal: point");
}

#[test]
fn reduce_writes_one_dot_file_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let c1 = file(dir.path(), "c1.qv", C1);
    let dots = dir.path().join("dots");
    let (code, _, _) = qv(&["reduce", &c1, "--dot", dots.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let mut names: Vec<String> = fs::read_dir(&dots)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["factor1_step001.dot", "factor1_step002.dot", "input.dot"]);
}

#[test]
fn cycles_of_a_five_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let src: String = (1..=5)
        .map(|i| format!("vertex v{i}\n"))
        .chain((1..=5).map(|i| format!("arrow v{i} -> v{}\n", i % 5 + 1)))
        .collect();
    let c5 = file(dir.path(), "cycle5.qv", &src);
    let (code, out, _) = qv(&["cycles", &c5]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "primitive cycles: 1, F(Q): 0\n");
}

#[test]
fn parse_errors_report_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = file(dir.path(), "bad.qv", "vertex v1\narrow v1 -> v9\n");
    let (code, _, err) = qv(&["parse", &bad]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("bad.qv:2:"), "{err}");
}

#[test]
fn flags_are_validated_first() {
    let (code, _, err) = qv(&["classify", "/does/not/exist.qv", "--descendants", "g7"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("unknown target"), "{err}");
    let (code, _, _) = qv(&["corpus", "--property", "no-such-property"]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn descendant_budget_gives_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let src = "vertex v1\nvertex v2\nvertex v3\nvertex v4\n\
               arrow v1 -> v2\narrow v2 -> v3\narrow v3 -> v4\narrow v4 -> v1\n\
               arrow v2 -> v1\narrow v3 -> v2\narrow v4 -> v3\narrow v1 -> v4\n\
               arrow v1 -> v3\narrow v3 -> v1\n";
    let q = file(dir.path(), "q.qv", src);
    let (code, out, _) = qv(&["descendants", &q, "--targets", "g2", "--budget", "2"]);
    assert_eq!(code, EXIT_INCONCLUSIVE, "{out}");
    let (code, out, _) = qv(&["descendants", &file(dir.path(), "c1.qv", C1)]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("descendant: none"), "{out}");
}

#[test]
fn json_output_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let g1 = file(dir.path(), "g1.qv", G1);
    let (_, a, _) = qv(&["generators", &g1, "--json"]);
    let (_, b, _) = qv(&["--json", "generators", &g1]);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["total"], 3);
    // multisets are sorted (arrow id, multiplicity) pairs
    let pair = &v["per_multiset"][0]["multiset"][0];
    assert!(pair[0].is_string() && pair[1].as_u64().unwrap() >= 1, "{pair}");
}

#[test]
fn glue_local_and_parse_agree_with_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let c1 = file(dir.path(), "c1.qv", C1);
    let (code, glued, _) = qv(&["glue", &c1, "--vertices", "v1,v2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(glued.lines().filter(|l| l.starts_with("arrow")).count(), 4);

    let loops = file(dir.path(), "loops.qv", "vertex v dim 2\narrow v -> v\narrow v -> v\n");
    let d = file(dir.path(), "eps.txt", "mult 1 dims v=1\nmult 1 dims v=1\n");
    let (code, local, err) = qv(&["local", &loops, "--decomposition", &d]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(local.lines().filter(|l| l.starts_with("vertex")).count(), 2);
    assert_eq!(local.lines().filter(|l| l.starts_with("arrow")).count(), 6);

    let (_, printed, _) = qv(&["parse", &c1]);
    let again = file(dir.path(), "again.qv", &printed);
    assert_eq!(qv(&["parse", &again]).1, printed);
}

#[test]
fn random_is_seeded() {
    let args = ["random", "--vertices", "4", "--arrows", "8", "--strongly-connected", "--seed", "11"];
    let (code, a, _) = qv(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(a, qv(&args).1);
    assert_ne!(a, qv(&["random", "--vertices", "4", "--arrows", "8", "--seed", "12"]).1);
}

#[test]
fn corpus_reports_and_saves_counterexamples() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let (code, out, _) = qv(&["corpus", "--property", "ci-agreement", "--seed", "0", "--count", "10", "--out", out_dir]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("PASS ci-agreement: 10 checked"), "{out}");

    // RIV does not preserve F = 0; seed 7 is such a case
    let (code, out, _) = qv(&["corpus", "--property", "reduction-invariance", "--seed", "7", "--count", "1", "--out", out_dir]);
    assert_eq!(code, EXIT_ERROR);
    assert!(out.contains("reproduce: qv corpus --property reduction-invariance --seed 7 --count 1"), "{out}");
    assert!(dir.path().join("reduction-invariance-seed7.qv").exists());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qv");
    let dir = tempfile::tempdir().unwrap();
    let c1 = file(dir.path(), "c1.qv", C1);
    let ok = Command::new(bin).args(["classify", &c1, "--coregular"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("coregular: false"));
    let bad = Command::new(bin).args(["classify", "/does/not/exist.qv"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}
