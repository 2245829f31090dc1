use std::fs;
use std::path::Path;

use interlace_core::{solver::verify_protocol, BooleanMatrix};
use interlace_lab::cli::main_with;
use interlace_lab::formats::{matrix_to_string, parse_certificate, read_matrix};

fn run(args: &[&str]) -> (u8, String) {
    let mut out = Vec::new();
    let code = main_with(
        std::iter::once("interlace-lab").chain(args.iter().copied()),
        &mut out,
    );
    (code, String::from_utf8(out).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn phi_file(dir: &Path) -> String {
    write(dir, "phi.txt", &matrix_to_string(&BooleanMatrix::phi()))
}

#[test]
fn solve_phi_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let m = phi_file(dir.path());
    let cert = dir.path().join("phi.cert");
    let (code, out) = run(&["solve", "--matrix", &m, "--cert", cert.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().any(|l| l == "D 1"), "{out}");
    let tree = parse_certificate(&fs::read_to_string(&cert).unwrap()).unwrap();
    let mat = read_matrix(&fs::read_to_string(&m).unwrap()).unwrap();
    assert!(verify_protocol(&mat, &tree).unwrap());
}

#[test]
fn decide_below_value_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let m = phi_file(dir.path());
    let (code, out) = run(&["solve", "--matrix", &m, "--budget", "0"]);
    assert_eq!(code, 1);
    assert!(out.contains("DECIDE 0 false"), "{out}");
}

#[test]
fn hard_seed_lemma_line() {
    let dir = tempfile::tempdir().unwrap();
    let m = phi_file(dir.path());
    let (code, out) = run(&[
        "verify-lemma",
        "--name",
        "hard_seed",
        "--matrix",
        &m,
        "--params",
        "p=2,x=1,y=1",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(
        out.lines().any(|l| l == "LEMMA hard_seed pass 2 2"),
        "{out}"
    );
}

#[test]
fn unknown_lemma_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = phi_file(dir.path());
    let (code, _) = run(&["verify-lemma", "--name", "nope", "--matrix", &m]);
    assert_eq!(code, 2);
}

#[test]
fn overloaded_coordinate_is_immediate_no() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(
        dir.path(),
        "five.vbp",
        "5 4 4\n1000\n1000\n1000\n1000\n1100\n",
    );
    let (code, out) = run(&["reduce", "--instance", &inst]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().any(|l| l == "IMMEDIATE_NO coord=1"), "{out}");
}

#[test]
fn toy_reduction_reports_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "toy.vbp", "4 4 4\n1000\n1100\n0010\n0000\n");
    let (code, out) = run(&["reduce", "--instance", &inst, "--toy"]);
    assert_eq!(code, 0, "{out}");
    // triplicated and padded to d = 16: |R4| = 4·|C2| + 12, |C4| = 32·|R2|^4
    assert!(out.lines().any(|l| l == "REDUCE 262156 536870912"), "{out}");
}

#[test]
fn oversized_provenance_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "toy.vbp", "4 4 4\n1000\n1100\n0010\n0000\n");
    let prov = dir.path().join("prov.tsv");
    let (code, out) = run(&[
        "reduce",
        "--instance",
        &inst,
        "--toy",
        "--provenance",
        prov.to_str().unwrap(),
    ]);
    assert_eq!(code, 3, "{out}");
    assert!(out.contains("budget"), "{out}");
}

#[test]
fn node_cap_exhaustion_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let m3 = interlace_core::interlace::k_fold_interlace(&BooleanMatrix::phi(), 3).unwrap();
    let m = write(dir.path(), "phi3.txt", &matrix_to_string(&m3));
    let (code, out) = run(&["solve", "--matrix", &m, "--node-cap", "1"]);
    assert_eq!(code, 3, "{out}");
}

#[test]
fn cell_budget_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "toy.vbp", "4 4 4\n1000\n1100\n0010\n0000\n");
    let out_path = dir.path().join("m4.txt");
    let (code, out) = run(&[
        "reduce",
        "--instance",
        &inst,
        "--toy",
        "--out",
        out_path.to_str().unwrap(),
        "--cell-budget",
        "10",
    ]);
    assert_eq!(code, 3, "{out}");
}

#[test]
fn corrupt_matrix_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "bad.txt", "1 2\nR (1 1)\nC 1 2\n1x\n");
    let (code, out) = run(&["solve", "--matrix", &m]);
    assert_eq!(code, 2);
    assert!(out.contains("bad.txt"), "{out}");
    assert!(out.contains("line 4"), "{out}");
}

#[test]
fn missing_file_is_reported() {
    let (code, out) = run(&["solve", "--matrix", "/nonexistent/m.txt"]);
    assert_eq!(code, 2);
    assert!(out.contains("/nonexistent/m.txt"), "{out}");
}

#[test]
fn reservoir_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.res");
    let b = dir.path().join("b.res");
    for p in [&a, &b] {
        let (code, out) = run(&[
            "balanced-set",
            "--q",
            "4",
            "--t",
            "2",
            "--p",
            "2",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{out}");
    }
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn gap_demo_classifies_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "toy.vbp", "4 4 4\n1000\n1100\n0010\n0000\n");
    let (code, out) = run(&[
        "gap-demo",
        "--instance",
        &inst,
        "--block",
        "2",
        "--dim",
        "2",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().any(|l| l.starts_with("CLASS phi^")), "{out}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["solve"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
}
