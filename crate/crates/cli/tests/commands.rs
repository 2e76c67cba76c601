use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn postman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_postman")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn gen_mcpp(dir: &Path, name: &str, n: usize, edges: usize, arcs: usize, seed: u64) -> std::path::PathBuf {
    let file = dir.join(name);
    let out = postman(&[
        "gen", "--kind", "mcpp", "--n", &n.to_string(), "--edges", &edges.to_string(), "--arcs",
        &arcs.to_string(), "--max-weight", "3", "--seed", &seed.to_string(), "-o", path(&file),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    file
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--kind", "bcpp", "--n", "6", "--edges", "8", "--p", "3", "--max-weight", "4", "--seed", "42"];
    let a = postman(&args);
    let b = postman(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mixed = ["gen", "--kind", "mcpp", "--n", "6", "--edges", "5", "--arcs", "3", "--max-weight", "3", "--seed", "42"];
    assert_eq!(postman(&mixed).stdout, postman(&mixed).stdout);
}

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_mcpp(dir.path(), "g.txt", 6, 5, 3, 7);
    let sol = dir.path().join("s.txt");
    let out = postman(&["solve", "--alg", "arcs", "-i", path(&inst), "-o", path(&sol), "--walk"]);
    assert_eq!(out.status.code(), Some(0));
    let out = postman(&["verify", "-i", path(&inst), "-s", path(&sol)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "valid\n");
}

#[test]
fn tampered_weight_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.txt");
    fs::write(&inst, "p mcpp 3 2 1\ne 1 2 1\ne 2 3 1\na 3 1 1\n").unwrap();
    let out = postman(&["solve", "-i", path(&inst)]);
    assert_eq!(stdout(&out), "s 3\nm 1 2 1\nm 2 3 1\nm 3 1 1\n");
    let sol = dir.path().join("s.txt");
    fs::write(&sol, "s 4\nm 1 2 1\nm 2 3 1\nm 3 1 1\n").unwrap();
    assert_eq!(postman(&["verify", "-i", path(&inst), "-s", path(&sol)]).status.code(), Some(1));
}

#[test]
fn oracle_and_arcs_agree() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..12 {
        let inst = gen_mcpp(dir.path(), &format!("g{seed}.txt"), 5, 4, 3, seed);
        let arcs = postman(&["solve", "--alg", "arcs", "-i", path(&inst)]);
        let oracle = postman(&["solve", "--alg", "oracle", "-i", path(&inst)]);
        assert_eq!(arcs.status.code(), Some(0));
        assert_eq!(oracle.status.code(), Some(0));
        let weight = |o: &Output| stdout(o).lines().next().unwrap().to_string();
        assert_eq!(weight(&arcs), weight(&oracle), "seed {seed}");
    }
}

#[test]
fn balanced_instances() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("b.txt");
    // Two triangles joined at vertex 3; four units must cross it.
    fs::write(&inst, "p bcpp 5 6\ne 1 2 1\ne 2 3 1\ne 1 3 1\ne 3 4 2\ne 4 5 2\ne 3 5 2\nt 1 4\nt 5 -4\n").unwrap();
    let fast = postman(&["solve", "-i", path(&inst)]);
    let forced = postman(&["solve", "--force-dp", "-i", path(&inst)]);
    let oracle = postman(&["solve", "--alg", "oracle", "-i", path(&inst)]);
    assert_eq!(fast.status.code(), Some(0));
    let weight = |o: &Output| stdout(o).lines().next().unwrap().to_string();
    assert_eq!(weight(&fast), weight(&oracle));
    assert_eq!(weight(&forced), weight(&oracle));
    let sol = dir.path().join("s.txt");
    fs::write(&sol, stdout(&fast)).unwrap();
    assert_eq!(postman(&["verify", "-i", path(&inst), "-s", path(&sol)]).status.code(), Some(0));

    let dec = postman(&["decompose", "-i", path(&inst)]);
    assert_eq!(dec.status.code(), Some(0));
    let text = stdout(&dec);
    assert!(text.starts_with("cprime:"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("node ")));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "p bcpp 2 1\ne 1 2 1\nt 1 1\n").unwrap();
    assert_eq!(postman(&["solve", "-i", path(&bad)]).status.code(), Some(2));
    assert_eq!(postman(&["solve", "-i", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(postman(&["frobnicate"]).status.code(), Some(2));

    // Not strongly connected: infeasible.
    let stuck = dir.path().join("stuck.txt");
    fs::write(&stuck, "p mcpp 3 1 1\ne 1 2 1\na 2 3 1\n").unwrap();
    assert_eq!(postman(&["solve", "-i", path(&stuck)]).status.code(), Some(1));

    let inst = gen_mcpp(dir.path(), "g.txt", 6, 5, 1, 3);
    let out = postman(&["solve", "--alg", "edges", "--max-edges", "4", "-i", path(&inst)]);
    assert_eq!(out.status.code(), Some(3));
    let big = gen_mcpp(dir.path(), "big.txt", 8, 10, 2, 3);
    assert_eq!(postman(&["solve", "--alg", "oracle", "-i", path(&big)]).status.code(), Some(3));
}

#[test]
fn bench_suites_pass() {
    for suite in ["small", "duality", "decomp"] {
        let out = postman(&["bench", "--suite", suite, "--count", "30", "--jobs", "4"]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", stdout(&out));
        assert!(stdout(&out).contains("30 of 30 passed"));
    }
}
