use std::path::{Path, PathBuf};
use std::process::Command;

use mcftree_cli::{read_records, RunRecord};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mcftree"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn solve_json(args: &[&str]) -> (Option<i32>, RunRecord) {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("run.json");
    let out = bin()
        .arg("solve")
        .args(args)
        .arg("--json")
        .arg(&json)
        .output()
        .unwrap();
    let text = std::fs::read_to_string(&json)
        .unwrap_or_else(|_| panic!("no record; stderr: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code(), serde_json::from_str(&text).unwrap())
}

#[test]
fn triangle_tree_is_five() {
    let tri = data("triangle.mcf");
    let (code, r) = solve_json(&["--formulation", "tree", "--tol", "1e-4", tri.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    assert_eq!(r.status, "optimal");
    assert!((r.objective.unwrap() - 5.0).abs() < 1e-9);
    assert!(r.gap.unwrap() <= 1e-4);
}

#[test]
fn edge_lp_matches_tree() {
    let tri = data("triangle_tight.mcf");
    let tri = tri.to_str().unwrap();
    let (_, tree) = solve_json(&["--formulation", "tree", "--tol", "1e-9", tri]);
    let (code, lp) = solve_json(&["--formulation", "edge-lp", tri]);
    assert_eq!(code, Some(0));
    assert!((tree.objective.unwrap() - lp.objective.unwrap()).abs() <= 1e-7 * lp.objective.unwrap());
    assert!((lp.objective.unwrap() - 6.0).abs() < 1e-9);
}

#[test]
fn timeout_exit_code_and_bounds() {
    let spec = "random:nodes=200,edges=800,commodities=3000,sources=40,seed=3,capacity=tight:0.3";
    let (code, r) = solve_json(&["--formulation", "path", "--timeout", "0.2", "--threads", "1", spec]);
    assert_eq!(code, Some(3));
    assert_eq!(r.status, "timeout");
    // a converged run brackets the optimum: ref LB <= opt <= ref UB
    let (_, reference) = solve_json(&["--formulation", "path", "--tol", "1e-6", spec]);
    assert_eq!(reference.status, "optimal");
    let (ref_lb, ref_ub) = (reference.lower_bound.unwrap(), reference.objective.unwrap());
    if let Some(lb) = r.lower_bound {
        assert!(lb <= ref_ub * (1.0 + 1e-9), "{lb} > {ref_ub}");
    }
    if let Some(ub) = r.objective {
        assert!(ub >= ref_lb * (1.0 - 1e-9), "{ub} < {ref_lb}");
    }
}

#[test]
fn infeasible_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("cut.mcf");
    std::fs::write(&f, "p mcf 2 1 1\na 1 2 1 1\nd 1 2 5\n").unwrap();
    for formulation in ["tree", "path", "edge-lp"] {
        let out = bin()
            .args(["solve", "--formulation", formulation])
            .arg(&f)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(4), "{formulation}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let tri = data("triangle.mcf");
    let bad_flag = bin().args(["solve", "--frobnicate"]).arg(&tri).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(2));
    let bad_choice = bin().args(["solve", "--formulation", "nope"]).arg(&tri).output().unwrap();
    assert_eq!(bad_choice.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.mcf");
    std::fs::write(&broken, "p mcf 2 1 1\na 1 9 1 1\nd 1 2 1\n").unwrap();
    let parse = bin().arg("solve").arg(&broken).output().unwrap();
    assert_eq!(parse.status.code(), Some(2));
}

#[test]
fn decomposition_dump_and_csv_append() {
    let dir = tempfile::tempdir().unwrap();
    let paths = dir.path().join("paths.txt");
    let csv = dir.path().join("runs.csv");
    for formulation in ["tree", "path"] {
        let out = bin()
            .args(["solve", "--formulation", formulation])
            .arg(data("triangle_tight.mcf"))
            .arg("--decompose-flows")
            .arg(&paths)
            .arg("--csv")
            .arg(&csv)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let dump = std::fs::read_to_string(&paths).unwrap();
        let mut lines: Vec<&str> = dump.lines().skip(1).collect();
        lines.sort();
        assert_eq!(lines, ["1 2 1 : 1 2", "1 3 1 : 1 2 3", "1 3 1 : 1 3"]);
    }
    let records = read_records(&csv).unwrap();
    assert_eq!(records.len(), 2);
    assert!(records.iter().all(|r| r.decompose_time_s.is_some()));
}

#[test]
fn export_lp_text() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("tri.lp");
    let out = bin()
        .args(["solve", "--formulation", "source-lp", "--export-lp"])
        .arg(&lp)
        .arg(data("triangle.mcf"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(lp).unwrap();
    assert!(text.contains("cap_2:") && text.contains("bal_0_0:"));
}

#[test]
fn bench_two_by_two() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("bench.toml");
    std::fs::write(
        &manifest,
        format!(
            "formulations = [\"tree\", \"path\"]\ntimeout = 30\n\n\
             [[instance]]\npath = \"{}\"\n\n\
             [[instance]]\npath = \"random:nodes=12,edges=40,commodities=10,sources=10,seed=4,max-demand=1\"\n\n\
             [[instance]]\npath = \"missing.mcf\"\n",
            data("triangle_tight.mcf").display()
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin().arg("bench").arg(&manifest).arg("--out").arg(&out_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.mcf"));

    let runs = read_records(&out_dir.join("runs.csv")).unwrap();
    assert_eq!(runs.len(), 4);
    assert!(runs.iter().all(|r| r.solved()));

    let profile = std::fs::read_to_string(out_dir.join("profile.csv")).unwrap();
    assert_eq!(profile.lines().next().unwrap(), "tau,tree,path");

    let cactus = std::fs::read_to_string(out_dir.join("cactus.csv")).unwrap();
    assert_eq!(cactus.lines().count(), 1 + 4);

    let mut scatter = csv::Reader::from_path(out_dir.join("scatter.csv")).unwrap();
    assert_eq!(scatter.records().count(), 2);
    let heat = std::fs::read_to_string(out_dir.join("heatmap.csv")).unwrap();
    assert!(heat.starts_with("instance,commodities,shared_source_fraction,speedup"));
    // unique sources: nothing is shared
    assert!(heat.lines().any(|l| l.starts_with("random-12-40-10-10-4,10,0.0,")));
}
