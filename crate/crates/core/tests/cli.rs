use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use reserve_core::experiment::similarity_of;
use reserve_core::io::read_json;
use reserve_core::{CountsGrid, ReserveSolution};

fn reserve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reserve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = reserve(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn generate(dir: &Path, seed: &str) {
    ok(&["generate", "--seed", seed, "--pool-size", "300", "--out", p(dir)]);
}

#[test]
fn generate_simulate_solve_render_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, "5");
    for name in ["suite", "observed", "case1", "case6"] {
        assert!(d.join(format!("{name}.json")).is_file(), "{name}.json missing");
    }
    let observed: CountsGrid = read_json(&d.join("observed.json")).unwrap();
    assert_eq!((observed.n(), observed.species()), (10, 8));

    ok(&["simulate", "--counts", p(&d.join("observed.json")), "--round", "--out", p(&d.join("sim.json"))]);
    let sim: CountsGrid = read_json(&d.join("sim.json")).unwrap();
    assert_eq!((sim.n(), sim.species()), (10, 8));

    for (counts, model) in [("observed.json", "m1.json"), ("sim.json", "m2.json")] {
        let stdout = ok(&[
            "solve",
            "--counts",
            p(&d.join(counts)),
            "--species",
            "2,3",
            "--budget",
            "30",
            "--out",
            p(&d.join(model)),
        ]);
        assert!(stdout.starts_with("protected 30 of 100 parcels"), "{stdout}");
    }

    let stdout = ok(&[
        "render",
        "--model1",
        p(&d.join("m1.json")),
        "--counts1",
        p(&d.join("observed.json")),
        "--model2",
        p(&d.join("m2.json")),
        "--counts2",
        p(&d.join("sim.json")),
        "--species",
        "2,3",
        "--out",
        p(&d.join("pair.svg")),
    ]);
    let m1: ReserveSolution = read_json(&d.join("m1.json")).unwrap();
    let m2: ReserveSolution = read_json(&d.join("m2.json")).unwrap();
    let same = similarity_of(&m1.x, &m2.x).unwrap();
    let caption = format!("{same}/100 parcels have the same protection status");
    assert_eq!(stdout.trim(), caption);

    let svg = fs::read_to_string(d.join("pair.svg")).unwrap();
    assert!(svg.starts_with("<?xml") || svg.starts_with("<svg"));
    assert_eq!(svg.matches("<rect class=\"cell\"").count(), 200);
    assert_eq!(svg.matches("<text class=\"count\"").count(), 400);
    assert!(svg.contains(&caption));
}

#[test]
fn sweep_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, "8");
    let stdout = ok(&["sweep", "--scenario", p(&d.join("case2.json")), "--out", p(&d.join("case2.csv"))]);
    assert!(stdout.starts_with("case2: min "), "{stdout}");
    let csv = fs::read_to_string(d.join("case2.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 22);
    assert_eq!(lines[0], "budget,similarity,objective1,objective2");
    assert!(lines[1].starts_with("0,100,0,0"));
    assert!(lines[21].starts_with("100,100,"));
    assert!(!csv.contains('\r'));

    ok(&[
        "sweep",
        "--scenario",
        p(&d.join("case2.json")),
        "--weights",
        "9/10,1/10",
        "--out",
        p(&d.join("case2w.csv")),
    ]);
    ok(&[
        "report",
        "--sweeps",
        p(&d.join("case2.csv")),
        p(&d.join("case2w.csv")),
        "--labels",
        "equal",
        "weighted",
        "--out",
        p(&d.join("table.csv")),
        "--series-out",
        p(&d.join("series.csv")),
    ]);
    let table = fs::read_to_string(d.join("table.csv")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "case,min,average,median");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("equal,"));
    let average = rows[1].split(',').nth(2).unwrap();
    assert_eq!(average.split('.').nth(1).map(str::len), Some(2), "{average}");

    let series = fs::read_to_string(d.join("series.csv")).unwrap();
    assert!(series.starts_with("budget,equal,weighted\n0,100,100\n"));
    assert_eq!(series.lines().count(), 22);
}

#[test]
fn zero_budget_protects_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, "3");
    ok(&["solve", "--counts", p(&d.join("observed.json")), "--budget", "0", "--out", p(&d.join("m.json"))]);
    let m: ReserveSolution = read_json(&d.join("m.json")).unwrap();
    assert_eq!(m.x.len(), 100);
    assert!(m.x.iter().all(|&x| !x));
    assert_eq!(m.spent, 0);
}

#[test]
fn solve_problem_file_with_each_solver() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.json");
    fs::write(
        &problem,
        r#"{"values": [[6, 5, 5]], "weights": [[1, 1]], "costs": [3, 2, 2], "budget": 4}"#,
    )
    .unwrap();
    for solver in ["auto", "dp", "bruteforce"] {
        let out = dir.path().join(format!("{solver}.json"));
        ok(&["solve", "--problem", p(&problem), "--solver", solver, "--out", p(&out)]);
        let text = fs::read_to_string(&out).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["x"], serde_json::json!([0, 1, 1]));
        assert_eq!(v["spent"], 4);
    }
    let out = reserve(&["solve", "--problem", p(&problem), "--solver", "topk", "--out", p(&dir.path().join("t.json"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    generate(a.path(), "13");
    generate(b.path(), "13");
    for name in ["suite.json", "observed.json", "case5.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    for d in [a.path(), b.path()] {
        ok(&["sweep", "--scenario", p(&d.join("case4.json")), "--out", p(&d.join("s.csv"))]);
    }
    assert_eq!(
        fs::read(a.path().join("s.csv")).unwrap(),
        fs::read(b.path().join("s.csv")).unwrap()
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(reserve(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(reserve(&["solve", "--budget", "3"]).status.code(), Some(2));
}

#[test]
fn malformed_input_names_file_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"n": 1, "species": 1, "counts": [["many"]]}"#).unwrap();
    let out = reserve(&["simulate", "--counts", p(&bad), "--out", p(&dir.path().join("o.json"))]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bad.json"), "{stderr}");
    assert!(stderr.contains("counts[0][0]"), "{stderr}");
    assert!(!dir.path().join("o.json").exists());

    let missing = reserve(&["simulate", "--counts", p(&dir.path().join("nope.json")), "--out", "o.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.json"));
}
