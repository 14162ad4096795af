use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn vbrsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vbrsched"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn admit_worked_instance() {
    let out = vbrsched(&["admit", &fixture("derived.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["displacement"], 2);
    assert_eq!(v["pair_count"], 2);
    assert_eq!(v["intervals_merged"], 1);
    assert_eq!(v["feasible"], true);
}

#[test]
fn admit_same_answer_from_every_algorithm() {
    for algo in ["naive", "morph", "oracle"] {
        let out = vbrsched(&["admit", &fixture("derived.json"), "--algorithm", algo]);
        assert_eq!(json(&out)["displacement"], 2, "{algo}");
    }
}

#[test]
fn admit_silent_stream_against_itself() {
    let f = fixture("zero.json");
    let out = vbrsched(&["admit", &f, "--committed", "quiet", "--requested", "quiet"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["displacement"], 0);
}

#[test]
fn admit_too_tall_exits_two() {
    let out = vbrsched(&["admit", &fixture("tall.json")]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["feasible"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn admit_bandwidth_override() {
    let out = vbrsched(&["admit", &fixture("tall.json"), "--bandwidth", "9"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["displacement"], 0);
}

#[test]
fn malformed_file_names_stream_and_line() {
    let out = vbrsched(&["admit", &fixture("bad.json")]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("\"broken\"") && err.contains("line 5"),
        "{err}"
    );
}

#[test]
fn usage_and_io_errors_exit_one() {
    assert_eq!(code(&vbrsched(&["admit"])), 1);
    assert_eq!(code(&vbrsched(&["frobnicate"])), 1);
    assert_eq!(code(&vbrsched(&["admit", "/nonexistent/file.json"])), 1);
    assert_eq!(code(&vbrsched(&["admit", "--help"])), 0);
}

#[test]
fn schedule_then_verify() {
    let out = vbrsched(&["schedule", &fixture("three.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["optimal"], true);
    assert_eq!(v["displacements"].as_array().unwrap().len(), 3);

    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("sched.json");
    std::fs::write(&sched, &out.stdout).unwrap();
    let ok = vbrsched(&[
        "verify",
        &fixture("three.json"),
        "--schedule",
        sched.to_str().unwrap(),
    ]);
    assert_eq!(code(&ok), 0);

    let bogus =
        r#"{"displacements": [0, 0, 0], "makespan": 6, "last_displacement": 0, "optimal": false}"#;
    std::fs::write(&sched, bogus).unwrap();
    let bad = vbrsched(&[
        "verify",
        &fixture("three.json"),
        "--schedule",
        sched.to_str().unwrap(),
    ]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn schedule_greedy_and_objective() {
    let f = fixture("three.json");
    let greedy = json(&vbrsched(&["schedule", &f, "--greedy", "--order", "0,1,2"]));
    assert_eq!(greedy["optimal"], false);
    assert_eq!(greedy["displacements"][0], 0);
    let exact = json(&vbrsched(&[
        "schedule",
        &f,
        "--objective",
        "last_displacement",
    ]));
    assert!(exact["last_displacement"].as_i64() <= greedy["last_displacement"].as_i64());
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let args = [
            "gen",
            "--peaks",
            "30",
            "--max-height",
            "9",
            "--max-len",
            "5",
            "--seed",
            "1",
            "-o",
        ];
        let out = vbrsched(&[&args[..], &[p.to_str().unwrap()]].concat());
        assert_eq!(code(&out), 0);
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    assert_eq!(code(&vbrsched(&["verify", a.to_str().unwrap()])), 0);
}

#[test]
fn gen_single_peak() {
    let out = vbrsched(&[
        "gen",
        "--peaks",
        "1",
        "--max-height",
        "4",
        "--max-len",
        "3",
        "--streams",
        "1",
    ]);
    let v = json(&out);
    assert_eq!(v["streams"][0]["peaks"].as_array().unwrap().len(), 1);
}

#[test]
fn bench_csv_rows() {
    let out = vbrsched(&[
        "bench",
        "--sizes",
        "10,20",
        "--trials",
        "2",
        "--regime",
        "adversarial",
    ]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,m,P,algo,displacement,micros"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 3);
    for r in rows {
        let n: usize = r[0].parse().unwrap();
        let p: usize = r[2].parse().unwrap();
        assert_eq!(p, n * n);
    }
}

#[test]
fn reduce_scp_no_solution() {
    let out = vbrsched(&["reduce-scp", &fixture("scp_none.json")]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert!(v["displacement"].as_i64() >= v["threshold"].as_i64());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no translation"));
}

#[test]
fn reduce_scp_recovers_translation() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("two.json");
    let out = vbrsched(&[
        "reduce-scp",
        &fixture("scp_shift.json"),
        "--emit",
        emitted.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["translation"], 1);
    let adm = vbrsched(&["admit", emitted.to_str().unwrap()]);
    assert_eq!(json(&adm)["displacement"], json(&out)["displacement"]);
}

#[test]
fn reduce_stringpack_matches_brute_force() {
    let out = vbrsched(&["reduce-stringpack", &fixture("pack.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["packing_length"], v["brute_force"]);
    assert_eq!(v["packing_length"], 6);
}

#[test]
fn reduce_coloring_star() {
    let out = vbrsched(&["reduce-coloring", &fixture("star.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["colors"], 2);
    assert_eq!(v["chromatic_number"], 2);
}

#[test]
fn reduce_coloring_short_flanks() {
    let out = vbrsched(&["reduce-coloring", &fixture("star.json"), "--l", "1"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("try l >="));
}

#[test]
fn verify_sa_ok() {
    let out = vbrsched(&["verify-sa", "--n", "3", "--l", "81"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok"));
    assert_eq!(code(&vbrsched(&["verify-sa", "--n", "1", "--l", "4"])), 1);
}

#[test]
fn scaled_input() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("dec.json");
    let text = r#"{"bandwidth": 2.5, "streams": [
        {"id": "a", "peaks": [[2.0, 0, 0.5], [0.5, 0.5, 2]]},
        {"id": "b", "peaks": [[1.0, 0, 0.5]]}]}"#;
    std::fs::write(&f, text).unwrap();
    let f = f.to_str().unwrap();
    let out = vbrsched(&["admit", f, "--time-scale", "2", "--rate-scale", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["displacement"], 1);
    assert_eq!(code(&vbrsched(&["admit", f])), 1);
}
