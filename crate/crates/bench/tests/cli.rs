use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_er-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_run_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let (g, s, r) = (dir.path().join("g.txt"), dir.path().join("s.txt"), dir.path().join("r.jsonl"));
    let out = bench(&[
        "gen", "erdos-renyi", "--n", "32", "--m", "64", "--ops", "80", "--seed", "4",
        "--graph-out", p(&g), "--stream-out", p(&s),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(&g).unwrap().starts_with("32 64\n"));
    assert_eq!(fs::read_to_string(&s).unwrap().lines().count(), 80);

    let out = bench(&["run", p(&g), p(&s), "--oracle", "exact", "--seed", "1", "--report", p(&r)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(&r).unwrap();
    assert_eq!(report.lines().count(), 81);
    let summary: serde_json::Value = serde_json::from_str(report.lines().last().unwrap()).unwrap();
    assert_eq!(summary["event"], "summary");
    assert_eq!(summary["events"], 80);
    let answered = summary["answered"].as_u64().unwrap();
    let within = summary["within_eps"].as_u64().unwrap();
    assert!(within * 100 >= 95 * answered);
    assert!(summary["time_ns"]["query"].is_u64());
    assert_eq!(summary["digest"].as_str().unwrap().len(), 64);
}

#[test]
fn run_digest_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (g, s) = (dir.path().join("g.txt"), dir.path().join("s.txt"));
    fs::write(&g, "6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n").unwrap();
    fs::write(&s, "Q 0 3\nI 0 3\nQ 0 3\nD 3 0\nQ 1 4\n").unwrap();
    let digest = || {
        let out = bench(&["run", p(&g), p(&s), "--seed", "9"]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        let summary: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
        summary["digest"].as_str().unwrap().to_string()
    };
    assert_eq!(digest(), digest());
}

#[test]
fn sketch_writes_weighted_edges() {
    let dir = tempfile::tempdir().unwrap();
    let (g, t) = (dir.path().join("g.txt"), dir.path().join("t.txt"));
    fs::write(&g, "4 3\n0 1\n1 2\n2 3\n").unwrap();
    fs::write(&t, "# ends of the path\n0\n3\n").unwrap();
    let out = bench(&["sketch", p(&g), p(&t), "--seed", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("4 1"));
    let fields: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    assert_eq!(&fields[..2], &["0", "3"]);
    // the path reduces to one edge of conductance 1/3
    let w: f64 = fields[2].parse().unwrap();
    assert!((w - 1.0 / 3.0).abs() < 0.1, "{w}");
}

#[test]
fn errors_name_the_offending_line() {
    let dir = tempfile::tempdir().unwrap();
    let (g, s) = (dir.path().join("g.txt"), dir.path().join("s.txt"));
    fs::write(&g, "3 2\n0 1\n1 2\n").unwrap();

    fs::write(&s, "Q 0 2\nD 0 2\n").unwrap();
    let out = bench(&["run", p(&g), p(&s)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    fs::write(&s, "Q 0 2\nX 0 1\n").unwrap();
    let out = bench(&["run", p(&g), p(&s)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    fs::write(&g, "3 2\n0 1\n1 1\n").unwrap();
    let out = bench(&["run", p(&g), p(&s)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn gen_rejects_infeasible_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let (g, s) = (dir.path().join("g.txt"), dir.path().join("s.txt"));
    let out = bench(&["gen", "ring", "--n", "2", "--graph-out", p(&g), "--stream-out", p(&s)]);
    assert!(!out.status.success());
    let out = bench(&["gen", "torus", "--n", "9", "--graph-out", p(&g), "--stream-out", p(&s)]);
    assert!(!out.status.success());
}
