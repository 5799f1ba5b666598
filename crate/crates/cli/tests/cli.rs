// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

fn arithgame(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arithgame"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn generated_sklansky_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = arithgame(
        dir.path(),
        &[
            "gen", "--family", "sklansky", "--bits", "8", "--out", "a.pt",
        ],
    );
    assert!(o.status.success());
    let o = arithgame(dir.path(), &["verify", "--design", "a.pt", "--exhaustive"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["vectors"], 65536);
}

#[test]
fn every_family_round_trips_through_verilog() {
    let dir = tempfile::tempdir().unwrap();
    for family in ["sklansky", "brent-kung", "kogge-stone", "ripple"] {
        let o = arithgame(
            dir.path(),
            &["gen", "--family", family, "--bits", "16", "--out", "t.pt"],
        );
        assert!(o.status.success(), "{family}");
        let o = arithgame(
            dir.path(),
            &["emit-verilog", "--design", "t.pt", "--module", "add16"],
        );
        assert!(stdout(&o).starts_with("module add16 ("), "{family}");
        let o = arithgame(dir.path(), &["verify", "--design", "t.pt"]);
        assert!(o.status.success(), "{family}");
    }
}

#[test]
fn wallace_bundle_verifies_and_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let o = arithgame(
        dir.path(),
        &[
            "gen", "--family", "wallace", "--bits", "4", "--out", "w.json",
        ],
    );
    assert!(o.status.success());
    let o = arithgame(
        dir.path(),
        &["verify", "--design", "w.json", "--exhaustive"],
    );
    assert!(o.status.success());
    let o = arithgame(dir.path(), &["eval", "--design", "w.json", "--theoretical"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn pareto_keeps_an_antichain_in_the_front() {
    let dir = tempfile::tempdir().unwrap();
    let log = "{\"provenance\":{}}\n{\"delay\":1,\"area\":3}\n{\"delay\":2,\"area\":2}\n{\"delay\":3,\"area\":1}\n";
    std::fs::write(dir.path().join("run.jsonl"), log).unwrap();
    let o = arithgame(
        dir.path(),
        &["pareto", "--log", "run.jsonl", "--out", "front.csv"],
    );
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("front.csv")).unwrap();
    let front = csv.lines().filter(|l| l.starts_with("front,")).count();
    let all = csv.lines().filter(|l| l.starts_with("all,")).count();
    assert_eq!((front, all), (3, 3));
}

#[test]
fn pareto_drops_dominated_points() {
    let dir = tempfile::tempdir().unwrap();
    let log = "{\"delay\":1,\"area\":3}\n{\"delay\":2,\"area\":4}\n{\"delay\":3,\"area\":1}\n";
    std::fs::write(dir.path().join("run.jsonl"), log).unwrap();
    let o = arithgame(dir.path(), &["pareto", "--log", "run.jsonl"]);
    let csv = stdout(&o);
    assert!(csv.contains("front,0,1,3,,"));
    assert!(!csv.contains("front,1,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage error
    let o = arithgame(dir.path(), &["gen", "--bits", "8"]);
    assert_eq!(o.status.code(), Some(2));
    // runtime error
    let o = arithgame(dir.path(), &["verify", "--design", "missing.pt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    // a corrupted design file fails to load rather than verifying
    std::fs::write(dir.path().join("bad.pt"), "prefixtree v1 width=8\nzz\n").unwrap();
    let o = arithgame(dir.path(), &["verify", "--design", "bad.pt"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn external_evaluator_result_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    arithgame(
        dir.path(),
        &["gen", "--family", "ripple", "--bits", "8", "--out", "r.pt"],
    );
    let o = arithgame(
        dir.path(),
        &[
            "eval",
            "--design",
            "r.pt",
            "--external-cmd",
            "test -s {design} && echo delay=2.5 area=7",
            "--workdir",
            "wd",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["delay"], 2.5);
    assert_eq!(r["area"], 7.0);
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.json"),
        r#"{"family": "ripple", "bits": 4}"#,
    )
    .unwrap();
    let o = arithgame(dir.path(), &["--config", "c.json", "gen", "--bits", "8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("prefixtree v1 width=8"));
}

#[test]
fn searches_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let adder = [
        "optimize-adder",
        "--bits",
        "16",
        "--objective",
        "delay",
        "--steps",
        "60",
        "--seed",
        "7",
        "--log",
        "run.jsonl",
        "--out",
        "best.pt",
    ];
    let mult = [
        "optimize-multiplier",
        "--bits",
        "4",
        "--rounds",
        "2",
        "--compressor-steps",
        "120",
        "--prefix-steps",
        "15",
        "--seed",
        "3",
        "--log",
        "mult.jsonl",
        "--out",
        "mult.json",
        "--checkpoint",
        "ck.txt",
    ];
    let mut first = Vec::new();
    for pass in 0..2 {
        assert!(arithgame(dir.path(), &adder).status.success());
        assert!(arithgame(dir.path(), &mult).status.success());
        let files: Vec<Vec<u8>> = ["run.jsonl", "best.pt", "mult.jsonl", "mult.json", "ck.txt"]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
            .collect();
        if pass == 0 {
            first = files;
        } else {
            assert_eq!(first, files);
        }
    }
    let o = arithgame(
        dir.path(),
        &["verify", "--design", "mult.json", "--exhaustive"],
    );
    assert!(o.status.success());
}
