use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const A1: &str = "3\n13 -24 24\n-24 13 24\n24 24 13\n";

fn bmdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bmdist"))
        .args(args)
        .env_remove("BMDIST_LEDGER")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn field(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
        .trim()
        .parse()
        .unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn eval_witness_and_identity() {
    let dir = TempDir::new().unwrap();
    let a1 = write(&dir, "a1.txt", A1);
    let out = bmdist(&["eval", &a1, "--p", "1.7"]);
    assert!(out.status.success());
    assert!(field(&stdout(&out), "g ") <= 1.6967);
    assert_eq!(field(&stdout(&out), "det "), -47915.0);

    let id = write(&dir, "id.txt", "3\n1 0 0\n0 1 0\n0 0 1\n");
    let out = bmdist(&["eval", &id, "--p", "2"]);
    assert!(
        stdout(&out).contains("g       1.732050808"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let zeros = write(&dir, "z.txt", "3\n0 0 0\n0 0 0\n0 0 0\n");
    assert_eq!(bmdist(&["eval", &zeros, "--p", "2"]).status.code(), Some(3));
    let bad = write(&dir, "bad.txt", "3\n1 2\n");
    assert_eq!(bmdist(&["eval", &bad, "--p", "2"]).status.code(), Some(2));
    assert_eq!(bmdist(&["bound", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(bmdist(&["bound"]).status.code(), Some(2));
    assert_eq!(bmdist(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn bound_and_borsuk() {
    let out = stdout(&bmdist(&["bound", "--p", "1"]));
    assert!(
        out.contains("bound = 1.800000000") && out.contains("analytic-lp"),
        "{out}"
    );
    for inf in ["inf", "oo"] {
        let v = json(&bmdist(&["--json", "bound", "--p", inf]));
        assert_eq!(v["bound"]["value"], 1.0);
        assert_eq!(v["bound"]["method"], "exact");
    }
    let out = stdout(&bmdist(&["borsuk", "--p", "1"]));
    assert!(out.contains("piece diameter = 0.9000000000"), "{out}");
}

#[test]
fn certify_passes_and_matrix_mode_checks_threshold() {
    let out = bmdist(&["certify"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("PASS")).count(),
        8,
        "{text}"
    );

    let dir = TempDir::new().unwrap();
    let a1 = write(&dir, "a1.txt", A1);
    let ok = bmdist(&[
        "certify",
        "--matrix",
        &a1,
        "--p",
        "1.7",
        "--at-most",
        "1.6967",
    ]);
    assert!(ok.status.success());
    let tight = bmdist(&[
        "certify",
        "--matrix",
        &a1,
        "--p",
        "1.7",
        "--at-most",
        "1.6966",
    ]);
    assert_eq!(tight.status.code(), Some(4));
}

#[test]
fn sweep_csv_has_expected_columns() {
    let out = bmdist(&[
        "sweep",
        "--from",
        "1",
        "--to",
        "2",
        "--step",
        "0.5",
        "--with-inf",
    ]);
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        headers,
        ["p", "value", "method", "certified", "witness_digest"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() <= 1.8));
    assert_eq!(&rows[3][0], "inf");
}

#[test]
fn optimized_witness_reproduces_through_eval() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "cfg.toml",
        "restarts = 2\npso_iters = 100\nseed = 7\n",
    );
    let w = dir.path().join("w.txt");
    let out = bmdist(&[
        "--json",
        "optimize",
        "--p",
        "1.4",
        "--config",
        &cfg,
        "--witness-out",
        &w.to_string_lossy(),
    ]);
    assert!(out.status.success());
    let reported = json(&out)["bound"]["value"].as_f64().unwrap();
    let again = bmdist(&["--json", "eval", &w.to_string_lossy(), "--p", "1.4"]);
    let value = json(&again)["value"].as_f64().unwrap();
    assert!((value - reported).abs() <= 1e-9 * reported);
}

#[test]
fn table_single_row_and_crippled_budget() {
    let out = bmdist(&["table", "--p-list", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("p,value,method,certified,witness_digest,paper_value,gap"));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!((row[1].parse::<f64>().unwrap() - 1.73205).abs() < 5e-3);

    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "weak.toml", "pso_iters = 0\nrestarts = 1\n");
    let out = bmdist(&["table", "--config", &cfg, "--p-list", "1.2"]);
    assert_eq!(out.status.code(), Some(4));
}

fn ledger_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect()
}

#[test]
fn ledger_round_trip_and_tamper_detection() {
    let dir = TempDir::new().unwrap();
    let ledger = dir.path().join("runs.jsonl");
    let a1 = write(&dir, "a1.txt", A1);
    let run = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_bmdist"))
            .args(args)
            .env("BMDIST_LEDGER", &ledger)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    run(&["bound", "--p", "1.75"]);
    run(&["borsuk", "--p", "3"]);
    run(&["eval", &a1, "--p", "1.7"]);
    run(&["certify"]);
    run(&[
        "certify",
        "--matrix",
        &a1,
        "--p",
        "1.7",
        "--at-most",
        "1.6967",
    ]);
    run(&["optimize", "--p", "1.8", "--restarts", "1"]);
    let lines = ledger_lines(&ledger);
    assert_eq!(lines.len(), 6);
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in [
            "timestamp",
            "command",
            "params",
            "result",
            "pass",
            "version",
        ] {
            assert!(v.get(key).is_some(), "missing {key} in {line}");
        }
    }
    let verify = bmdist(&["verify", &ledger.to_string_lossy()]);
    assert!(verify.status.success(), "{}", stdout(&verify));
    assert_eq!(
        stdout(&verify)
            .lines()
            .filter(|l| l.starts_with("ok"))
            .count(),
        6
    );

    let tampered = dir.path().join("tampered.jsonl");
    let mut edited = lines.clone();
    let mut rec: serde_json::Value = serde_json::from_str(&edited[2]).unwrap();
    rec["result"]["value"] = serde_json::json!(1.5);
    edited[2] = rec.to_string();
    let mut cert: serde_json::Value = serde_json::from_str(&edited[3]).unwrap();
    cert["result"]["report"]["links"][0]["upper"] = serde_json::json!("1.7");
    edited[3] = cert.to_string();
    std::fs::write(&tampered, edited.join("\n")).unwrap();
    let verify = bmdist(&["verify", &tampered.to_string_lossy()]);
    assert_eq!(verify.status.code(), Some(4));
    let bad: Vec<String> = stdout(&verify)
        .lines()
        .filter(|l| l.starts_with("BAD"))
        .map(str::to_string)
        .collect();
    assert_eq!(bad.len(), 2, "{bad:?}");
}
