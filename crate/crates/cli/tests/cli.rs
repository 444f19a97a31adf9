use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmhp"))
        .args(args)
        .current_dir(dir)
        .env("HMHP_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = run(dir, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Circular data, a short held-out stretch, and a fit on the first part.
fn pipeline(dir: &Path) {
    ok(dir, &["generate", "--circular", "5", "--window", "300", "--seed", "1", "--out", "gen"]);
    ok(dir, &["generate", "--params", "gen/params.json", "--window", "60", "--seed", "2", "--out", "held"]);
    ok(
        dir,
        &[
            "infer", "--events", "gen/events.jsonl", "--graph", "gen/graph.tsv", "--vocab-size", "500", "--iters", "20",
            "--grouping", "per-edge", "--out", "inf",
        ],
    );
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(code(d, &["--help"]), 0);
    assert_eq!(code(d, &["generate", "--help"]), 0);
    assert_eq!(code(d, &[]), 1);
    assert_eq!(code(d, &["generate", "--bogus"]), 1);
    assert_eq!(code(d, &["infer", "--graph", "g.tsv"]), 1);
    assert_eq!(code(d, &["analyze", "--params", "p.json", "--restart", "0"]), 1);
    assert_eq!(code(d, &["generate", "--circular", "3", "--threads", "0"]), 1);
    assert_eq!(code(d, &["analyze", "--params", "missing.json"]), 2);
    fs::write(d.join("events.jsonl"), "{\"schema_version\":7}\n").unwrap();
    fs::write(d.join("graph.tsv"), "0\t1\n").unwrap();
    assert_eq!(code(d, &["infer", "--events", "events.jsonl", "--graph", "graph.tsv", "--vocab-size", "5"]), 2);
}

#[test]
fn config_file_flags_and_resolution() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("c.json"), r#"{"circular": 4, "window": 50, "vocab-size": 40, "seed": 9}"#).unwrap();
    ok(d, &["generate", "--config", "c.json", "--window", "80", "--out", "a"]);
    let r = json(&d.join("a/resolved-config.json"));
    assert_eq!(r["command"], "generate");
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["circular"], 4);
    assert_eq!(r["window"], 80.0);
    assert_eq!(r["vocab_size"], 40);
    assert_eq!(r["seed"], 9);
    assert_eq!(r["topics"], 10);
    assert!(r.get("config").is_none());
    let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "keys not sorted");

    ok(d, &["generate", "--config", "a/resolved-config.json", "--out", "b"]);
    for f in ["events.jsonl", "graph.tsv", "params.json"] {
        assert_eq!(fs::read(d.join("a").join(f)).unwrap(), fs::read(d.join("b").join(f)).unwrap(), "{f}");
    }

    fs::write(d.join("bad.json"), r#"{"circular": 4, "windw": 50}"#).unwrap();
    assert_eq!(code(d, &["generate", "--config", "bad.json"]), 1);
    fs::write(d.join("nested.json"), r#"{"circular": {"n": 4}}"#).unwrap();
    assert_eq!(code(d, &["generate", "--config", "nested.json"]), 1);
    assert_eq!(code(d, &["analyze", "--config", "a/resolved-config.json"]), 1);
    fs::write(d.join("broken.json"), "{").unwrap();
    assert_eq!(code(d, &["generate", "--config", "broken.json"]), 1);
}

#[test]
fn outputs_carry_schema_versions() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    pipeline(d);
    let first = |p: &str| fs::read_to_string(d.join(p)).unwrap().lines().next().unwrap().to_string();
    let header: Value = serde_json::from_str(&first("gen/events.jsonl")).unwrap();
    assert_eq!(header["schema_version"], 1);
    let header: Value = serde_json::from_str(&first("inf/assignments.jsonl")).unwrap();
    assert_eq!(header["schema_version"], 1);
    assert_eq!(header["mode"], "full");
    for csv in ["inf/w_groups.csv", "inf/trace.csv"] {
        assert_eq!(first(csv), "# schema_version=1", "{csv}");
    }
    for j in ["gen/params.json", "inf/params.json", "gen/generation-report.json"] {
        assert_eq!(json(&d.join(j))["schema_version"], 1, "{j}");
    }
    let trace = fs::read_to_string(d.join("inf/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2 + 21);
}

#[test]
fn loglik_reports_consistent_totals() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    pipeline(d);
    let out = ok(d, &["loglik", "--train-out", "inf", "--heldout", "held/events.jsonl", "--per-event", "true", "--out", "ll"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("content_ll,time_ll,total_ll"));
    let v: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!(v.iter().all(|x| x.is_finite() && *x < 0.0));
    assert!((v[0] + v[1] - v[2]).abs() < 1e-9 * v[2].abs());

    let file = fs::read_to_string(d.join("ll/loglik.csv")).unwrap();
    assert_eq!(file.lines().skip(1).collect::<Vec<_>>(), out.lines().collect::<Vec<_>>());

    let per: Vec<Vec<f64>> = fs::read_to_string(d.join("ll/per_event.csv"))
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(!per.is_empty());
    let content: f64 = per.iter().map(|r| r[1]).sum();
    assert!((content - v[0]).abs() < 1e-8 * v[0].abs());

    let greedy = ok(d, &["loglik", "--train-out", "inf", "--heldout", "held/events.jsonl", "--parents", "greedy", "--out", "g"]);
    assert_ne!(greedy, out);
    assert_eq!(code(d, &["loglik", "--train-out", "inf", "--heldout", "held/events.jsonl", "--parents", "best"]), 1);
}

#[test]
fn analyze_writes_every_table() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    pipeline(d);
    ok(d, &["analyze", "--params", "inf/params.json", "--exclude", "0,3", "--top-n", "2", "--out", "an"]);
    let read = |p: &str| fs::read_to_string(d.join("an").join(p)).unwrap();
    let hits = read("hits.csv");
    assert_eq!(hits.lines().nth(1), Some("topic,hub,authority"));
    assert_eq!(hits.lines().count(), 2 + 10);
    for s in 0..10 {
        let path = d.join(format!("an/ppr_{s}.csv"));
        assert_eq!(path.exists(), s != 0 && s != 3, "ppr_{s}");
        if path.exists() {
            let body = fs::read_to_string(path).unwrap();
            assert_eq!(body.lines().count(), 2 + 2);
            assert!(body.lines().skip(2).all(|l| !l.split(',').nth(1).is_some_and(|t| t == "0" || t == "3")));
        }
    }
    assert_eq!(read("topic_words.txt").lines().count(), 10);
    let pairs = read("asymmetric.csv");
    assert!(pairs.lines().count() <= 2 + 10);
    let summary = json(&d.join("an/analysis.json"));
    assert_eq!(summary["topics"], 10);
    assert_eq!(summary["ppr_starts"].as_array().unwrap().len(), 8);
    assert_eq!(code(d, &["analyze", "--params", "inf/params.json", "--exclude", "12"]), 2);
}

#[test]
fn eval_prints_its_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    pipeline(d);
    let out = ok(d, &["eval", "--gold", "gen/events.jsonl", "--gold-params", "gen/params.json", "--pred", "inf", "--out", "ev"]);
    let report = json(&d.join("ev/report.json"));
    assert_eq!(report["schema_version"], 1);
    let acc = report["parent_accuracy"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&acc));
    assert!(report["tae"].as_f64().is_some());
    let file = fs::read_to_string(d.join("ev/report.csv")).unwrap();
    assert!(file.ends_with(&out) || out.lines().all(|l| file.contains(l)));
}
