use std::path::{Path, PathBuf};
use std::process::Command;

use nfib::config::parse_scalar_list;
use nfib_core::ExactComplex;
use proptest::prelude::*;
use serde_json::Value;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixtures() -> String {
    manifest_dir().join("fixtures/oeis").display().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("nfib").chain(args.iter().copied());
    let code = nfib::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\nstdout: {out}\nstderr: {err}"));
    (code, v)
}

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(manifest_dir().join("../../docs/report.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, doc: &Value, what: &str) {
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{what}: {errors:#?}");
}

#[test]
fn generate_table_lists_fibonacci() {
    let (code, out, _) = run(&["generate", "--weights", "1,1", "--init", "0,1", "--count", "10", "--format", "table"]);
    assert_eq!(code, 0);
    let values: Vec<&str> = out.lines().skip(4).map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(values, ["0", "1", "1", "2", "3", "5", "8", "13", "21", "34", "55", "89"]);
}

#[test]
fn validation_errors_exit_one() {
    let (code, out, err) = run(&["generate", "--weights", "1,1", "--init", "0,0"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("all zero"), "{err}");

    let (code, _, err) = run(&["generate", "--weights", "1,0", "--init", "0,1"]);
    assert_eq!(code, 1);
    assert!(err.contains("b_n"), "{err}");

    let (code, _, err) = run(&["ratio", "--weights", "1,1", "--init", "0,1x"]);
    assert_eq!(code, 1);
    assert!(err.contains("position 3"), "{err}");

    let (code, _, _) = run(&["audit", "--weights", "1,1", "--init", "0,1", "--horizon", "7"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["ratio", "--weights", "1,1", "--init", "0,1", "--ratio-tol", "0"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 1);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("audit-random"));
}

#[test]
fn hyphen_values_are_accepted() {
    let (code, doc) = json(&["analyze", "--weights", "-1,-1"]);
    assert_eq!(code, 0);
    assert_eq!(doc["inputs"]["weights"], serde_json::json!(["-1", "-1"]));
    let (code, doc) = json(&["ratio", "--weights", "1,1", "--init", "-1,2"]);
    assert_eq!(code, 0);
    let v = doc["results"]["estimate"]["value"][0].as_f64().unwrap();
    assert!((v - 1.618033988749895).abs() < 1e-10);
}

#[test]
fn analyze_examples() {
    let (_, doc) = json(&["analyze", "--weights", "1,1"]);
    let r = &doc["results"];
    assert!((r["dominance"]["lambda0"][0].as_f64().unwrap() - 1.6180339887).abs() < 1e-10);
    assert_eq!(r["dominance"]["is_asymptotically_simple"], true);
    assert_eq!(r["criteria"]["ostrowski"]["status"], "Pass");
    assert_eq!(r["criteria"]["dubeau"][0]["status"], "Pass");

    let (_, doc) = json(&["analyze", "--weights", "0,1"]);
    let r = &doc["results"];
    assert_eq!(r["dominance"]["is_asymptotically_simple"], false);
    assert_eq!(r["criteria"]["ostrowski"]["status"], "Fail");
    assert_eq!(r["criteria"]["ostrowski"]["detail"]["ostrowski"]["gcd"], 2);

    let (_, doc) = json(&["analyze", "--weights", "4,-2,-3"]);
    let r = &doc["results"];
    assert_eq!(r["dominance"]["lambda0"], serde_json::json!([3.0, 0.0]));
    assert_eq!(r["criteria"]["ostrowski"]["status"], "NotApplicable");
}

#[test]
fn ratio_examples_and_exit_codes() {
    let (code, doc) = json(&["ratio", "--weights", "2,2", "--init", "0,1"]);
    assert_eq!(code, 0);
    let v = doc["results"]["estimate"]["value"][0].as_f64().unwrap();
    assert!((v - (1.0 + 3f64.sqrt())).abs() < 1e-10);

    let (code, doc) = json(&["ratio", "--weights", "1,1", "--init", "-1,1"]);
    assert_eq!(code, 0);
    let e = &doc["results"]["estimate"];
    assert_eq!(e["status"], "Converged");
    assert!(e["skipped_zero_indices"].as_array().unwrap().contains(&Value::from(1)));

    let (code, doc) = json(&["ratio", "--weights", "0,1", "--init", "0,1", "--max-k", "200"]);
    assert_eq!(code, 2);
    assert_eq!(doc["results"]["estimate"]["status"], "NotConverged");
}

#[test]
fn audit_examples_and_violation_flag() {
    let (code, doc) = json(&["audit", "--weights", "1,1", "--init", "-1,2"]);
    assert_eq!(code, 0);
    assert_eq!(doc["findings"][0]["status"], "Supported");
    assert_eq!(doc["findings"][1]["status"], "Supported");

    let (code, doc) = json(&["audit", "--weights", "4,-2,-3", "--init", "1,1,2"]);
    assert_eq!(code, 0);
    assert_eq!(doc["findings"][1]["claim"], "PartII");
    assert_eq!(doc["findings"][1]["status"], "Violated");
    let degeneracy = &doc["results"]["part_ii"]["witness"]["ratio"]["degeneracy"];
    assert_eq!(degeneracy["degenerate"], true);
    assert_eq!(degeneracy["exact"], true);

    let (code, _, _) = run(&["audit", "--weights", "4,-2,-3", "--init", "1,1,2", "--fail-on-violation"]);
    assert_eq!(code, 3);
    let (code, _, _) = run(&["audit", "--weights", "1,1", "--init", "-1,2", "--fail-on-violation"]);
    assert_eq!(code, 0);
}

#[test]
fn family_examples() {
    let (code, doc) = json(&["family", "--p", "1", "--n-max", "10"]);
    assert_eq!(code, 0);
    let rows = doc["results"]["rows"].as_array().unwrap();
    assert!((rows[0]["lambda0"].as_f64().unwrap() - 1.6180).abs() < 1e-4);
    assert!((rows[1]["lambda0"].as_f64().unwrap() - 1.8393).abs() < 1e-4);
    assert!((rows[8]["lambda0"].as_f64().unwrap() - 2.0).abs() < 0.002);

    let (code, doc) = json(&["family", "--p", "2", "--n-max", "10"]);
    assert_eq!(code, 0);
    let rows = doc["results"]["rows"].as_array().unwrap();
    assert!((rows[0]["lambda0"].as_f64().unwrap() - 2.7320508076).abs() < 1e-10);
    assert!(rows.iter().all(|r| r["lambda0"].as_f64().unwrap() < 3.0));

    let (code, doc) = json(&["family", "--p", "0.5", "--n-max", "10"]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["limit"], 1.5);
    assert_eq!(doc["results"]["monotone_increasing"], true);

    let (code, _, _) = run(&["family", "--p", "-1"]);
    assert_eq!(code, 1);
}

#[test]
fn oeis_verify_offline_with_fixtures() {
    let fx = fixtures();
    let (code, doc) = json(&["oeis", "verify", "--signature", "1,1", "--offline", "--cache-dir", &fx]);
    assert_eq!(code, 0);
    let records = doc["results"]["records"].as_array().unwrap();
    let ids: Vec<&str> = records.iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"A000045") && ids.contains(&"A000032"), "{ids:?}");
    assert!(records.iter().all(|r| r["agrees"] == true));
    assert_eq!(doc["results"]["filtered_out"][0]["id"], "A000071");

    let (code, doc) = json(&["oeis", "verify", "--signature", "1,1,1", "--limit", "5", "--offline", "--cache-dir", &fx]);
    assert_eq!(code, 0);
    let records = doc["results"]["records"].as_array().unwrap();
    assert!(records.iter().any(|r| r["id"] == "A000073"));
    assert!(records.iter().all(|r| r["agrees"] == true));
}

#[test]
fn oeis_offline_empty_cache_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().display().to_string();
    let (code, out, err) = run(&["oeis", "verify", "--signature", "1,1", "--offline", "--cache-dir", &path]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("network unavailable") && err.contains("--cache-dir"), "{err}");
}

#[test]
fn oeis_batch_offline_with_fixtures() {
    let fx = fixtures();
    let (code, doc) = json(&["oeis", "batch", "--m", "1..2", "--lengths", "2..3", "--offline", "--cache-dir", &fx]);
    assert_eq!(code, 0);
    let s = &doc["results"]["summary"];
    assert_eq!(s["signatures"], 4);
    // (2,2,2) has no fixture.
    assert_eq!(s["unavailable"], 1);
    assert_eq!(s["agrees"], 8);
    assert_eq!(s["disagrees"], 0);
}

#[test]
fn every_command_emits_schema_valid_json() {
    let v = validator();
    let fx = fixtures();
    let cases: Vec<Vec<&str>> = vec![
        vec!["generate", "--weights", "1,1", "--init", "0,1", "--count", "10"],
        vec!["generate", "--weights", "1/2+i,-1", "--init", "1,2i", "--count", "5", "--mode", "float"],
        vec!["analyze", "--weights", "1,1"],
        vec!["analyze", "--weights", "0,1", "--mode", "float"],
        vec!["ratio", "--weights", "0,1", "--init", "0,1", "--max-k", "100"],
        vec!["audit", "--weights", "4,-2,-3", "--init", "1,1,2"],
        vec!["audit", "--weights", "0,1", "--init", "1,1"],
        vec!["audit", "--weights", "1,1", "--init", "-1,1"],
        vec!["audit-random", "--seed", "7", "--count", "20"],
        vec!["audit-random", "--seed", "7", "--count", "10", "--kind", "float"],
        vec!["family", "--p", "1", "--n-max", "6"],
        vec!["oeis", "verify", "--signature", "1,1", "--offline", "--cache-dir", &fx],
        vec!["oeis", "batch", "--m", "1..2", "--lengths", "2..3", "--offline", "--cache-dir", &fx],
    ];
    for args in cases {
        let (_, doc) = json(&args);
        assert_valid(&v, &doc, &args.join(" "));
    }
}

#[test]
fn schema_rejects_malformed_documents() {
    let v = validator();
    let (_, mut doc) = json(&["analyze", "--weights", "1,1"]);
    doc["schema_version"] = "2.0".into();
    assert!(!v.is_valid(&doc));
    let (_, mut doc) = json(&["ratio", "--weights", "1,1", "--init", "0,1"]);
    doc["results"]["estimate"]["status"] = "Maybe".into();
    assert!(!v.is_valid(&doc));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"weights": [2, 2], "init": "0,1", "format": "table", "ratio_tol": 1e-12}"#).unwrap();
    let cfg = cfg.display().to_string();
    let (code, out, _) = run(&["--config", &cfg, "ratio"]);
    assert_eq!(code, 0);
    assert!(out.contains("value: 2.73205080757"), "{out}");
    let (code, doc) = json(&["--config", &cfg, "--format", "json", "ratio", "--weights", "1,1"]);
    assert_eq!(code, 0);
    assert_eq!(doc["inputs"]["weights"], serde_json::json!(["1", "1"]));
    assert_eq!(doc["inputs"]["ratio"]["tol"], 1e-12);

    // Counts and seeds fall back to the file before the built-in default.
    let counted = dir.path().join("count.json");
    std::fs::write(&counted, r#"{"weights": "1,1", "init": "0,1", "count": 5, "seed": 7}"#).unwrap();
    let counted = counted.display().to_string();
    let (_, doc) = json(&["--config", &counted, "generate"]);
    assert_eq!(doc["inputs"]["count"], 5);
    let (_, doc) = json(&["--config", &counted, "generate", "--count", "3"]);
    assert_eq!(doc["inputs"]["count"], 3);
    let (_, doc) = json(&["--config", &counted, "audit-random", "--count", "2"]);
    assert_eq!(doc["inputs"]["seed"], 7);

    std::fs::write(dir.path().join("bad.json"), r#"{"weigths": "1,1"}"#).unwrap();
    let bad = dir.path().join("bad.json").display().to_string();
    let (code, _, err) = run(&["--config", &bad, "analyze"]);
    assert_eq!(code, 1);
    assert!(err.contains("weigths"), "{err}");
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nfib"))
}

#[test]
fn cache_dir_comes_from_environment() {
    let out = binary()
        .args(["oeis", "verify", "--signature", "2,2", "--offline"])
        .env("NFIB_CACHE_DIR", fixtures())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["agrees"], 3);

    let empty = tempfile::tempdir().unwrap();
    let out = binary()
        .args(["oeis", "verify", "--signature", "2,2", "--offline", "--cache-dir"])
        .arg(empty.path())
        .env("NFIB_CACHE_DIR", fixtures())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_exit_codes_match_library() {
    let status = |args: &[&str]| binary().args(args).output().unwrap().status.code();
    assert_eq!(status(&["generate", "--weights", "1,1", "--init", "0,1"]), Some(0));
    assert_eq!(status(&["generate", "--weights", "1,1", "--init", "0,0"]), Some(1));
    assert_eq!(status(&["ratio", "--weights", "0,1", "--init", "0,1", "--max-k", "100"]), Some(2));
    assert_eq!(status(&["audit", "--weights", "4,-2,-3", "--init", "1,1,2", "--fail-on-violation"]), Some(3));
}

fn golden_path(name: &str) -> PathBuf {
    manifest_dir().join("tests/golden").join(name)
}

fn check_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}; rerun with UPDATE_GOLDEN=1", path.display()));
    assert!(expected == actual, "{} differs from the golden file", Path::new(name).display());
}

#[test]
fn golden_documents() {
    let fx = fixtures();
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("generate_fibonacci.json", vec!["generate", "--weights", "1,1", "--init", "0,1", "--count", "10"]),
        ("generate_fibonacci.txt", vec!["generate", "--weights", "1,1", "--init", "0,1", "--count", "10", "--format", "table"]),
        ("analyze_tribonacci.json", vec!["analyze", "--weights", "1,1,1"]),
        ("ratio_lucas_shift.json", vec!["ratio", "--weights", "1,1", "--init", "-1,1"]),
        ("audit_degenerate.json", vec!["audit", "--weights", "4,-2,-3", "--init", "1,1,2"]),
        ("audit_degenerate.txt", vec!["audit", "--weights", "4,-2,-3", "--init", "1,1,2", "--format", "table"]),
        ("audit_random_seed42.json", vec!["audit-random", "--seed", "42", "--count", "25"]),
        ("family_p1.txt", vec!["family", "--p", "1", "--n-max", "10", "--format", "table"]),
        ("oeis_verify_fib.json", vec!["oeis", "verify", "--signature", "1,1", "--offline", "--cache-dir", &fx]),
    ];
    for (name, args) in cases {
        let (code, out, err) = run(&args);
        assert_eq!(code, 0, "{name}: {err}");
        check_golden(name, &out);
    }
}

fn literal() -> impl Strategy<Value = String> {
    let rational = (-1000i64..1000, 1i64..50).prop_map(|(p, q)| if q == 1 { p.to_string() } else { format!("{p}/{q}") });
    let decimal = (-10_000i64..10_000, 0u32..4).prop_map(|(m, s)| {
        let text = format!("{:.*}", s as usize, m as f64 / 10f64.powi(s as i32));
        text
    });
    let real = prop_oneof![rational.clone(), decimal];
    prop_oneof![
        real.clone(),
        rational.clone().prop_map(|r| format!("{r}i")),
        (real, rational).prop_map(|(a, b)| if b.starts_with('-') { format!("{a}{b}i") } else { format!("{a}+{b}i") }),
    ]
}

proptest! {
    #[test]
    fn literal_lists_round_trip(items in proptest::collection::vec(literal(), 1..6)) {
        let text = items.join(",");
        let parsed = parse_scalar_list("weights", &text).unwrap();
        let printed: Vec<String> = parsed.iter().map(ExactComplex::to_string).collect();
        let reparsed = parse_scalar_list("weights", &printed.join(",")).unwrap();
        prop_assert_eq!(&parsed, &reparsed);
        let reprinted: Vec<String> = reparsed.iter().map(ExactComplex::to_string).collect();
        prop_assert_eq!(printed, reprinted);
    }

    #[test]
    fn parse_error_positions_point_into_the_list(items in proptest::collection::vec(literal(), 1..5), at in 0usize..5) {
        let at = at % items.len();
        let mut broken = items.clone();
        broken[at] = format!("{}?", broken[at]);
        let text = broken.join(",");
        let before: usize = broken[..at].iter().map(|s| s.chars().count() + 1).sum();
        match parse_scalar_list("init", &text) {
            Err(nfib::config::ConfigError::Parse { position, .. }) => {
                prop_assert!(position >= before && position <= before + broken[at].chars().count(), "{} at {}", text, position);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }
}
