use std::path::PathBuf;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["survivor"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = survivor_cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn schema(command: &str) -> jsonschema::Validator {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "../../schemas/v1", command]
        .iter()
        .collect();
    let text = std::fs::read_to_string(path.with_extension("json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

/// Runs twice, checks byte equality, validates against the command schema.
fn json_ok(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    assert_eq!(run(args).1, out, "{args:?} not deterministic");
    let v: Value = serde_json::from_str(&out).unwrap();
    let errors: Vec<String> = schema(args[0])
        .iter_errors(&v)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{args:?}: {errors:?}\n{out}");
    assert_eq!(v["schema_version"], 1);
    v
}

const BM: [&str; 4] = ["--b", "3", "--m", "2"];

fn with_bm<'a>(cmd: &'a str, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(&BM);
    v.extend_from_slice(rest);
    v
}

#[test]
fn roots_payloads() {
    let v = json_ok(&with_bm("roots", &[]));
    assert!((v["lambda"].as_f64().unwrap() - (1.0 + 3f64.sqrt())).abs() < 1e-13);
    assert!(v["gamma"].is_null());
    let v = json_ok(&["roots", "--b", "3", "--m", "3", "--pq", "1,1"]);
    assert!(v["gamma"].is_number());
    assert_eq!(v["lambda_pq"]["p"], 1);
    json_ok(&["roots", "--b", "2", "--m", "5"]);
}

#[test]
fn count_payloads() {
    let v = json_ok(&with_bm(
        "count",
        &["--schedule", "po:seed=0", "--k", "7", "--json"],
    ));
    assert_eq!(v["count"], "1224");
    let v = json_ok(&with_bm(
        "count",
        &[
            "--schedule",
            "td:seed=rng:7",
            "--k",
            "5",
            "--series",
            "--json",
        ],
    ));
    assert_eq!(v["series"].as_array().unwrap().len(), 6);
    json_ok(&[
        "count",
        "--b",
        "3",
        "--m",
        "3",
        "--schedule",
        "mixed:seed=rng:3",
        "--k",
        "300",
        "--mode",
        "log",
        "--json",
    ]);
    json_ok(&with_bm(
        "count",
        &[
            "--schedule",
            "po:seed=0",
            "--k",
            "20",
            "--mode",
            "log",
            "--series",
            "--json",
        ],
    ));
}

#[test]
fn count_human_is_bare_integer() {
    let (code, out, _) = run(&with_bm("count", &["--schedule", "po:seed=0", "--k", "4"]));
    assert_eq!((code, out.as_str()), (0, "60\n"));
}

#[test]
fn classify_payloads() {
    let v = json_ok(&with_bm(
        "classify",
        &["--schedule", "td:seed=0", "--n", "6"],
    ));
    assert_eq!(v["counts"]["td"], 6);
    let v = json_ok(&[
        "classify",
        "--b",
        "3",
        "--m",
        "3",
        "--schedule",
        "mixed:seed=rng:11",
        "--n",
        "50",
    ]);
    let c = &v["counts"];
    let total =
        c["po"].as_u64().unwrap() + c["td"].as_u64().unwrap() + c["neither"].as_u64().unwrap();
    assert_eq!(total, 50);
}

#[test]
fn dim_payloads() {
    let v = json_ok(&with_bm(
        "dim",
        &["--schedule", "td:seed=0", "--k-max", "200", "--predict"],
    ));
    assert_eq!(v["prediction"]["basis"]["kind"], "totally_distinct");
    let v = json_ok(&with_bm(
        "dim",
        &[
            "--schedule",
            "lpq:p=1,q=2,seed=rng:5",
            "--k-max",
            "300",
            "--predict",
        ],
    ));
    assert_eq!(v["prediction"]["basis"]["kind"], "lpq");
    json_ok(&[
        "dim",
        "--b",
        "4",
        "--m",
        "3",
        "--schedule",
        "mixed:seed=rng:9",
        "--k-max",
        "500",
        "--mode",
        "log",
    ]);
}

#[test]
fn regularity_payloads() {
    let v = json_ok(&with_bm(
        "regularity",
        &["--schedule", "po:seed=0", "--k-max", "100"],
    ));
    assert_eq!(v["unbounded_trend"], false);
    json_ok(&with_bm(
        "regularity",
        &["--schedule", "td:seed=rng:2", "--k-max", "100"],
    ));
}

#[test]
fn jsr_payloads() {
    let v = json_ok(&with_bm("jsr", &["--depth", "3", "--block", "01,10"]));
    assert_eq!(v["upper_exhaustive"]["max_norm"], "60");
    assert_eq!(v["upper_po_count"], "60");
    assert_eq!(v["lower_periodic"]["pass"], true);
    let v = json_ok(&with_bm("jsr", &["--depth", "12", "--mode", "po"]));
    assert!(v["upper_exhaustive"].is_null());
    assert!(v["lower_periodic"].is_null());
    // Too deep for the default budget, so auto falls back to the PO bound.
    let v = json_ok(&with_bm("jsr", &["--depth", "9"]));
    assert!(v["upper_exhaustive"].is_null());
}

#[test]
fn build_pq_payloads() {
    let v = json_ok(&["build-pq", "--s", "1/4", "--t", "1/2", "--n", "5"]);
    assert_eq!(v["terms"].as_array().unwrap().len(), 5);
    json_ok(&[
        "build-pq", "--s", "0.2", "--t", "0.6", "--p1", "3", "--gap", "2",
    ]);
}

#[test]
fn csv_headers() {
    let cases: [(Vec<&str>, &str); 4] = [
        (
            vec!["build-pq", "--s", "1/4", "--t", "1/2", "--csv"],
            "n,p,q,ell",
        ),
        (
            with_bm(
                "dim",
                &["--schedule", "po:seed=0", "--k-max", "20", "--csv"],
            ),
            "k,r_k,drift",
        ),
        (
            with_bm(
                "count",
                &["--schedule", "po:seed=0", "--k", "3", "--series", "--csv"],
            ),
            "k,count",
        ),
        (
            with_bm(
                "classify",
                &["--schedule", "po:seed=0", "--n", "3", "--csv"],
            ),
            "k,class",
        ),
    ];
    for (args, header) in cases {
        let (code, out, err) = run(&args);
        assert_eq!(code, 0, "{args:?}: {err}");
        assert_eq!(out.lines().next(), Some(header), "{args:?}");
    }
}

#[test]
fn exit_codes() {
    // Usage errors.
    assert_eq!(run(&["count"]).0, 1);
    assert_eq!(run(&["roots", "--b", "1", "--m", "2"]).0, 1);
    assert_eq!(
        run(&with_bm("count", &["--schedule", "po:seed=9", "--k", "3"])).0,
        1
    );
    let (code, _, err) = run(&with_bm("count", &["--schedule", "bogus", "--k", "3"]));
    assert_eq!(code, 1);
    assert!(err.contains("offset"), "{err}");
    assert_eq!(run(&with_bm("jsr", &["--depth", "2", "--csv"])).0, 1);
    // Computation errors.
    assert_eq!(
        run(&with_bm("jsr", &["--depth", "9", "--mode", "exhaustive"])).0,
        2
    );
    assert_eq!(
        run(&with_bm("jsr", &["--depth", "2", "--block", "01,11"])).0,
        2
    );
    // Help goes to stdout with success.
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("count"));
}

#[test]
fn thread_count_does_not_change_output() {
    let a = run(&[
        "--threads",
        "1",
        "jsr",
        "--b",
        "3",
        "--m",
        "2",
        "--depth",
        "5",
    ]);
    let b = run(&[
        "--threads",
        "4",
        "jsr",
        "--b",
        "3",
        "--m",
        "2",
        "--depth",
        "5",
    ]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
}

#[test]
fn schemas_reject_drift() {
    let (_, out, _) = run(&with_bm(
        "count",
        &["--schedule", "po:seed=0", "--k", "3", "--json"],
    ));
    let mut v: Value = serde_json::from_str(&out).unwrap();
    let s = schema("count");
    assert!(s.is_valid(&v));
    v["count"] = serde_json::json!(22);
    assert!(!s.is_valid(&v));
    v["count"] = serde_json::json!("22");
    v["extra"] = serde_json::json!(1);
    assert!(!s.is_valid(&v));
}
