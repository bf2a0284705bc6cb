//! End-to-end tests of the command-line binary: exit-code contract, output
//! determinism, config precedence, and the round trip from `gonality`
//! output back through `verify`.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_goncurve"));
    // Tests control configuration explicitly; the ambient environment must
    // not leak in.
    cmd.env_remove("GONCURVE_CONFIG");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn write_random_curve(dir: &Path, family: &str, genus: u32, seed: u64) -> String {
    let path = dir.join(format!("{family}-{genus}-{seed}.json"));
    let out = run(&[
        "random",
        "--family",
        family,
        "--genus",
        &genus.to_string(),
        "--seed",
        &seed.to_string(),
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "random generation failed");
    path.to_str().unwrap().to_string()
}

// ---------------- exit codes ----------------

#[test]
fn missing_file_exits_two_with_error_json() {
    let out = run(&["gonality", "/nonexistent/curve.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("stderr is machine readable");
    assert_eq!(err["error"]["kind"], "io");
}

#[test]
fn malformed_curve_exits_two() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"family\": \"irreducible\", \"pairs\": [[[\"oops\"]]]}").unwrap();
    let out = run(&["gonality", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "bad-json");
}

#[test]
fn genus_below_two_exits_two() {
    let out = run(&["random", "--family", "binary", "--genus", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "bad-genus");
}

#[test]
fn exhausted_budget_exits_three_with_exclusions() {
    let dir = tempdir().unwrap();
    let curve = write_random_curve(dir.path(), "irreducible", 7, 3);
    let out = run(&[
        "gonality",
        &curve,
        "--no-lower",
        "--max-degree",
        "3",
        "--restarts",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "solver-budget-exceeded");
    assert_eq!(err["error"]["max_degree"], 3);
    let exclusions = err["error"]["exclusions"].as_array().unwrap();
    assert_eq!(exclusions.len(), 3);
}

#[test]
fn negative_answers_are_exit_zero() {
    let dir = tempdir().unwrap();
    let curve = write_random_curve(dir.path(), "irreducible", 3, 5);
    let out = run(&["witness", &curve, "--degree", "2"]);
    assert_eq!(out.status.code(), Some(0), "not-found is data, not an error");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["found"], false);
    assert_eq!(v["exclusion"], "exact");
}

// ---------------- determinism ----------------

#[test]
fn random_output_is_bit_identical_per_seed() {
    let a = run(&["random", "--family", "binary", "--genus", "5", "--seed", "42"]);
    let b = run(&["random", "--family", "binary", "--genus", "5", "--seed", "42"]);
    let c = run(&["random", "--family", "binary", "--genus", "5", "--seed", "43"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gonality_output_is_bit_identical_per_seed() {
    let dir = tempdir().unwrap();
    let curve = write_random_curve(dir.path(), "irreducible", 4, 9);
    let a = run(&["gonality", &curve, "--seed", "1"]);
    let b = run(&["gonality", &curve, "--seed", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

// ---------------- config precedence ----------------

#[test]
fn env_config_supplies_defaults_and_flags_override() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("solver.json");
    std::fs::write(&cfg, "{\"seed\": 77}").unwrap();

    let via_env = bin()
        .env("GONCURVE_CONFIG", cfg.to_str().unwrap())
        .args(["random", "--family", "irreducible", "--genus", "3"])
        .output()
        .unwrap();
    let via_flag = run(&[
        "random", "--family", "irreducible", "--genus", "3", "--seed", "77",
    ]);
    assert!(via_env.status.success());
    assert_eq!(via_env.stdout, via_flag.stdout, "env seed equals flag seed");

    let overridden = bin()
        .env("GONCURVE_CONFIG", cfg.to_str().unwrap())
        .args(["random", "--family", "irreducible", "--genus", "3", "--seed", "5"])
        .output()
        .unwrap();
    let direct = run(&[
        "random", "--family", "irreducible", "--genus", "3", "--seed", "5",
    ]);
    assert_eq!(overridden.stdout, direct.stdout, "flag beats env");
}

#[test]
fn unreadable_env_config_exits_two() {
    let out = bin()
        .env("GONCURVE_CONFIG", "/nonexistent/solver.json")
        .args(["random", "--family", "binary", "--genus", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "bad-config");
}

// ---------------- round trips and formats ----------------

#[test]
fn gonality_output_passes_verify_when_reread() {
    let dir = tempdir().unwrap();
    for (family, genus) in [("irreducible", 3u32), ("binary", 4)] {
        let curve = write_random_curve(dir.path(), family, genus, 13);
        let cert_path = dir.path().join(format!("{family}-cert.json"));
        let out = run(&["gonality", &curve, "-o", cert_path.to_str().unwrap()]);
        assert!(out.status.success());

        let verified = run(&["verify", &curve, cert_path.to_str().unwrap()]);
        assert_eq!(verified.status.code(), Some(0));
        let report: serde_json::Value = serde_json::from_slice(&verified.stdout).unwrap();
        assert_eq!(report["pass"], true, "{family}: {report}");
    }
}

#[test]
fn hyperelliptic_binary_answer_is_exact() {
    let dir = tempdir().unwrap();
    let curve = write_random_curve(dir.path(), "binary", 2, 19);
    let out = run(&["hyperelliptic", &curve]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["hyperelliptic"], true, "genus-2 curves always are");
    assert_eq!(v["exact"], true);
    assert!(v["automorphism"].is_array());
}

#[test]
fn json_output_has_sorted_keys() {
    let out = run(&["random", "--family", "binary", "--genus", "2", "--seed", "1"]);
    let s = stdout_str(&out);
    let keys: Vec<usize> = ["\"family\"", "\"height\"", "\"seed\"", "\"side1\"", "\"side2\""]
        .iter()
        .map(|k| s.find(k).expect(k))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted, "top-level keys appear in sorted order");
}

#[test]
fn text_format_is_not_json() {
    let dir = tempdir().unwrap();
    let curve = write_random_curve(dir.path(), "irreducible", 2, 8);
    let out = run(&["gonality", &curve, "--no-lower", "--format", "text"]);
    assert!(out.status.success());
    let s = stdout_str(&out);
    assert!(s.contains("claimed upper bound: 2"));
    assert!(serde_json::from_str::<serde_json::Value>(&s).is_err());
}

// ---------------- survey ----------------

#[test]
fn survey_writes_report_and_csv() {
    let dir = tempdir().unwrap();
    let json_path = dir.path().join("survey.json");
    let out = run(&[
        "survey",
        "--family",
        "binary",
        "--genus",
        "2",
        "--trials",
        "5",
        "--seed",
        "3",
        "-o",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["trials"], 5);
    assert_eq!(report["rows"].as_array().unwrap().len(), 5);
    let s = &report["summary"];
    let total = s["equal"].as_f64().unwrap()
        + s["below"].as_f64().unwrap()
        + s["undecided"].as_f64().unwrap();
    assert!((total - 1.0).abs() < 1e-12);
    // Genus 2 is universally degree 2: every trial must land exactly there.
    assert_eq!(s["equal"].as_f64().unwrap(), 1.0);

    let csv = std::fs::read_to_string(dir.path().join("survey.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial,seed,genus,upper,lower,lower_grade,exact,ms"
    );
    assert_eq!(lines.count(), 5);
}

#[test]
fn survey_budget_trials_are_marked_and_exit_three() {
    let dir = tempdir().unwrap();
    let json_path = dir.path().join("survey7.json");
    let out = run(&[
        "survey",
        "--family",
        "irreducible",
        "--genus",
        "7",
        "--trials",
        "3",
        "--seed",
        "1",
        "--max-degree",
        "3",
        "--restarts",
        "0",
        "-o",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    // The report is still written, with every row marked.
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    for row in report["rows"].as_array().unwrap() {
        assert_eq!(row["budget_exceeded"], true);
        assert!(row["upper"].is_null());
    }
    assert_eq!(report["summary"]["undecided"].as_f64().unwrap(), 1.0);
}
