use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macbeath"))
        .args(args)
        .env_remove("MACBEATH_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn classify_json_heptagon_43() {
    let o = run(&["classify", "--m", "3", "--n", "7", "--p", "43", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).is_empty());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k"], 2);
    let mut s: Vec<u64> = v["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["s"][0].as_u64().unwrap())
        .collect();
    s.sort_unstable();
    assert_eq!(s, vec![25, 29, 36]);
}

#[test]
fn classify_json_reparses_to_record() {
    let o = run(&["classify", "--n", "13", "--p", "5", "--format", "json"]);
    let text = stdout(&o);
    let r = macbeath::report::record_from_json(&text).unwrap();
    assert_eq!(r, macbeath::census::map_census(3, 13, 5).unwrap());
}

#[test]
fn psi_nine() {
    let o = run(&["psi", "--n", "9", "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!(["1", "-3", "0", "1"]));
    assert_eq!(v["value_at_one"], "-1");
    let t = stdout(&run(&["psi", "--n", "9"]));
    assert!(t.contains("x^3 - 3x + 1"), "{t}");
}

#[test]
fn sweep_csv_summary() {
    let o = run(&["sweep", "--n", "7", "--first", "400", "--format", "csv", "--workers", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("# macbeath sweep csv schema=1\n"));
    assert!(text.contains("# workers=2 seed="));
    assert!(text.contains("\np,residue_class,d,q,genus,k,l,parity_ok,class_details\n"));
    assert!(text.contains("# summary total=400 counts=48,154,151,47\n"));
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 401);
}

#[test]
fn csv_is_identical_across_worker_counts_apart_from_header() {
    let strip = |s: String| s.lines().filter(|l| !l.starts_with("# workers")).collect::<Vec<_>>().join("\n");
    let a = stdout(&run(&["sweep", "--n", "9", "--first", "60", "--format", "csv", "--workers", "1"]));
    let b = stdout(&run(&["sweep", "--n", "9", "--first", "60", "--format", "csv", "--workers", "3"]));
    assert_eq!(strip(a), strip(b));
}

#[test]
fn bad_reduction_exits_one_with_code() {
    let o = run(&["classify", "--n", "7", "--p", "7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("error[bad-reduction]"), "{}", stderr(&o));
}

#[test]
fn inadmissible_exits_one() {
    let o = run(&["classify", "--m", "4", "--n", "5", "--p", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[inadmissible]"));
}

#[test]
fn usage_error_exits_one() {
    let o = run(&["classify", "--n", "7"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["verify", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[invalid-argument]"));
}

#[test]
fn verify_table1_passes() {
    let o = run(&["verify", "table1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("13 checks, 0 failed"));
}

#[test]
fn verify_appendix_reports_misprints() {
    let o = run(&["verify", "appendix", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v[0]["checks"].as_array().unwrap();
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c["pass"].as_bool().unwrap())
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.iter().all(|n| n.ends_with("as printed") || n.ends_with("printed count")), "{failed:?}");
    assert!(checks
        .iter()
        .filter(|c| c["name"].as_str().unwrap().ends_with("with errata applied"))
        .all(|c| c["pass"].as_bool().unwrap()));
    assert!(stderr(&o).contains("error[verification-failed]"));
}

#[test]
fn oracle_agrees() {
    let o = run(&["oracle", "--n", "7", "--p", "13", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for row in v.as_array().unwrap() {
        assert_eq!(row["agrees"], true);
        assert_eq!(row["census"], row["regularity"]);
    }
}

#[test]
fn predict_heptagon() {
    let o = run(&["predict", "--n", "7", "--format", "csv"]);
    assert_eq!(stdout(&o), "k,density\n0,1/8\n1,3/8\n2,3/8\n3,1/8\n");
    let o = run(&["predict", "--n", "17"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[no-prediction]"));
    let o = run(&["predict", "--n", "17", "--galois-override", "full"]);
    assert!(o.status.success());
}

#[test]
fn disc_heptagon_and_cps() {
    let o = run(&["disc", "--n", "7", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["discriminant"], "49");
    assert_eq!(v["factors"], serde_json::json!([[7, 2]]));
    let o = run(&["disc", "--p", "13", "--traces", "0,0,0", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["minus_d"], 4);
    assert_eq!(v["chi"], 1);
}

#[test]
fn pattern_small_bound() {
    let o = run(&["pattern", "--n", "7", "--bound", "2000", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("# macbeath pattern csv schema=1\n"));
    assert!(text.contains("# summary bad_primes=2,7\n"));
    assert!(text.contains("# summary cross_check_failures=0\n"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o = run(&["classify", "--n", "7", "--p", "13", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("# macbeath classify csv schema=1\n"));
}

#[test]
fn workers_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_macbeath"))
        .args(["sweep", "--n", "7", "--first", "10", "--format", "csv"])
        .env("MACBEATH_WORKERS", "1")
        .output()
        .unwrap();
    assert!(String::from_utf8(o.stdout).unwrap().contains("# workers=1 seed="));
}
