use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use modunit::cli::{BoundsOutput, CompareOutput, LeadingOutput, SearchOutput, ValidateOutput, ValuesOutput};
use modunit::unitvec::VectorFile;

fn vectors(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("vectors").join(name)
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("modunit-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn modunit(args: &[&str], vector: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modunit"))
        .args(&args[..1])
        .arg("--vector")
        .arg(vector)
        .args(&args[1..])
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = modunit(&["validate"], &vectors("v0.json"));
    assert_eq!(ok.status.code(), Some(0));
    let report: ValidateOutput = serde_json::from_str(&stdout(&ok)).unwrap();
    assert!(report.report.valid);

    let bad = scratch("bad.json", r#"{"level":{"p":5,"f":1},"entries":[{"r":1,"s":0,"m":12}]}"#);
    let out = modunit(&["validate"], &bad);
    assert_eq!(out.status.code(), Some(2));
    let report: ValidateOutput = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((report.report.sum_r2, report.report.valid), (2, false));

    assert_eq!(modunit(&["validate"], Path::new("/nonexistent/v.json")).status.code(), Some(1));
    let malformed = scratch("malformed.json", r#"{"level":{"p":5,"f":1},"entries":[{"r":1,"m":12}]}"#);
    assert_eq!(modunit(&["validate"], &malformed).status.code(), Some(1));
    let torsion = scratch("order.json", r#"{"level":{"p":5,"f":2},"entries":[{"r":5,"s":0,"m":12}]}"#);
    assert_eq!(modunit(&["validate"], &torsion).status.code(), Some(1));
}

#[test]
fn invalid_vectors_are_refused_unless_allowed() {
    let bad = scratch("refuse.json", r#"{"level":{"p":5,"f":1},"entries":[{"r":1,"s":0,"m":5}]}"#);
    assert_eq!(modunit(&["compute", "--nmax", "5"], &bad).status.code(), Some(2));
    let out = modunit(&["compare", "--nmax", "30", "--allow-invalid"], &bad);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn compare_and_fault_injection() {
    for name in ["v0.json", "v1.json"] {
        let out = modunit(&["compare", "--nmax", "60"], &vectors(name));
        assert_eq!(out.status.code(), Some(0));
        let parsed: CompareOutput = serde_json::from_str(&stdout(&out)).unwrap();
        assert!(parsed.all_equal && parsed.mismatches.is_empty());
        assert_eq!(parsed.rows.len(), 60);
    }
    let out = modunit(&["compare", "--nmax", "60", "--perturb-oracle", "17"], &vectors("v1.json"));
    assert_eq!(out.status.code(), Some(3));
    let parsed: CompareOutput = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed.mismatches, vec![17]);
    let out = modunit(&["compare", "--nmax", "10", "--perturb-oracle", "11"], &vectors("v1.json"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn leading_order_output() {
    let out = modunit(&["leading"], &vectors("v0.json"));
    assert_eq!(out.status.code(), Some(0));
    let parsed: LeadingOutput = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((parsed.alpha.as_str(), parsed.beta.as_str()), ("1/5", "1"));
}

#[test]
fn compute_and_oracle_agree() {
    let compute = modunit(&["compute", "--nmax", "40"], &vectors("l25.json"));
    let oracle = modunit(&["oracle", "--nmax", "40"], &vectors("l25.json"));
    let a: ValuesOutput = serde_json::from_str(&stdout(&compute)).unwrap();
    let b: ValuesOutput = serde_json::from_str(&stdout(&oracle)).unwrap();
    assert_eq!(a.values, b.values);
    assert_ne!(a.method, b.method);
    assert_eq!(a.values[0].coeffs.len(), 20);
}

#[test]
fn empty_vector_computes_zeros() {
    let empty = scratch("empty.json", r#"{"level":{"p":7,"f":1},"entries":[]}"#);
    let out = modunit(&["compute", "--nmax", "25"], &empty);
    assert_eq!(out.status.code(), Some(0));
    let parsed: ValuesOutput = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed.values.len(), 25);
    assert!(parsed.values.iter().all(|row| row.coeffs.iter().all(|c| c == "0/1")));
}

#[test]
fn bounds_outputs() {
    let out = modunit(&["bounds", "--format", "csv"], &vectors("v0.json"));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 201);
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));

    let out = modunit(&["bounds", "--nmax", "40"], &vectors("v4.json"));
    let parsed: BoundsOutput = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(parsed.summary.violations.is_empty() && parsed.summary.chain_failures.is_empty());
    assert!(parsed.rows[..15].iter().all(|r| r.b3.is_none()));
    assert_eq!(modunit(&["bounds", "--nmax", "10"], &vectors("v0.json")).status.code(), Some(1));
}

#[test]
fn search_results_are_valid_files() {
    let out = modunit(&["search", "--bound", "24"], &vectors("v4.json"));
    assert_eq!(out.status.code(), Some(0));
    let parsed: SearchOutput = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!parsed.vectors.is_empty());
    for file in &parsed.vectors {
        assert!(file.to_vector().unwrap().is_valid());
    }
}

#[test]
fn output_file_and_determinism() {
    let target = std::env::temp_dir().join(format!("modunit-cli-{}", std::process::id())).join("out.json");
    let first = modunit(&["compute", "--nmax", "30"], &vectors("l7.json"));
    let second = modunit(&["compute", "--nmax", "30"], &vectors("l7.json"));
    assert_eq!(first.stdout, second.stdout);
    fs::create_dir_all(target.parent().unwrap()).unwrap();
    let to_file = modunit(&["compute", "--nmax", "30", "--out", target.to_str().unwrap()], &vectors("l7.json"));
    assert_eq!(to_file.status.code(), Some(0));
    assert_eq!(fs::read(&target).unwrap(), first.stdout);

    let parsed: ValuesOutput = serde_json::from_slice(&first.stdout).unwrap();
    let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
    assert_eq!(again.as_bytes(), &first.stdout[..]);
}

#[test]
fn level_overrides_are_checked() {
    let out = modunit(&["validate", "--level-p", "5", "--level-f", "1"], &vectors("v0.json"));
    assert_eq!(out.status.code(), Some(0));
    let out = modunit(&["validate", "--level-p", "7"], &vectors("v0.json"));
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn vector_files_round_trip() {
    for name in ["v0.json", "v1.json", "v4.json", "l7.json", "l25.json"] {
        let text = fs::read_to_string(vectors(name)).unwrap();
        let file: VectorFile = serde_json::from_str(&text).unwrap();
        let v = file.to_vector().unwrap();
        assert_eq!(VectorFile::from_vector(&v).to_vector().unwrap(), v);
    }
}

#[test]
fn usage_errors_exit_one() {
    let out = Command::new(env!("CARGO_BIN_EXE_modunit")).arg("compute").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_modunit")).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
