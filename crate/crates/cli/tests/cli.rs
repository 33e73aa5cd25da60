use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn h4n(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_h4n")).args(args).env_remove("H4N_THREADS").output().expect("spawn h4n")
}

fn h4n_stdin(args: &[&str], input: &str) -> Output {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_h4n"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn h4n");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn schema(name: &str) -> jsonschema::Validator {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "schemas", name].iter().collect();
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = h4n(&full);
    assert!(code(&out) < 2, "{args:?}: {}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let validator = schema(schema_name);
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{args:?} violates {schema_name}: {errors:#?}");
    v
}

#[test]
fn verify_eight_dimensional_example() {
    let out = h4n(&["verify", "--family", "h4n", "--n", "2", "--a", "2"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("overall: pass"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn tensor_of_two_m0() {
    let out = h4n(&["tensor", "M0", "M0", "--family", "h4n", "--n", "1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("M0 + M1"), "{}", stdout(&out));
}

#[test]
fn green_table_csv_is_six_by_six() {
    let out = h4n(&["green-table", "--family", "wh4n", "--n", "1", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let labels = ["S0", "S1", "M0", "M1", "N0", "N1"];
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0].iter().skip(1).collect::<Vec<_>>(), labels);
    for (row, label) in rows[1..].iter().zip(labels) {
        assert_eq!(row.len(), 7);
        assert_eq!(&row[0], label);
    }
    assert_eq!(&rows[3][3], "1*M0+1*M1");
}

#[test]
fn defaults_are_h4n_n2_a1_text() {
    let out = h4n(&["catalog"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("catalog h4n(n=2, a=1)"), "{}", stdout(&out));
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["tensor", "Q9", "M0"],
        &["tensor", "M7", "M0", "--n", "2"],
        &["rmatrix", "--family", "wh4n"],
        &["verify", "--n", "0"],
        &["verify", "--a", "1/0"],
        &["verify", "--family", "h5n"],
        &["verify", "--format", "xml"],
        &["frobnicate"],
        &["decompose", "--input", "/nonexistent/module.json"],
    ];
    for args in cases {
        let out = h4n(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty(), "{args:?} wrote to stdout");
        assert!(!stderr(&out).is_empty());
    }
}

#[test]
fn invalid_module_input_exits_two() {
    let broken = r#"{"dim":2,"g":[["1","0"],["0","1"]],"x":[["0","1"],["0","0"]]}"#;
    let out = h4n_stdin(&["decompose", "--input", "-", "--n", "1"], broken);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("zx = q xz"), "{}", stderr(&out));
    let out = h4n_stdin(&["decompose", "--input", "-"], "not json");
    assert_eq!(code(&out), 2);
}

#[test]
fn decompose_reads_stdin() {
    let m0 = r#"{"dim":2,"g":[["1","0"],["0","-1"]],"x":[["0","0"],["1","0"]]}"#;
    let out = h4n_stdin(&["decompose", "--input", "-", "--n", "1"], m0);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("= M0"), "{}", stdout(&out));
}

#[test]
fn deviations_exit_one_and_are_labelled() {
    let out = h4n(&["catalog", "--family", "wh4n-dual", "--n", "2"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("deviation"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");

    let out = h4n(&["presentation", "--family", "wh4n-dual", "--n", "2"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("overall: deviation"));
}

#[test]
fn zero_a_prints_notice() {
    let out = h4n(&["verify", "--n", "1", "--a", "0"]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("a = 0"));
    let out = h4n(&["verify", "--family", "h4n-dual", "--a", "0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = h4n(&["catalog", "--family", "h4n-dual", "--a", "0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("a ≠ 0"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let args = ["green-table", "--family", "h4n-dual", "--n", "2", "--format", "csv"];
    let to_file = h4n(&[&args[..], &["--output", path.to_str().unwrap()]].concat());
    assert_eq!(code(&to_file), 0);
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), h4n(&args).stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["green-table", "--family", "wh4n", "--n", "2", "--format", "json"];
    let one = h4n(&[&args[..], &["--threads", "1"]].concat());
    let four = Command::new(env!("CARGO_BIN_EXE_h4n")).args(args).env("H4N_THREADS", "4").output().unwrap();
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn json_outputs_match_schemas() {
    for family in ["h4n", "wh4n", "h4n-dual", "wh4n-dual"] {
        for n in ["1", "2"] {
            let common = ["--family", family, "--n", n];
            let v = assert_valid("verify.json", &[&["verify"], &common[..]].concat());
            assert_eq!(v["family"], family);
            assert_valid("green-table.json", &[&["green-table"], &common[..]].concat());
            assert_valid("presentation.json", &[&["presentation"], &common[..]].concat());
            assert_valid("catalog.json", &[&["catalog"], &common[..]].concat());
        }
    }
    assert_valid("rmatrix.json", &["rmatrix", "--n", "2", "--a", "3/2"]);
    assert_valid("rmatrix.json", &["rmatrix", "--n", "1", "--a", "0"]);
    let v = assert_valid("decomposition.json", &["tensor", "M0", "M1", "--n", "2", "--certificate"]);
    assert_eq!(v["summands"].as_array().unwrap().len(), 2);
    assert_valid("decomposition.json", &["tensor", "M[2,0]", "P1", "N0", "--family", "wh4n-dual", "--n", "2"]);
}

#[test]
fn schemas_reject_malformed_reports() {
    let validator = schema("decomposition.json");
    let bad = serde_json::json!({
        "command": "tensor", "family": "h4n", "n": 1, "a": "1/1", "module": "M0 ⊗ M0",
        "summands": [{"label": "Q3", "multiplicity": 1}], "status": "pass"
    });
    assert!(!validator.is_valid(&bad));
}
