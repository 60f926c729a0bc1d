//! End-to-end tests of the `resolvent` binary: exit codes, JSON payloads,
//! determinism, and validation of every printed envelope against the
//! published schema.

use std::io::Write;
use std::process::Command;
use std::sync::OnceLock;

use jsonschema::Validator;
use serde_json::Value;
use tempfile::NamedTempFile;

fn run(args: &[&str], envs: &[(&str, &str)]) -> (i32, String, String) {
    let mut command = Command::new(env!("CARGO_BIN_EXE_resolvent"));
    command.args(args);
    // Hygiene: an ambient lane override would break pinned expectations.
    command.env_remove("RESOLVENT_LANES");
    for (key, value) in envs {
        command.env(key, value);
    }
    let output = command.output().expect("the binary runs");
    (
        output.status.code().expect("no signal termination"),
        String::from_utf8(output.stdout).expect("stdout is UTF-8"),
        String::from_utf8(output.stderr).expect("stderr is UTF-8"),
    )
}

fn validator() -> &'static Validator {
    static VALIDATOR: OnceLock<Validator> = OnceLock::new();
    VALIDATOR.get_or_init(|| {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schemas/report.schema.json");
        let schema: Value =
            serde_json::from_str(&std::fs::read_to_string(path).expect("schema file exists"))
                .expect("schema file is JSON");
        jsonschema::validator_for(&schema).expect("the published schema compiles")
    })
}

/// Parses stdout as JSON and validates it against the published schema.
fn envelope(stdout: &str) -> Value {
    let value: Value = serde_json::from_str(stdout).expect("stdout is one JSON document");
    if let Err(error) = validator().validate(&value) {
        panic!("schema violation: {error}\nenvelope: {value:#}");
    }
    value
}

fn temp_file(contents: &str) -> NamedTempFile {
    let mut file = NamedTempFile::new().expect("temp file");
    file.write_all(contents.as_bytes()).expect("write");
    file
}

fn matrix_file() -> NamedTempFile {
    temp_file("2 3\n1 1 1\n1 2 1/2\n2 3 -2\n3 3 1/3\n")
}

fn counterexample_file() -> NamedTempFile {
    let mut text = String::from("3 27\n1 1 1 -1/10\n");
    for i in 2..=27 {
        text.push_str(&format!("1 {i} {i} 1/78\n"));
    }
    temp_file(&text)
}

#[test]
fn counterexample_emits_the_full_certificate_chain() {
    let (code, stdout, _) = run(&["counterexample", "--param", "26", "--search-bound", "100"], &[]);
    assert_eq!(code, 0, "informational command exits 0");
    let doc = envelope(&stdout);
    assert_eq!(doc["command"], "counterexample");
    let payload = &doc["payload"];
    assert_eq!(payload["kappa4"], "-1389/549250");
    assert_eq!(payload["closed_form"], "-1389/549250");
    assert_eq!(payload["minimal_negative_parameter"], 26);
    assert_eq!(payload["report"]["verdict"], "not-a-moment-sequence");
    assert_eq!(payload["report"]["certificate"]["kind"], "even-negative");
    assert_eq!(payload["report"]["certificate"]["index"], 4);
    assert_eq!(payload["sequence"]["values"].as_array().unwrap().len(), 5);
    assert!(payload["tensor"].as_str().unwrap().starts_with("3 27\n1 1 1 -1/10\n"));
}

#[test]
fn enumerate_reports_counts_and_classes() {
    let (code, stdout, _) = run(&["enumerate", "--p", "3", "--k", "4"], &[]);
    assert_eq!(code, 0);
    let doc = envelope(&stdout);
    assert_eq!(doc["payload"]["total"], 10395);
    assert_eq!(doc["payload"]["connected"], 9720);
    assert_eq!(doc["payload"]["disconnected"], 675);

    let (code, stdout, _) =
        run(&["enumerate", "--p", "2", "--k", "3", "--classes", "--connected"], &[]);
    assert_eq!(code, 0);
    let doc = envelope(&stdout);
    let classes = doc["payload"]["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 1, "the only connected 2-regular class is the cycle");
    assert_eq!(classes[0]["multiplicity"], 8, "2^(k-1) (k-1)! = 8 for k = 3");
    let connected = doc["payload"]["connected"].as_u64().unwrap();
    assert_eq!(connected, 8);
}

#[test]
fn check_accepts_gaussian_moments_and_rejects_the_counterexample() {
    let gaussian = temp_file("1\n0\n1\n0\n3\n");
    let (code, stdout, _) =
        run(&["check", "--sequence", gaussian.path().to_str().unwrap()], &[]);
    assert_eq!(code, 0);
    let doc = envelope(&stdout);
    assert_eq!(doc["payload"]["report"]["verdict"], "moment-sequence-possible");
    assert_eq!(doc["payload"]["report"]["certificate"], Value::Null);

    let tensor = counterexample_file();
    let (code, stdout, _) = run(
        &["check", "--tensor", tensor.path().to_str().unwrap(), "--k", "4"],
        &[],
    );
    assert_eq!(code, 3, "not-a-moment-sequence exits 3");
    let doc = envelope(&stdout);
    assert_eq!(doc["payload"]["report"]["verdict"], "not-a-moment-sequence");
    assert_eq!(doc["payload"]["report"]["certificate"]["kind"], "even-negative");
    assert_eq!(doc["payload"]["sequence"]["values"][4], "-463/800806500");
}

#[test]
fn moments_backends_agree_and_float_mode_emits_numbers() {
    let tensor = matrix_file();
    let path = tensor.path().to_str().unwrap();
    let (code, wick_out, _) =
        run(&["moments", "--tensor", path, "--k", "4", "--backend", "wick"], &[]);
    assert_eq!(code, 0);
    let (code, contraction_out, _) = run(&["moments", "--tensor", path, "--k", "4"], &[]);
    assert_eq!(code, 0);
    let wick = envelope(&wick_out);
    let contraction = envelope(&contraction_out);
    assert_eq!(wick["payload"]["values"], contraction["payload"]["values"]);
    assert_eq!(wick["payload"]["values"][0], "1");
    assert_eq!(wick["input_digest"], contraction["input_digest"]);

    let (code, float_out, _) = run(&["moments", "--tensor", path, "--k", "4", "--float"], &[]);
    assert_eq!(code, 0);
    let float = envelope(&float_out);
    let values = float["payload"]["values"].as_array().unwrap();
    assert!(values.iter().all(Value::is_number), "float mode emits JSON numbers");
}

#[test]
fn mc_is_deterministic_and_verifies_the_identity() {
    let tensor = matrix_file();
    let path = tensor.path().to_str().unwrap();
    let args =
        ["mc", "--tensor", path, "--y", "6", "--samples", "4000", "--seed", "11", "--lanes", "3"];
    let (code_a, out_a, _) = run(&args, &[]);
    let (code_b, out_b, _) = run(&args, &[]);
    assert_eq!((code_a, code_b), (0, 0));
    let (doc_a, doc_b) = (envelope(&out_a), envelope(&out_b));
    assert_eq!(
        doc_a["payload"], doc_b["payload"],
        "same (tensor, y, samples, seed, lanes) must give identical estimates"
    );
    assert_eq!(doc_a["payload"]["resolvent"]["lanes"], 3);

    let (code, stdout, _) = run(
        &[
            "mc",
            "--tensor",
            path,
            "--y",
            "8",
            "--samples",
            "20000",
            "--seed",
            "11",
            "--verify-identity",
        ],
        &[],
    );
    assert_eq!(code, 0);
    let doc = envelope(&stdout);
    assert_eq!(doc["payload"]["identity"]["within_tolerance"], true);
}

#[test]
fn mc_lane_count_falls_back_to_the_environment() {
    let tensor = matrix_file();
    let path = tensor.path().to_str().unwrap();
    let args = ["mc", "--tensor", path, "--y", "6", "--samples", "1000", "--seed", "5"];
    let (code, stdout, _) = run(&args, &[("RESOLVENT_LANES", "2")]);
    assert_eq!(code, 0);
    assert_eq!(envelope(&stdout)["payload"]["resolvent"]["lanes"], 2);
    let (code, stdout, _) = run(&args, &[]);
    assert_eq!(code, 0);
    assert_eq!(envelope(&stdout)["payload"]["resolvent"]["lanes"], 4, "default is 4");
    let (code, _, _) = run(&args, &[("RESOLVENT_LANES", "zero")]);
    assert_eq!(code, 2, "a malformed lane override is a usage error");
}

#[test]
fn recover_matrix_passes_for_a_matrix_and_fails_cleanly_for_a_cubic() {
    let tensor = matrix_file();
    let (code, stdout, _) = run(
        &["recover-matrix", "--tensor", tensor.path().to_str().unwrap(), "--k", "6"],
        &[],
    );
    assert_eq!(code, 0);
    let doc = envelope(&stdout);
    assert_eq!(doc["payload"]["passed"], true);
    assert_eq!(doc["payload"]["discrepancies"].as_array().unwrap().len(), 0);

    let cubic = counterexample_file();
    let (code, stdout, stderr) = run(
        &["recover-matrix", "--tensor", cubic.path().to_str().unwrap(), "--k", "4"],
        &[],
    );
    assert_eq!(code, 1, "an order-3 tensor is a computational error here");
    assert!(stdout.is_empty());
    let error: Value = serde_json::from_str(&stderr).expect("stderr is a JSON error object");
    assert_eq!(error["error"]["kind"], "not-a-matrix");
}

#[test]
fn usage_errors_exit_two() {
    let tensor = matrix_file();
    let path = tensor.path().to_str().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["moments", "--tensor", path],
        vec!["check", "--tensor", path],
        vec!["check"],
        vec!["moments", "--tensor", path, "--k", "0"],
        vec!["enumerate", "--p", "9", "--k", "9"],
        vec!["mc", "--tensor", path, "--y", "4", "--samples", "100", "--seed", "1", "--lanes", "0"],
    ] {
        let (code, _, stderr) = run(&args, &[]);
        assert_eq!(code, 2, "args {args:?} must be a usage error; stderr: {stderr}");
    }
    let gaussian = temp_file("1\n");
    let (code, _, _) = run(
        &[
            "check",
            "--tensor",
            path,
            "--k",
            "2",
            "--sequence",
            gaussian.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code, 2, "tensor and sequence inputs are mutually exclusive");
}

#[test]
fn computational_errors_exit_one_with_a_json_object() {
    let broken = temp_file("3 2\n1 1 3 1\n");
    let (code, stdout, stderr) = run(
        &["moments", "--tensor", broken.path().to_str().unwrap(), "--k", "2"],
        &[],
    );
    assert_eq!(code, 1);
    assert!(stdout.is_empty());
    let error: Value = serde_json::from_str(&stderr).expect("stderr is a JSON error object");
    assert_eq!(error["error"]["kind"], "tensor-parse");
    assert!(error["error"]["message"].as_str().unwrap().contains("line 2"));

    let missing = run(&["moments", "--tensor", "/nonexistent/tensor.txt", "--k", "2"], &[]);
    assert_eq!(missing.0, 1);

    let empty = temp_file("# only a comment\n");
    let (code, _, stderr) =
        run(&["check", "--sequence", empty.path().to_str().unwrap()], &[]);
    assert_eq!(code, 1);
    let error: Value = serde_json::from_str(&stderr).unwrap();
    assert_eq!(error["error"]["kind"], "empty-sequence");
}

#[test]
fn envelope_metadata_is_well_formed() {
    let (code, stdout, _) = run(&["enumerate", "--p", "2", "--k", "2"], &[]);
    assert_eq!(code, 0);
    let doc = envelope(&stdout);
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    let digest = doc["input_digest"].as_str().unwrap();
    assert!(digest.starts_with("sha256:") && digest.len() == 7 + 64);
    assert!(doc["notes"].as_array().unwrap().iter().all(Value::is_string));
}
