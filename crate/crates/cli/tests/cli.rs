use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_h3nr")).args(args).output().expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn cup_coker_contract() {
    assert_eq!(json_of(&["cup-coker", "--group", "3,3,3"]), json!({"invariant_factors": [3]}));
    assert_eq!(json_of(&["cup-coker", "--group", "9,3"]), json!({"invariant_factors": []}));
}

#[test]
fn h3nr_arithmetic_channels() {
    let v = json_of(&["h3nr", "--group", "3,3", "--local", r#"{"n":9,"local_degrees":[3,3]}"#]);
    assert_eq!(v["arithmetic_source"], "local-data");
    assert_eq!(v["full"]["total"], json!({"invariant_factors": [3]}));

    let v = json_of(&["h3nr", "--group", "3,3,3", "--h3", "3"]);
    assert_eq!(v["arithmetic_source"], "supplied");
    assert_eq!(v["full"]["total"], json!({"invariant_factors": [3, 3]}));

    let v = json_of(&["h3nr", "--group", "3,3,3"]);
    assert_eq!(v["arithmetic_source"], "omitted");
    assert_eq!(v["full"]["total"], Value::Null);
    assert_eq!(v["full"]["lattice"], json!({"invariant_factors": [3]}));

    let v = json_of(&["h3nr", "--group", "2,6", "--h3", "6"]);
    assert_eq!(v["full"], Value::Null);
    assert_eq!(v["two_part"], Value::Null);
    assert_eq!(v["two_part_status"], "undetermined-by-method");
    assert_eq!(v["p_parts"][0]["p"], 3);
}

#[test]
fn cohomology_brauer_dec() {
    let v = json_of(&["cohomology", "--group", "2,4", "--coeff", "norm-one", "--degree", "1"]);
    assert_eq!(v["cohomology"], json!({"invariant_factors": [2, 4]}));
    let v = json_of(&["cohomology", "--group", "3", "--coeff", "flasque-T", "--degree", "0"]);
    assert_eq!(v["cohomology"], json!({"invariant_factors": [], "free_rank": 1}));
    for coeff in ["regular", "sym2-T"] {
        let v = json_of(&["cohomology", "--group", "2,2", "--coeff", coeff, "--degree", "3"]);
        assert!(v["cohomology"]["invariant_factors"].is_array());
    }
    assert_eq!(json_of(&["brauer", "--group", "3,3"])["brauer"], json!({"invariant_factors": [3]}));
    assert_eq!(json_of(&["dec", "--group", "3,3"])["quotient"], json!({"invariant_factors": []}));
}

#[test]
fn verify_exit_codes() {
    let v = json_of(&["verify", "--max-order", "6", "--include-table-groups"]);
    assert_eq!(v["all_passed"], true);
    assert!(v["cells"].as_array().unwrap().iter().any(|c| c["group"] == "S3"));
    let out = run(&["verify", "--max-order", "4", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_input_exits_with_2() {
    for args in [
        &["cup-coker", "--group", "0,3"][..],
        &["cup-coker", "--group", "a"],
        &["h3nr", "--group", "3,3", "--local", r#"{"n":27,"local_degrees":[3]}"#],
        &["h3nr", "--group", "3,3", "--local", "not json"],
        &["h3nr", "--group", "3,3", "--h3", "3,3"],
        &["h3nr", "--group", "3,3", "--h3", "27"],
        &["h3nr", "--group", "3", "--h3", "3", "--local", r#"{"n":3,"local_degrees":[]}"#],
        &["cohomology", "--group", "2", "--coeff", "bogus", "--degree", "1"],
        &["cohomology", "--group", "2", "--coeff", "regular", "--degree", "7"],
        &["no-such-command"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn text_format() {
    let out = run(&["cup-coker", "--group", "3,3,3", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Z/3"));
}
