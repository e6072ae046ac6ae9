use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn rookstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rookstat"))
        .args(args)
        .env_remove("ROOKSTAT_CAP")
        .output()
        .expect("spawn rookstat")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn stirling_value() {
    let o = rookstat(&["stirling", "--kind", "second", "--n", "8", "--k", "5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1050\n");
    let o = rookstat(&["stirling", "--kind", "first", "--n", "10", "--r", "3"]);
    assert_eq!(stdout(&o), "9450\n");
    let o = rookstat(&[
        "stirling", "--kind", "first", "--n", "10", "--k", "7", "--format", "csv",
    ]);
    assert_eq!(stdout(&o), "kind,n,k,r,value\nfirst,10,7,3,9450\n");
}

#[test]
fn bounds_json_carries_exact_terms() {
    let o = rookstat(&["bounds", "--n", "100", "--r", "10", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let d = v["d"].as_f64().unwrap();
    assert!((d - 3.1394).abs() < 1e-4, "{d}");
    for name in [
        "b1_a", "b1_l", "b1_al", "b1", "b2_a", "b2_l", "b2_al", "b2", "d", "p", "q",
    ] {
        let term = &v["exact"][name];
        let num: f64 = term["num"].as_str().unwrap().parse().unwrap();
        let den: f64 = term["den"].as_str().unwrap().parse().unwrap();
        let dec: f64 = term["decimal"].as_str().unwrap().parse().unwrap();
        assert!((num / den - dec).abs() <= 1e-12 * dec.abs().max(1.0), "{name}");
    }
    // p(100) = sum c^2 / N^2 = 328350 / 4950^2 = 199/14850
    assert_eq!(v["exact"]["p"]["num"], "199");
    assert_eq!(v["exact"]["p"]["den"], "14850");
    assert_eq!(v["cross_identity_holds"], false);
    assert_eq!(v["bounds"]["first"]["exact"], "1303715598515701800848151955950");
}

#[test]
fn sample_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let o = rookstat(&[
            "sample",
            "--model",
            "partition",
            "--n",
            "8",
            "--k",
            "5",
            "--samples",
            "1000",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("spectrum,probability"));
    let total: f64 = lines
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn sample_json_reports_counts() {
    let o = rookstat(&[
        "sample",
        "--model",
        "permutation",
        "--n",
        "30",
        "--r",
        "4",
        "--samples",
        "200",
        "--seed",
        "1",
        "--shards",
        "3",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let counts: u64 = v["law"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["count"].as_u64().unwrap())
        .sum();
    assert_eq!(counts, 200);
    assert_eq!(v["k"], 26);
    assert!(v["attempts"].as_u64().unwrap() >= 200);
}

#[test]
fn tv_and_cap_override() {
    let o = rookstat(&["tv", "--model", "partition", "--n", "8", "--k", "5", "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let lo: f64 = row[5].parse().unwrap();
    assert!((lo - 0.24572508544).abs() < 1e-10, "{out}");

    let o = rookstat(&["tv", "--model", "partition", "--n", "13", "--k", "11"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("cap"));
    let o = rookstat(&["tv", "--model", "partition", "--n", "13", "--k", "11", "--cap", "13"]);
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_rookstat"))
        .args(["tv", "--model", "partition", "--n", "13", "--k", "11"])
        .env("ROOKSTAT_CAP", "13")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn compare_streams_rows_in_increasing_r() {
    let o = rookstat(&[
        "compare", "--kind", "second", "--n", "40", "--k-min", "2", "--k-max", "39",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("kind,n,k,r,exact,"));
    let rs: Vec<usize> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(rs, (1..=38).collect::<Vec<_>>());

    let o = rookstat(&["compare", "--kind", "first", "--n", "12", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 12);
    assert_eq!(v[0]["r"], 0);
}

#[test]
fn encode_decode_round_trip() {
    let o = rookstat(&["encode", "--model", "permutation", "--structure", "(1 3 2)(4 5)"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let placement = stdout(&o).lines().next().unwrap().to_string();
    let o = rookstat(&["decode", "--model", "permutation", "--placement", &placement]);
    assert_eq!(stdout(&o).lines().nth(1), Some("(1 3 2)(4 5)"));
}

#[test]
fn invalid_config_exits_two_naming_the_field() {
    let cases: [(&[&str], &str); 7] = [
        (&["sample", "--model", "partition", "--n", "8", "--k", "5"], "seed"),
        (
            &["stirling", "--kind", "first", "--n", "8", "--k", "5", "--r", "3"],
            "k",
        ),
        (&["stirling", "--kind", "first", "--n", "8"], "k"),
        (&["bounds", "--n", "8", "--r", "9"], "r"),
        (
            &[
                "compare", "--kind", "first", "--n", "10", "--k-min", "8", "--k-max", "4",
            ],
            "k-max",
        ),
        (&["compare", "--kind", "first", "--n", "3000"], "n"),
        (
            &["decode", "--model", "partition", "--placement", "4;(2,1)"],
            "placement",
        ),
    ];
    for (args, field) in cases {
        let o = rookstat(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(
            stderr(&o).contains(&format!("invalid {field}")),
            "{args:?}: {}",
            stderr(&o)
        );
    }
    // clap-level errors share the exit status.
    assert_eq!(
        rookstat(&["stirling", "--kind", "third", "--n", "3", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bad_config_leaves_existing_output_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("keep.csv");
    fs::write(&path, "previous\n").unwrap();
    let o = rookstat(&[
        "sample",
        "--model",
        "partition",
        "--n",
        "8",
        "--k",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fs::read_to_string(&path).unwrap(), "previous\n");
}

#[test]
fn decoding_an_attacking_placement_is_a_runtime_error() {
    let o = rookstat(&["decode", "--model", "partition", "--placement", "4;(1,2),(1,3)"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn verify_reports_every_property() {
    let o = rookstat(&["verify"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 18, "{out}");
    assert!(out.lines().all(|l| l.starts_with("PASS ") || l.starts_with("FAIL ")));
    assert!(out.contains("FAIL bounds: d equals 4(b1 + b2)"));
    assert!(out.contains("PASS rook_board: decode(encode(x)) = x"));
    assert_eq!(o.status.code(), Some(1));
}
