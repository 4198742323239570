use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kcomplete"))
        .args(args)
        .output()
        .unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn certify_exit_code_tracks_cubic_irreducibility() {
    for b in 0..7i64 {
        let curve = format!("weierstrass:7:0,0,0,1,{b}");
        let o = run(&["certify", "--curve", &curve, "--law", "bosma-lenstra"]);
        if (4 + 27 * b * b) % 7 == 0 {
            assert_eq!(o.status.code(), Some(2), "{curve}");
            continue;
        }
        let irreducible = (0..7).all(|x| (x * x * x + x + b) % 7 != 0);
        let want = if irreducible { 0 } else { 1 };
        assert_eq!(o.status.code(), Some(want), "{curve}");
        let v = json(&o);
        assert_eq!(v["curve"], curve.as_str());
        assert_eq!(v["field"], "7^1:0,1");
    }
}

#[test]
fn discover_laws_reports_dimension_three() {
    let o = run(&[
        "discover-laws",
        "--model",
        "weierstrass",
        "--bidegree",
        "2,2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["dimension"], 3);
    assert_eq!(v["seed"], 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&[
            "certify",
            "--curve",
            "weierstrass:6:0,0,0,1,1",
            "--law",
            "bosma-lenstra"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&["certify", "--curve", "edwards:7", "--law", "edwards"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["hyperplane", "--q", "5", "--d", "2", "--r0", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["discover-laws", "--bidegree", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn validate_bundled_laws_reports_the_printed_edwards_tuple() {
    let o = run(&["validate-laws"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let laws = v["result"]["laws"].as_array().unwrap();
    for l in laws {
        let agrees = l["report"]["agrees"].as_bool().unwrap();
        assert_eq!(agrees, l["law"] != "edwards-printed", "{}", l["law"]);
    }
    let o = run(&["validate-laws", "--curve", "hessian:13:2,1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn out_flag_writes_the_same_document() {
    let dir = std::env::temp_dir().join(format!("kcomplete-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g2.json");
    let args = ["g2-count", "--curve", "hyper:5:1,0,0,0,0,0,1", "--ext", "2"];
    let stdout = run(&args).stdout;
    let o = run(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
    assert_eq!(json(&Output { stdout, ..o })["result"]["points"], 46);
    std::fs::remove_dir_all(dir).unwrap();
}
