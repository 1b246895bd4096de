use std::process::{Command, Output};

use serde_json::Value;

fn cartier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartier"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn assert_error_line(o: &Output, code: i32, kind: &str) {
    assert_eq!(o.status.code(), Some(code), "stderr: {}", stderr(o));
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "stderr not one line: {err:?}");
    assert!(err.starts_with(&format!("error: {kind}: ")), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn invariants_json() {
    let o = cartier(&["invariants", "--p", "3", "--poly", "0,1,0,0,0,1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "cartier-report/1");
    assert_eq!(v["genus"], 2);
    assert_eq!(v["rank_A"], 2);
    assert_eq!(v["a_number"], 0);
    assert_eq!(v["p_rank"], 2);
    assert_eq!(v["smooth"], true);
}

#[test]
fn invariants_extension_field_csv() {
    let o = cartier(&[
        "invariants",
        "--p",
        "3",
        "--k",
        "2",
        "--mod",
        "[1,0,1]",
        "--poly",
        "0,[0,1],0,0,0,1",
        "--csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("p,k,genus,coeffs,a_number,p_rank,smooth")
    );
    let row = lines.next().unwrap();
    assert!(
        row.starts_with("3,2,2,\"[0,0];[0,1];[0,0];[0,0];[0,0];[1,0]\","),
        "{row}"
    );
}

#[test]
fn even_degree_is_unsupported() {
    let o = cartier(&["invariants", "--p", "5", "--poly", "1,0,0,0,1"]);
    assert_error_line(&o, 3, "unsupported");
}

#[test]
fn invalid_inputs_exit_2() {
    assert_error_line(
        &cartier(&["invariants", "--p", "9", "--poly", "0,1,0,1"]),
        2,
        "invalid-input",
    );
    assert_error_line(
        &cartier(&["invariants", "--p", "2", "--poly", "0,1,0,1"]),
        2,
        "invalid-input",
    );
    assert_error_line(
        &cartier(&[
            "invariants",
            "--p",
            "3",
            "--k",
            "2",
            "--mod",
            "[2,0,1]",
            "--poly",
            "0,1,0,1",
        ]),
        2,
        "invalid-input",
    );
    assert_error_line(
        &cartier(&["invariants", "--p", "3", "--poly", "0,x,1"]),
        2,
        "invalid-input",
    );
    assert_error_line(&cartier(&["frobnicate"]), 2, "invalid-input");
    assert_error_line(&cartier(&["search", "--p", "3"]), 2, "invalid-input");
}

#[test]
fn budget_exceeded_exit_4() {
    let o = cartier(&["search", "--p", "7", "--genus", "4", "--budget", "1000"]);
    assert_error_line(&o, 4, "budget-exceeded");
}

#[test]
fn search_even_degree_is_unsupported() {
    let o = cartier(&["search", "--p", "3", "--degree", "6"]);
    assert_error_line(&o, 3, "unsupported");
}

#[test]
fn help_and_version_succeed() {
    let o = cartier(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("reproduce"));
    assert!(cartier(&["--version"]).status.success());
}

#[test]
fn search_witnesses_agree_with_invariants() {
    let o = cartier(&[
        "search",
        "--p",
        "5",
        "--genus",
        "2",
        "--target-a",
        "1",
        "--require-smooth",
        "--limit",
        "5",
        "--csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        let poly = fields[3].replace(';', ",");
        let inv = cartier(&["invariants", "--p", "5", "--poly", &poly]);
        let v: Value = serde_json::from_str(&stdout(&inv)).unwrap();
        assert_eq!(v["a_number"].to_string(), fields[4]);
        assert_eq!(v["p_rank"].to_string(), fields[5]);
        assert_eq!(fields[6], "true");
    }
}

#[test]
fn search_report_is_thread_independent_without_timing() {
    let run = |threads: &str| {
        let o = cartier(&[
            "search",
            "--p",
            "3",
            "--k",
            "2",
            "--genus",
            "2",
            "--target-a",
            "1",
            "--threads",
            threads,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        stdout(&o)
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    let v: Value = serde_json::from_str(&one).unwrap();
    assert_eq!(v["kind"], "search");
    assert_eq!(v["elapsed_ms"], Value::Null);
    assert_eq!(v["counts"]["enumerated"], 6561);
}

#[test]
fn timing_flag_keeps_elapsed() {
    let o = cartier(&["search", "--p", "3", "--genus", "2", "--timing"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["elapsed_ms"].is_u64());
}

#[test]
fn factor_and_fix_define_the_family() {
    let o = cartier(&[
        "search", "--p", "7", "--degree", "5", "--factor", "0,-1,1", "--fix", "c3=1", "--free",
        "0,1,2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["counts"]["enumerated"], 343);
    for w in v["witnesses"].as_array().unwrap() {
        let c = w["coeffs"].as_array().unwrap();
        assert_eq!(c[0], 0);
        assert_eq!(c[5], 1);
    }
}

#[test]
fn verify_exit_codes() {
    let ok = cartier(&["verify", "theorem1", "--p", "3", "--genus", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let v: Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert_eq!(v["kind"], "consistency");
    assert_eq!(v["pass"], true);

    let small = cartier(&["verify", "theorem1", "--p", "5", "--genus", "3"]);
    assert_error_line(&small, 2, "invalid-input");

    let witnesses = cartier(&["verify", "p-rank-witnesses", "--p", "5"]);
    assert_eq!(witnesses.status.code(), Some(0));

    // The rank-one form claim does not hold for singular f; see the README.
    let form = cartier(&["verify", "prop-p5"]);
    assert_eq!(form.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&form)).unwrap();
    assert_eq!(v["pass"], false);
    assert!(v["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .all(|w| w["smooth"] == false));
}

#[test]
fn reproduce_writes_report_file() {
    let dir = std::env::temp_dir().join(format!("cartier-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("script2.json");
    let o = cartier(&[
        "reproduce",
        "--script",
        "2",
        "--samples",
        "5000",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("expected N=0, observed 0, PASS"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], "cartier-report/1");
    assert_eq!(v["report"]["counts"]["enumerated"], 5000);
    assert_eq!(v["report"]["seed"], 7);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reproduce_rejects_unknown_script() {
    assert_error_line(
        &cartier(&["reproduce", "--script", "3"]),
        2,
        "invalid-input",
    );
}
