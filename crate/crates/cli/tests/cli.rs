use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matpoisson")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bracket_of_generators() {
    let o = run(&["bracket", "x[1][1]", "x[2][2]", "--shape", "2x2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2*x[1][2]*x[2][1]");
}

#[test]
fn determinant_commutes_with_corner() {
    let o = run(&["bracket", "det(1,2;1,2)", "x[1][1]", "--n", "2"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn malformed_expression_exits_two_with_caret() {
    let o = run(&["bracket", "x[1][1] + * 2", "x[1][1]", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    let lines: Vec<&str> = err.lines().collect();
    let src_line = lines.iter().position(|l| l.contains("x[1][1] + * 2")).unwrap();
    assert_eq!(lines[src_line + 1].find('^'), lines[src_line].find('*'));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "bogus"]).status.code(), Some(2));
}

#[test]
fn kz_commands() {
    let o = run(&["kz", "3", "1,2,1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("all 3 pairs commute"));
    assert_eq!(s.matches("Δ_{").count(), 3);
    let o = run(&["kz", "3", "--all-words", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["systems"].as_array().unwrap().len(), 2);
    assert_eq!(run(&["kz", "3", "1,1,2"]).status.code(), Some(2));
}

#[test]
fn determinant_flow_is_constant() {
    let dir = std::env::temp_dir().join(format!("matpoisson-cli-det-{}", std::process::id()));
    let d = dir.to_str().unwrap();
    let o = run(&["flow", "det(1,2,3;1,2,3)", "--n", "3", "--seed", "4", "--numeric", "--out", d]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(rows.len() > 2);
    for r in &rows {
        for (a, b) in r[2..20].iter().zip(&rows[0][2..20]) {
            assert!((a - b).abs() < 1e-12);
        }
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn corner_flow_cross_validates() {
    let o = run(&["flow", "x[3][1]", "--n", "3", "--seed", "2", "--arclength", "2", "--both", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cross_validation"]["pass"], true);
}

#[test]
fn gz_flow_on_identity_is_singular() {
    let path = std::env::temp_dir().join(format!("matpoisson-cli-id-{}.json", std::process::id()));
    std::fs::write(&path, "[[1,0,0],[0,1,0],[0,0,1]]").unwrap();
    let o = run(&["gz-flow", "3", "--member", "1", "--x0", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    std::fs::remove_file(path).ok();
}

#[test]
fn gz_flow_cross_validates() {
    let o = run(&["gz-flow", "3", "--member", "0", "--seed", "7", "--arclength", "0.5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cross_validation"]["pass"], true);
}

#[test]
fn custom_chain_file() {
    let path = std::env::temp_dir().join(format!("matpoisson-cli-chain-{}.json", std::process::id()));
    std::fs::write(&path, r#"[{"drop_row": 1, "drop_col": 1}, {"drop_row": 1, "drop_col": 1}]"#).unwrap();
    let o = run(&["gz", "3", "--chain", path.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["hamiltonians"].as_array().unwrap().len(), 6);
    std::fs::write(&path, r#"[{"drop_row": 4, "drop_col": 1}, {"drop_row": 1, "drop_col": 1}]"#).unwrap();
    assert_eq!(run(&["gz", "3", "--chain", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_file(path).ok();
}

#[test]
fn rank_and_bivector_csv() {
    let dir = std::env::temp_dir().join(format!("matpoisson-cli-rank-{}", std::process::id()));
    let o = run(&["rank", "--n", "3", "--seed", "1", "--out", dir.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "6");
    let csv = std::fs::read_to_string(dir.join("bivector.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn verify_reports_are_reproducible() {
    let a = run(&["verify", "algebra", "--n", "3", "--seed", "42", "--json"]);
    let b = run(&["verify", "algebra", "--n", "3", "--seed", "42", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("stamp");
        v.to_string()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn verify_suites_pass() {
    for (suite, n) in [("kz", "3,4"), ("flows", "3"), ("gz", "3")] {
        let o = run(&["verify", suite, "--n", n, "--seed", "42"]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
        assert!(stdout(&o).contains(", 0 failed"));
    }
}
