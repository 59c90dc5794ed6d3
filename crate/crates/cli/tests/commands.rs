use std::process::Command;

fn qgreedy(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qgreedy")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn csv_column(text: &str, column: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == column).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

fn section<'a>(text: &'a str, name: &str) -> &'a str {
    let start = text.find(&format!("# {name}\n")).unwrap() + name.len() + 3;
    let rest = &text[start..];
    &rest[..rest.find("\n#").map_or(rest.len(), |i| i + 1)]
}

#[test]
fn bootstrap_stage_examples() {
    let (code, out, err) = qgreedy(&["bootstrap", "--max-m", "4", "--iters", "1", "--format", "csv"]);
    assert_eq!(code, 0, "{err}");
    let s1: Vec<f64> = csv_column(section(&out, "bootstrap"), "stage1").iter().map(|v| v.parse().unwrap()).collect();
    for (v, want) in s1.iter().zip([1.0, 1.41421356, 1.73205081, 2.0]) {
        assert!((v - want).abs() < 1e-8);
    }
    let (_, out, _) = qgreedy(&["bootstrap", "--max-m", "2", "--iters", "2", "--format", "csv"]);
    let s2: f64 = csv_column(section(&out, "bootstrap"), "stage2")[1].parse().unwrap();
    assert!((s2 - 2.0 / 1.5f64.sqrt()).abs() < 1e-15);
    let (_, out, _) = qgreedy(&["bootstrap", "--max-m", "5", "--iters", "0", "--format", "csv"]);
    assert!(csv_column(section(&out, "bootstrap"), "stage0").iter().all(|v| v == "1"));
    assert!(!out.contains('\r'));
}

#[test]
fn analyze_unit_exact_table() {
    let (code, out, err) = qgreedy(&[
        "analyze", "--zoo", "unit", "--p", "0.5", "--dim", "10", "--max-m", "8", "--mode", "exact", "--format", "csv",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(err.is_empty());
    let table = section(&out, "democracy");
    for col in ["phi_u_lo", "phi_u_hi", "phi_l_lo", "phi_l_hi"] {
        let values: Vec<f64> = csv_column(table, col).iter().map(|v| v.parse().unwrap()).collect();
        assert_eq!(values, (1..=8).map(|m| (m * m) as f64).collect::<Vec<_>>(), "{col}");
    }
}

#[test]
fn analyze_difference_is_not_democratic() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = qgreedy(&[
        "analyze",
        "--zoo",
        "difference",
        "--p",
        "0.5",
        "--dim",
        "12",
        "--budget",
        "2000",
        "--format",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.contains("verdict,not democratic"));
    let cond = std::fs::read_to_string(dir.path().join("conditionality.csv")).unwrap();
    let lows: Vec<f64> = csv_column(&cond, "k_m_lo").iter().map(|v| v.parse().unwrap()).collect();
    for m in 1..=6 {
        assert!(lows[m - 1] >= (4 * m * m) as f64, "m={m}: {}", lows[m - 1]);
    }
    for name in ["democracy.csv", "constants.csv", "embedding.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn analyze_json_is_one_object() {
    let (code, out, err) = qgreedy(&[
        "analyze", "--zoo", "block_l2", "--p", "4", "--blocks", "2,2", "--budget", "200", "--format", "json",
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["democracy"].is_array());
    assert!(v["constants"]["unconditional"]["lower"].is_number());
    assert!(v.get("conditionality").is_none());
}

#[test]
fn bad_duals_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"ambient":{"kind":"lp","p":0.5,"dim":2},"vectors":[[1.0,0.0],[0.0,1.0]],"duals":[[1.0,0.0],[0.3,1.0]]}"#,
    )
    .unwrap();
    let (code, out, err) = qgreedy(&["analyze", "--basis", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(out.is_empty());
    assert!(err.contains("biorthogonality") && err.contains("n=1, k=0"), "{err}");
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["analyze", "--zoo", "nosuch", "--p", "1", "--dim", "3"][..],
        &["analyze", "--zoo", "unit", "--dim", "3"],
        &["analyze", "--zoo", "unit", "--p", "0", "--dim", "3"],
        &["analyze", "--zoo", "unit", "--p", "1", "--dim", "3", "--mode", "fast"],
        &["analyze", "--zoo", "unit", "--p", "1", "--dim", "30", "--mode", "exact"],
        &["analyze", "--basis", "/nonexistent/basis.json"],
        &["verify", "nosuch"],
        &["bootstrap", "--max-m", "0"],
        &["-p", "1"],
    ] {
        let (code, out, err) = qgreedy(args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_suites_report_lines() {
    let (code, out, _) = qgreedy(&["verify", "strongly-absolute", "--p", "0.5", "--trials", "10000", "--seed", "7"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("PASS strongly absolute inequality: 30000 checks, 0 violations"));
    let (code, out, _) = qgreedy(&["verify", "democracy-lp", "--p", "0.5", "--dim", "12"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("slope 2.000000"));
    for suite in ["counting", "square-function", "succ", "lemma33"] {
        let (code, out, _) = qgreedy(&["verify", suite]);
        assert_eq!(code, 0, "{suite}: {out}");
        assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 3, "{suite}: {out}");
    }
}

#[test]
fn verify_failure_exits_one_with_witness() {
    let (code, out, _) = qgreedy(&["verify", "bootstrap", "--max-m", "100000", "--iters", "3"]);
    assert_eq!(code, 1);
    assert!(out.contains("PASS stage1 equals sqrt(m)"));
    assert!(out.contains("PASS stage2 equals m/sqrt(H_m)"));
    assert!(out.contains("FAIL stage3/m Cauchy"));
    assert!(out.contains("  witness: "), "{out}");
}

#[test]
fn zoo_emit_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    let (code, _, err) = qgreedy(&[
        "zoo",
        "emit",
        "--zoo",
        "perturbed_unit",
        "--p",
        "0.5",
        "--dim",
        "5",
        "--zoo-seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let direct = qgreedy(&[
        "analyze",
        "--zoo",
        "perturbed_unit",
        "--p",
        "0.5",
        "--dim",
        "5",
        "--zoo-seed",
        "3",
        "--budget",
        "300",
        "--format",
        "csv",
    ]);
    let from_file = qgreedy(&["analyze", "--basis", path.to_str().unwrap(), "--budget", "300", "--format", "csv"]);
    assert_eq!(direct.0, 0);
    assert_eq!(section(&direct.1, "democracy"), section(&from_file.1, "democracy"));
    let (code, out, _) = qgreedy(&["zoo", "list"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);
}
