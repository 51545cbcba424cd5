use std::path::Path;
use std::process::{Command, Output};

use chevalley_cli::{parse_report, Status};

fn chevalley(args: &[&str], cache: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_chevalley"));
    c.args(args).env_remove("CHEVALLEY_CACHE_DIR");
    if let Some(d) = cache {
        c.env("CHEVALLEY_CACHE_DIR", d);
    }
    c.output().expect("binary runs")
}

#[test]
fn unsupported_type_exits_2() {
    let out = chevalley(&["invariants", "--type", "E8"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E8"));
}

#[test]
fn malformed_type_and_bad_tolerance_exit_2() {
    assert_eq!(chevalley(&["invariants", "--type", "Q2"], None).status.code(), Some(2));
    let out = chevalley(&["verify-statement", "--type", "B2", "--tol", "-1"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tampered_cache_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(chevalley(&["invariants", "--type", "B2", "--out", d], None).status.code(), Some(0));
    let path = dir.path().join("B2.json");
    assert_eq!(chevalley(&["invariants", "--type", "B2"], Some(dir.path())).status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let i = text.find("\"sha256\":\"").unwrap() + 10;
    let flipped = if &text[i..i + 1] == "0" { "1" } else { "0" };
    std::fs::write(&path, format!("{}{flipped}{}", &text[..i], &text[i + 1..])).unwrap();
    let out = chevalley(&["invariants", "--type", "B2"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn b2_suite_passes_with_c_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"type": "B2", "command": "all", "seed": 1, "fibers": 5, "pairs": 1000, "fiber_points": 800}"#,
    )
    .unwrap();
    let out = chevalley(&["--config", cfg.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = parse_report(&out.stdout).unwrap();
    assert!(r.checks.iter().all(|c| c.status == Status::Pass));
    let det = r.checks.iter().find(|c| c.name == "det-factorization").unwrap();
    assert_eq!(det.metrics["c"], serde_json::json!(4.0));
    assert_eq!(det.metrics["c_exact"], serde_json::json!("4"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"type": "B3", "command": "verify-jacobian", "seed": 5}"#).unwrap();
    let out = chevalley(&["--config", cfg.to_str().unwrap(), "--type", "G2", "--seed", "9"], None);
    assert_eq!(out.status.code(), Some(0));
    let r = parse_report(&out.stdout).unwrap();
    assert_eq!(r.provenance.ty.as_deref(), Some("G2"));
    assert_eq!(r.provenance.seed, 9);
}

#[test]
fn unknown_config_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"type": "B2", "command": "all", "tolerance": 1}"#).unwrap();
    assert_eq!(chevalley(&["--config", cfg.to_str().unwrap()], None).status.code(), Some(2));
}

#[test]
fn identical_runs_give_identical_reports() {
    let args = ["morse", "--type", "B2", "--fibers", "3", "--seed", "4"];
    let strip = |o: Output| {
        let mut r = parse_report(&o.stdout).unwrap();
        r.runtime_secs = 0.0;
        r
    };
    assert_eq!(strip(chevalley(&args, None)), strip(chevalley(&args, None)));
}

#[test]
fn report_subcommand_reproduces_a_saved_report() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("r.json");
    let out = chevalley(&["verify-jacobian", "--type", "H3", "--out", saved.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let again = chevalley(&["report", saved.to_str().unwrap()], None);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(again.stdout, std::fs::read(&saved).unwrap());
    let text = chevalley(&["report", saved.to_str().unwrap(), "--format", "text"], None);
    assert!(String::from_utf8_lossy(&text.stdout).contains("pass    det-factorization"));
}

#[test]
fn whitney_writes_pair_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pairs.csv");
    let out = chevalley(
        &["whitney", "--type", "A1", "--pairs", "200", "--csv", csv.to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("u,v,euclid,geodesic,ratio\n"));
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn every_subcommand_explains_one_claim() {
    let all = chevalley(&["--explain"], None);
    let all = String::from_utf8(all.stdout).unwrap();
    for cmd in chevalley_cli::Command::ALL {
        let out = chevalley(&[cmd.name(), "--explain"], None);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().count(), 1, "{text}");
        assert!(text.starts_with(&format!("{}: ", cmd.name())));
        assert!(all.contains(&text));
        assert!(!text.contains('§'));
    }
}
