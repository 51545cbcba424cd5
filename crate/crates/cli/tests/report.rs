use chevalley_cli::{
    claim, emit_report, parse_report, run_suite, Check, Command, Format, RunConfig, Status,
    SuiteReport, SCHEMA_VERSION,
};
use proptest::prelude::*;

fn status() -> impl Strategy<Value = Status> {
    prop_oneof![Just(Status::Pass), Just(Status::Fail), Just(Status::Anomaly)]
}

fn check() -> impl Strategy<Value = Check> {
    (
        "[a-z:-]{1,12}",
        status(),
        prop::collection::btree_map("[a-z_]{1,8}", -1e6f64..1e6, 0..4),
        prop::option::of(prop::collection::vec(-10f64..10.0, 1..4)),
        prop::option::of("[ -~]{0,20}"),
    )
        .prop_map(|(name, st, metrics, witness, detail)| {
            let mut c = Check::new(name, claim(Command::Fiber), st).witness(witness);
            for (k, v) in metrics {
                c = c.metric(&k, v);
            }
            if let Some(d) = detail {
                c = c.detail(d);
            }
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(checks in prop::collection::vec(check(), 0..5), seed in any::<u64>(), rt in 0f64..100.0) {
        let mut r = SuiteReport::empty(seed);
        r.checks = checks;
        r.runtime_secs = rt;
        let back = parse_report(&emit_report(&r, Format::Json)).unwrap();
        prop_assert_eq!(back, r);
    }
}

#[test]
fn empty_suite_is_a_valid_document() {
    let r = SuiteReport::empty(0);
    let bytes = emit_report(&r, Format::Json);
    let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["schema"], SCHEMA_VERSION);
    assert_eq!(v["checks"], serde_json::json!([]));
    assert_eq!(parse_report(&bytes).unwrap(), r);
    assert!(r.passed());
    assert_eq!(emit_report(&r, Format::Csv), b"check,status,metric,value\n");
    assert!(String::from_utf8(emit_report(&r, Format::Text)).unwrap().contains("0 checks"));
}

#[test]
fn csv_quotes_structured_values() {
    let mut r = SuiteReport::empty(0);
    r.checks.push(Check::new("x", "claim", Status::Pass).metric("v", [1, 2]));
    let csv = String::from_utf8(emit_report(&r, Format::Csv)).unwrap();
    assert!(csv.ends_with("x,pass,v,\"[1,2]\"\n"));
}

#[test]
fn run_suite_is_deterministic_and_records_provenance() {
    let cfg = RunConfig {
        ty: Some("I2:5".into()),
        command: Some(Command::VerifyStatement),
        seed: 3,
        samples: 20,
        ..RunConfig::default()
    };
    let mut a = run_suite(&cfg).unwrap();
    let mut b = run_suite(&cfg).unwrap();
    a.runtime_secs = 0.0;
    b.runtime_secs = 0.0;
    assert_eq!(emit_report(&a, Format::Json), emit_report(&b, Format::Json));
    assert_eq!(a.provenance.ty.as_deref(), Some("I2:5"));
    assert_eq!(a.provenance.command.as_deref(), Some("verify-statement"));
    assert!(a.provenance.basis_sha256.is_some());
    assert!(a.passed());
}

#[test]
fn report_rejects_other_schemas() {
    let mut v = serde_json::to_value(SuiteReport::empty(1)).unwrap();
    v["schema"] = serde_json::json!(SCHEMA_VERSION + 1);
    assert!(parse_report(v.to_string().as_bytes()).is_err());
}

#[test]
fn config_requires_positive_tolerances() {
    for bad in [
        r#"{"type":"B2","command":"all","tol_zero":0}"#,
        r#"{"type":"B2","command":"all","eps_fiber":-1e-12}"#,
        r#"{"type":"B2","command":"morse","k":1,"m":[1,2]}"#,
        r#"{"command":"all"}"#,
    ] {
        assert!(RunConfig::from_json(bad).unwrap().validate().is_err(), "{bad}");
    }
    assert!(RunConfig::from_json(r#"{"type":"B2","command":"all"}"#).unwrap().validate().is_ok());
}

#[test]
fn error_classes_map_to_exit_codes() {
    use chevalley::Error;
    use chevalley_cli::exit_code;
    assert_eq!(exit_code(&Error::Verification(String::new())), 1);
    assert_eq!(exit_code(&Error::Usage(String::new())), 2);
    assert_eq!(exit_code(&Error::Capability(String::new())), 2);
    assert_eq!(exit_code(&Error::Integrity(String::new())), 3);
    assert_eq!(exit_code(&Error::Convergence(String::new())), 4);
}
