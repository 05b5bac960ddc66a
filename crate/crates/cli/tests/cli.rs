use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use integrable_cli::*;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn parse_text(text: &str) -> Result<Scenario, CliError> {
    Scenario::from_json(text, Path::new("inline.json"))
}

#[test]
fn minimal_trs_scenario() {
    let s = parse_text(r#"{"kind": "trs", "parameters": {"chi": [[2, 0], [1, 0]], "hbar": [3, 0], "p": [1, 1]}}"#)
        .unwrap();
    assert_eq!(s.kind, Kind::Trs);
    assert_eq!(s.seed, 0);
}

#[test]
fn unknown_keys_rejected() {
    let top = parse_text(r#"{"kind": "trs", "parameters": {}, "colour": 1}"#).unwrap_err();
    assert!(matches!(top, CliError::Parse { .. }), "{top}");
    let param = parse_text(r#"{"kind": "dwork", "parameters": {"series": "central_binomial", "primes": [3], "levels": [1], "colour": 1}}"#)
        .unwrap_err();
    assert!(matches!(param, CliError::Validation(_)), "{param}");
}

#[test]
fn missing_parameters_listed_together() {
    match parse_text(r#"{"kind": "adhm", "parameters": {"k": 1}}"#) {
        Err(CliError::Validation(problems)) => {
            for name in ["a_params", "q", "coupling"] {
                assert!(problems.iter().any(|p| p.contains(name)), "{problems:?}");
            }
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn parse_errors_carry_position() {
    match parse_text("{\n  \"kind\": \"trs\",\n  \"parameters\": [\n}") {
        Err(CliError::Parse { line, .. }) => assert!(line >= 3),
        other => panic!("{other:?}"),
    }
    assert!(parse_text(r#"{"kind": "tachyon", "parameters": {}}"#).is_err());
}

#[test]
fn file_reference_resolved_against_scenario() {
    let s = parse_scenario(&scenarios().join("dwork_file.json")).unwrap();
    let file = s.parameters["series"]["file"].as_str().unwrap();
    assert!(Path::new(file).is_file(), "{file}");
    let report = run_scenario(&s);
    assert!(report.passed);
}

#[test]
fn coincident_chi_is_a_failed_record_not_an_abort() {
    let s = parse_scenario(&scenarios().join("trs_coincident.json")).unwrap();
    let report = run_scenario(&s);
    assert!(!report.passed);
    assert!(report.checks.len() > 1);
    assert!(report.checks.iter().all(|c| c.error.as_deref().is_some_and(|e| e.contains("singularity"))));
}

#[test]
fn duality_reports_residual_and_spectrum() {
    let report = run_scenario(&parse_scenario(&scenarios().join("duality.json")).unwrap());
    for name in ["ring_residual", "spectrum_match"] {
        let c = report.checks.iter().find(|c| c.name == name).unwrap();
        assert!(c.passed && c.residual.is_some(), "{c:?}");
    }
}

#[test]
fn dwork_central_binomial_passes() {
    let report = run_scenario(&parse_scenario(&scenarios().join("dwork.json")).unwrap());
    assert!(report.passed);
    assert!(report.checks.iter().any(|c| c.name == "congruence[p=3,s=2]"));
}

#[test]
fn failing_check_does_not_suppress_siblings() {
    // A file reference that does not exist fails the series checks only.
    let text = r#"{"kind": "dwork", "parameters": {"series": {"file": "absent.txt"}, "primes": [3], "levels": [1, 2]}}"#;
    let report = run_scenario(&parse_text(text).unwrap());
    assert_eq!(report.checks.len(), 3);
    assert!(report.checks.iter().all(|c| !c.passed && c.error.is_some()));
}

#[test]
fn report_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let s = parse_scenario(&scenarios().join("qq.json")).unwrap();
    let first = run_scenario(&s);
    let path = dir.path().join("report.json");
    emit_report(&first, &path).unwrap();
    assert_eq!(read_report(&path).unwrap(), first);
    assert_eq!(run_scenario(&s).to_json().unwrap(), first.to_json().unwrap());

    let mut reseeded = s.clone();
    reseeded.seed += 1;
    assert_ne!(run_scenario(&reseeded).checks[0].values, first.checks[0].values);
}

#[test]
fn unwritable_destination_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("not-a-directory");
    std::fs::write(&blocker, "").unwrap();
    let report = run_scenario(&parse_scenario(&scenarios().join("dwork.json")).unwrap());
    let err = emit_report(&report, &blocker.join("report.json")).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_integrable");
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        Command::new(bin)
            .arg("run")
            .arg(scenarios().join(name))
            .arg("--report")
            .arg(dir.path().join("out.json"))
            .args(extra)
            .stderr(Stdio::null())
            .status()
            .unwrap()
    };
    assert_eq!(run("dwork.json", &[]).code(), Some(0));
    assert_eq!(run("trs_coincident.json", &[]).code(), Some(1));
    assert_eq!(run("dwork.json", &["--tolerance=-1"]).code(), Some(2));

    let validate = Command::new(bin).arg("validate").arg(scenarios().join("spinchain.json")).status().unwrap();
    assert_eq!(validate.code(), Some(0));
}

#[test]
fn timing_is_opt_in() {
    let bin = env!("CARGO_BIN_EXE_integrable");
    let out = Command::new(bin).arg("run").arg(scenarios().join("dwork.json")).output().unwrap();
    assert!(!String::from_utf8_lossy(&out.stdout).contains("duration_ms"));
    let out = Command::new(bin).arg("run").arg(scenarios().join("dwork.json")).arg("--timing").output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("duration_ms"));
}
