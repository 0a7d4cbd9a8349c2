use std::process::{Command, Output};

use hyperorbit_cli::{CommandResult, Genus0Payload, SCHEMA_VERSION};
use hyperorbit_core::search::{SurveyAggregate, SurveyRecord};
use hyperorbit_core::{BinaryForm, DensityReport, OrbitStats, SymmetricPair};
use serde_json::Value;

fn hyperorbit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperorbit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn envelope(o: &Output) -> CommandResult<Value> {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(stdout(o).trim_end()).unwrap()
}

#[test]
fn orbit_example() {
    let o = hyperorbit(&["orbit", "--n", "4", "--form", "1,0,0,0,1", "--point", "0,1,1", "--via-ideal"]);
    let r = envelope(&o);
    assert_eq!(r.schema_version, SCHEMA_VERSION);
    assert_eq!(r.command, "orbit");
    assert_eq!(r.payload["determinant_identity"], Value::Bool(true));
    let pair = SymmetricPair::from_json(&r.payload["pair"]).unwrap();
    assert_eq!(pair.invariant_form().unwrap(), BinaryForm::from_i64(&[1, 0, 0, 0, 1]).unwrap());
    assert_eq!(r.payload["ideal"]["class_agreement"], "Equal");
}

#[test]
fn genus_one_archimedean_sum_is_one() {
    let o = hyperorbit(&["densities", "--genus", "1", "--samples", "0", "--primes", "50"]);
    let r = envelope(&o);
    let reports: Vec<DensityReport> = serde_json::from_value(r.payload).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].archimedean_sum, 1.0);
    assert_eq!(reports[0].samples, 0);
}

#[test]
fn binary_quadratic_count_over_f3() {
    let o = hyperorbit(&["count-fp", "--n", "2", "--p", "3", "--form", "1,0,2"]);
    let stats: OrbitStats = serde_json::from_value(envelope(&o).payload).unwrap();
    assert_eq!(stats.total_elements, 24);
}

#[test]
fn densities_are_reproducible() {
    let args = ["--seed", "9", "densities", "--genus", "2,3", "--samples", "20000", "--primes", "30"];
    let a = hyperorbit(&args);
    let b = hyperorbit(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut one_thread = vec!["--jobs", "1"];
    one_thread.extend_from_slice(&args);
    assert_eq!(hyperorbit(&one_thread).stdout, a.stdout);
    let other = hyperorbit(&["--seed", "10", "densities", "--genus", "2,3", "--samples", "20000", "--primes", "30"]);
    assert_ne!(other.stdout, a.stdout);
}

#[test]
fn timing_is_opt_in() {
    let plain = envelope(&hyperorbit(&["genus0", "--primes", "50"]));
    assert!(plain.timing_ms.is_none());
    let timed = envelope(&hyperorbit(&["--timing", "genus0", "--primes", "50"]));
    assert!(timed.timing_ms.is_some());
}

#[test]
fn genus0_exact_round_trip() {
    let r = envelope(&hyperorbit(&["genus0", "--primes", "30", "--exact"]));
    let g: Genus0Payload = serde_json::from_value(r.payload).unwrap();
    assert!(g.below_one_twentieth);
    let exact = g.exact.unwrap();
    let (num, den) = exact.split_once('/').unwrap();
    let q = num.parse::<f64>().unwrap() / den.parse::<f64>().unwrap();
    assert!((q.log10() - g.log10).abs() < 1e-9);
}

#[test]
fn survey_lines_round_trip() {
    let args = ["--seed", "4", "survey", "--n", "4", "--height", "40", "--point-bound", "8", "--count", "25"];
    let o = hyperorbit(&args);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 26);
    let records: Vec<SurveyRecord> = lines[..25].iter().map(|l| serde_json::from_str(l).unwrap()).collect();
    let agg: CommandResult<SurveyAggregate> = serde_json::from_str(lines[25]).unwrap();
    assert_eq!(agg.payload, SurveyAggregate::from_records(&records));
    assert_eq!(records.iter().map(|r| r.index).collect::<Vec<_>>(), (0..25).collect::<Vec<_>>());
    assert_eq!(hyperorbit(&args).stdout, o.stdout);
}

#[test]
fn verify_pair_from_file() {
    let r = envelope(&hyperorbit(&["orbit", "--n", "4", "--form", "2,1,0,3,9", "--point", "0,1,3"]));
    let path = std::env::temp_dir().join(format!("hyperorbit-pair-{}.json", std::process::id()));
    std::fs::write(&path, r.payload["pair"].to_string()).unwrap();
    let at = format!("@{}", path.display());
    let ok = hyperorbit(&["verify", "--form", "2,1,0,3,9", "--pair", &at]);
    assert!(ok.status.success());
    let bad = hyperorbit(&["verify", "--form", "2,1,0,3,8", "--pair", &at]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("verification failed"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn csv_outputs() {
    let o = hyperorbit(&["densities", "--genus", "1,2", "--samples", "1000", "--primes", "20", "--csv"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], DensityReport::CSV_HEADER);
    assert_eq!(lines.len(), 3);
    let cols = lines[0].split(',').count();
    assert!(lines[1..].iter().all(|l| l.split(',').count() == cols));
}

#[test]
fn exit_codes() {
    // Bad point, bad prime, degree mismatch, usage error.
    for args in [
        vec!["orbit", "--n", "4", "--form", "1,0,0,0,1", "--point", "0,1,2"],
        vec!["count-fp", "--n", "2", "--p", "4", "--form", "1,0,2"],
        vec!["count-fp", "--n", "4", "--p", "3", "--form", "1,0,2"],
        vec!["densities"],
        vec!["frobnicate"],
    ] {
        let o = hyperorbit(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(hyperorbit(&["--help"]).status.code(), Some(0));
}

#[test]
fn run_in_process() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = hyperorbit_cli::run(
        ["hyperorbit", "count-fp", "--n", "2", "--p", "5", "--form", "1,0,2"],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    assert!(err.is_empty());
    let r: CommandResult<OrbitStats> = serde_json::from_slice(&out).unwrap();
    assert_eq!(r.payload.p, 5);
}
