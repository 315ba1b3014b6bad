mod common;

use common::{assert_valid, json, json_lines, run, run_ok};
use rotorwalk_cli::spec::RunSpec;
use rotorwalk_cli::{EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

#[test]
fn classify_rotation_example() {
    let out = json(&["classify", "--d", "2", "--model", "rotation", "--seq", "(010122)"]);
    assert_valid("report.schema.json", &out);
    let r = &out["result"];
    assert_eq!(r["verdict"], "Transient");
    let rho = &r["spectral"]["matrix"]["rho"];
    assert_valid("rho.schema.json", rho);
    let target = (2.0 + 3f64.sqrt()) / 3.0;
    assert!(rho["lo"].as_f64().unwrap() <= target && target <= rho["hi"].as_f64().unwrap());
}

#[test]
fn kstar_example() {
    let out = json(&["kstar", "--dist", "(-+)=1/2;(+-)=1/2"]);
    assert_valid("report.schema.json", &out);
    assert_eq!(out["result"]["k_star"], "INFINITY");
    assert_eq!(out["result"]["verdict"], "Recurrent");
}

#[test]
fn shift_sweep_example() {
    let lines = json_lines(&["sweep", "--d", "2", "--L", "6", "--model", "shift"]);
    for l in &lines {
        assert_valid("sweep-record.schema.json", l);
    }
    assert_eq!(lines[0]["kind"], "header");
    let summary = lines.last().unwrap();
    assert_eq!(summary["kind"], "summary");
    assert_eq!(summary["agreement"], summary["classes"]);
    assert_eq!(summary["agreement_percent"], 100.0);
    assert_eq!(lines.len() - 2, summary["classes"].as_u64().unwrap() as usize);
}

#[test]
fn moment_matrix_and_montecarlo_validate() {
    let out = json(&["moment-matrix", "--d", "2", "--model", "rotation", "--seq", "(010122)", "--types", "2"]);
    assert_valid("moment-matrix.schema.json", &out["result"]);
    let out = json(&["montecarlo", "--d", "2", "--model", "rotation", "--seq", "(010122)", "--trials", "8"]);
    assert_valid("montecarlo.schema.json", &out["result"]);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["classify", "--seq", "(+-)"]).code, EXIT_OK);
    assert_eq!(run(&["--help"]).code, EXIT_OK);
    assert!(run(&["--version"]).stdout.contains(rotorwalk_cli::VERSION));
    for bad in [
        vec!["frobnicate"],
        vec!["classify", "--seq", "(+-"],
        vec!["classify", "--d", "2", "--seq", "(+-)"],
        vec!["kstar", "--seq", "(+-)", "--dist", "(+-)=1/1"],
        vec!["classify", "--seq", "(+-)", "--format", "yaml"],
    ] {
        let out = run(&bad);
        assert_eq!(out.code, EXIT_USAGE, "{bad:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["moment-matrix", "--d", "2", "--seq", "(0012)"]);
    assert_eq!(out.code, EXIT_DOMAIN, "{}", out.stdout);
}

#[test]
fn every_format_starts_with_the_echo() {
    let base = ["kstar", "--seq", "(+--+)", "--side", "both"];
    for fmt in ["json", "csv", "text"] {
        let args: Vec<&str> = base.iter().copied().chain(["--format", fmt]).collect();
        let out = run_ok(&args);
        let first: Vec<&str> = out.lines().take(2).collect();
        match fmt {
            "json" => {
                let v: Value = serde_json::from_str(&out).unwrap();
                let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
                assert_eq!(keys, ["rotorwalk", "run", "result"]);
            }
            "csv" => {
                assert_eq!(first[0], format!("# rotorwalk {}", rotorwalk_cli::VERSION));
                assert!(first[1].starts_with("# run: rotorwalk kstar"));
            }
            _ => {
                assert_eq!(first[0], format!("rotorwalk {}", rotorwalk_cli::VERSION));
                assert!(first[1].starts_with("run: rotorwalk kstar"));
            }
        }
    }
}

#[test]
fn echoed_spec_reproduces_the_report() {
    let cases: &[&[&str]] = &[
        &["classify", "--d", "2", "--model", "rotation", "--seq", "(010122)"],
        &["classify", "--seq", "+(-+)"],
        &["kstar", "--seq", "(+--+)", "--side", "left"],
        &["moment-matrix", "--d", "2", "--dist", "(012)=1/2;(0012)=1/2", "--types", "3"],
        &["spectral-radius", "--matrix", "1/3,2/3;1/3,1"],
        &["decompose", "--d", "2", "--seq", "(210021012)"],
        &["sweep", "--L", "3", "--model", "rotation"],
        &["simulate", "--seq", "(++--)", "--k", "3"],
        &["excursions", "--seq", "(+-)", "--k", "5"],
        &["montecarlo", "--d", "2", "--model", "shift", "--seq", "(001122)", "--trials", "6", "--seed", "5"],
    ];
    for args in cases {
        let first = run_ok(args);
        let header: Value =
            serde_json::from_str(&first).or_else(|_| serde_json::from_str(first.lines().next().unwrap())).unwrap();
        let spec: RunSpec = serde_json::from_value(header["run"].clone()).unwrap();
        let again = rotorwalk_cli::dispatch(spec.to_argv());
        assert_eq!(again.code, EXIT_OK, "{args:?}: {}", again.stderr);
        assert_eq!(again.stdout, first, "{args:?}");
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let args = ["montecarlo", "--d", "2", "--model", "rotation", "--seq", "(010122)", "--trials", "24", "--seed", "17"];
    let with_jobs = |j: &str| run_ok(&args.iter().copied().chain(["--jobs", j]).collect::<Vec<_>>());
    let one = with_jobs("1");
    assert_eq!(one, with_jobs("4"));
    assert_eq!(one, run_ok(&args));
    let other = run_ok(&[
        "montecarlo",
        "--d",
        "2",
        "--model",
        "rotation",
        "--seq",
        "(010122)",
        "--trials",
        "24",
        "--seed",
        "18",
    ]);
    assert_ne!(one, other);
    let ex = ["excursions", "--model", "shift", "--seq", "(++-+--)", "--k", "4", "--seed", "9"];
    assert_eq!(run_ok(&ex), run_ok(&ex));
}

#[test]
fn csv_sweep_is_loss_free() {
    let lines = json_lines(&["sweep", "--L", "6"]);
    let csv_text = run_ok(&["sweep", "--L", "6", "--format", "csv"]);
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let classes: Vec<&Value> = lines.iter().filter(|l| l["kind"] == "class").map(|l| &l["class"]).collect();
    assert_eq!(rows.len(), classes.len());
    for (row, class) in rows.iter().zip(classes) {
        for (name, cell) in header.iter().zip(row.iter()) {
            match &class[name.as_str()] {
                Value::String(s) => assert_eq!(cell, s, "column {name}"),
                Value::Number(x) => assert_eq!(cell.parse::<f64>().ok(), x.as_f64(), "column {name}"),
                other => assert_eq!(cell, other.to_string(), "column {name}"),
            }
        }
    }
}

#[test]
fn montecarlo_escape_fraction_tracks_survival() {
    use rotorwalk::{tree, RotorSequence, SupportDistribution};
    let d = SupportDistribution::uniform_rotation(&RotorSequence::parse("(010122)", 2).unwrap()).unwrap();
    let q = tree::extinction_probabilities(&d, 2).unwrap();
    let survival = 1.0 - q[0];
    let trials = 400usize;
    let out = json(&[
        "montecarlo",
        "--d",
        "2",
        "--model",
        "rotation",
        "--seq",
        "(010122)",
        "--trials",
        "400",
        "--escape",
        "40",
        "--seed",
        "1",
    ]);
    let escaped = out["result"]["escaped"].as_u64().unwrap() as f64 / trials as f64;
    let sigma = (survival * (1.0 - survival) / trials as f64).sqrt();
    assert!((escaped - survival).abs() <= 4.0 * sigma + 0.02, "escaped {escaped}, survival {survival}");
}
