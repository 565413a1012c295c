use std::process::{Command, Output};

use lattice_lab::theta::ThetaSeries;
use lattice_lab::Complex64;
use lattice_lab_cli::config::{Method, Model, OutputFormat, RunConfig, Suite, VerifyConfig};
use lattice_lab_cli::run::run;
use lattice_lab_cli::verify::verify;
use proptest::prelude::*;
use serde_json::Value;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lattice-lab")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn sixvertex_all_methods_agree() {
    let out = cli(&["run", "--model", "sixvertex", "--n", "2", "--seed", "7", "--methods", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["values"].as_array().unwrap().len(), 4);
    let tol = r["config"]["tol"].as_f64().unwrap();
    for row in r["residual_matrix"]["matrix"].as_array().unwrap() {
        for x in row.as_array().unwrap() {
            assert!(x.as_f64().unwrap() <= tol);
        }
    }
}

#[test]
fn sos_single_site_is_one_vertex_weight() {
    let cfg = RunConfig {
        model: Model::Sos,
        n: 1,
        u: Some(vec![c(0.3, 0.0)]),
        v: Some(vec![c(0.1, 0.0)]),
        lambda: c(0.27, 0.0),
        hbar: c(0.31, 0.0),
        methods: Some(vec![Method::Formula]),
        ..RunConfig::default()
    };
    let r = run(&cfg).unwrap();
    let ts = ThetaSeries::new(c(0.0, 1.0)).unwrap();
    let expected = ts.theta(c(0.2 - 0.27, 0.0)).unwrap() * ts.theta(c(0.31, 0.0)).unwrap() / ts.theta(c(-0.27, 0.0)).unwrap();
    let got = r.values[0].value.unwrap();
    assert!((c(got.re, got.im) - expected).norm() <= 1e-14 * expected.norm());
    assert!(r.pass);
}

#[test]
fn enumeration_cap_is_a_usage_error() {
    let out = cli(&["run", "--methods", "enum", "--n", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let cfg = RunConfig { n: 5, methods: Some(vec![Method::Enum]), ..RunConfig::default() };
    assert!(run(&cfg).is_err());
}

#[test]
fn invalid_configs_exit_with_two() {
    for args in [
        &["run", "--model", "sos", "--methods", "izergin"][..],
        &["run", "--methods", "bogus"],
        &["run", "--n", "2", "--u", "0.1,0.2"],
        &["verify", "--suite", "nope"],
        &["verify", "--suite", "fay", "--count", "0"],
        &["run", "--tau-im", "-1"],
    ] {
        assert_eq!(cli(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn all_drops_methods_over_their_cap() {
    let cfg = RunConfig { n: 6, ..RunConfig::default() };
    assert_eq!(cfg.resolved_methods().unwrap(), vec![Method::Transfer, Method::Izergin, Method::Projection]);
    let cfg = RunConfig { model: Model::Sos, n: 5, ..RunConfig::default() };
    assert_eq!(cfg.resolved_methods().unwrap(), vec![Method::Transfer, Method::Formula]);
}

#[test]
fn verify_dybe_and_fay_pass() {
    let out = cli(&["verify", "--suite", "dybe", "--count", "50", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["checks"].as_array().unwrap().len(), 50);
    let cfg = VerifyConfig { suite: Suite::Fay, count: 100, tol: 1e-9, ..VerifyConfig::default() };
    assert!(verify(&cfg).unwrap().pass);
}

#[test]
fn averaging_outside_strip_reports_each_case() {
    let out = cli(&["verify", "--suite", "averaging", "--count", "4", "--lambda-re", "0.3", "--lambda-im", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for ch in checks {
        assert!(ch["residual"].is_null());
        assert!(ch["error"].as_str().unwrap().contains("strip"));
    }
}

#[test]
fn residual_over_tolerance_exits_with_one() {
    // Degeneration (a) converges algebraically, far above 1e-30.
    let out = cli(&["verify", "--suite", "degeneration", "--count", "2", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn every_suite_passes_at_default_tolerance() {
    for suite in Suite::ALL {
        let cfg = VerifyConfig { suite, count: 12, ..VerifyConfig::default() };
        let r = verify(&cfg).unwrap();
        assert!(r.pass, "{}: {:?}", suite.name(), r.checks.iter().find(|c| !c.pass));
    }
}

#[test]
fn csv_has_value_residual_and_check_blocks() {
    let out = cli(&["run", "--n", "2", "--output", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let blocks: Vec<&str> = text.split("\n\n").collect();
    assert_eq!(blocks.len(), 3);
    assert!(blocks[0].starts_with("method,value_re,value_im"));
    assert_eq!(blocks[0].lines().count(), 5);
    assert!(blocks[1].starts_with("residual,enum,transfer,izergin,projection"));
    assert!(blocks[2].starts_with("check,residual,tol,pass"));
}

#[test]
fn out_file_receives_the_report() {
    let path = std::env::temp_dir().join(format!("lattice-lab-{}.json", std::process::id()));
    let out = cli(&["run", "--n", "2", "--out-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(r["command"], "run");
}

#[test]
fn explicit_parameters_override_sampling() {
    let out = cli(&["run", "--n", "2", "--u", "0.5,0.1", "--u", "-0.25,0.05", "--v", "0.1,0", "--v", "0.9,0.2"]);
    let r = json(&out);
    assert_eq!(r["config"]["u"][1]["re"].as_f64(), Some(-0.25));
    assert_eq!(r["config"]["v"][1]["im"].as_f64(), Some(0.2));
}

#[test]
fn complex_numbers_serialize_as_re_im() {
    let r = json(&cli(&["run", "--model", "sos", "--n", "1"]));
    let v = &r["values"][0]["value"];
    assert!(v["re"].is_f64() && v["im"].is_f64());
    assert!(r["timing"].is_object());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reports_are_deterministic(seed in any::<u64>(), n in 1usize..4, sos in any::<bool>()) {
        let cfg = RunConfig { seed, n, model: if sos { Model::Sos } else { Model::Sixvertex }, output: OutputFormat::Json, ..RunConfig::default() };
        let strip = |mut r: lattice_lab_cli::EvalReport| { r.timing.clear(); r.to_json() };
        prop_assert_eq!(strip(run(&cfg).unwrap()), strip(run(&cfg).unwrap()));
    }

    #[test]
    fn sampled_instances_stay_in_the_box(seed in any::<u64>(), n in 1usize..5) {
        let r = run(&RunConfig { seed, n, ..RunConfig::default() }).unwrap();
        let lattice_lab_cli::report::ConfigEcho::Run(echo) = r.config else { unreachable!() };
        for z in echo.u.iter().chain(&echo.v) {
            prop_assert!((0.0..1.0).contains(&z.re) && (0.0..0.3).contains(&z.im));
        }
    }
}
