use std::process::Command;

use nearzero_cli::{run, EXIT_CAPS, EXIT_DATA, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn json(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["nearzero", "--format", "json"];
    argv.extend_from_slice(args);
    let r = run(argv);
    assert!(r.stderr.is_empty(), "{}", r.stderr);
    (r.code, serde_json::from_str(&r.stdout).expect("json report"))
}

#[test]
fn ip_certificate_exits_zero() {
    let (code, v) = json(&["analyze", "--set", "fs(1/4,1/16)", "--property", "ip", "--grid", "dyadic:64", "--depth", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["verdict"]["verdict"], "certificate");
    assert_eq!(v["verdict"]["detail"]["seed"]["xs"], serde_json::json!(["1/4", "1/16"]));
    assert_eq!(v["replay"], "ok");
}

#[test]
fn far_point_is_not_broken_ip() {
    let (code, v) = json(&["analyze", "--set", "explicit(1/1)", "--property", "broken-ip", "--grid", "dyadic:16", "--depth", "3"]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(v["verdict"]["verdict"], "refutation");
    assert_eq!(v["replay"], "ok");
}

#[test]
fn syntax_errors_are_usage_errors_with_offset() {
    let r = run(["nearzero", "analyze", "--set", "fs(1/4,", "--property", "ip"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("byte 7"), "{}", r.stderr);
}

#[test]
fn unknown_flags_and_caps_are_rejected() {
    assert_eq!(run(["nearzero", "analyze", "--set", "fs(1/4)", "--property", "ip", "--nope"]).code, EXIT_USAGE);
    let r = run(["nearzero", "analyze", "--set", "fs(1/4)", "--property", "syndetic", "--caps", "width=3"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert_eq!(run(["nearzero", "verify", "--suite", "T-none"]).code, EXIT_USAGE);
}

#[test]
fn off_grid_constants_are_data_errors() {
    let r = run(["nearzero", "analyze", "--set", "explicit(1/3)", "--property", "ip"]);
    assert_eq!(r.code, EXIT_DATA);
    assert!(r.stderr.contains("1/3"));
}

#[test]
fn help_and_version_succeed() {
    let r = run(["nearzero", "--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("analyze"));
    assert_eq!(run(["nearzero", "--version"]).code, EXIT_OK);
}

#[test]
fn every_property_runs() {
    for p in ["ip", "broken-ip", "syndetic", "pw-syndetic", "broken-syndetic"] {
        let (code, v) = json(&["analyze", "--set", "pattern(1,[0])", "--property", p, "--grid", "dyadic:32", "--depth", "2"]);
        assert_eq!(code, EXIT_OK, "{p}: {v}");
        assert_eq!(v["replay"], "ok", "{p}");
    }
    let (code, _) = json(&["analyze", "--set", "pattern(2,[1])", "--property", "syndetic", "--grid", "dyadic:16", "--ladder", "1/4:2", "--caps", "f_cap=2"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn dynamics_verbs() {
    let (code, v) = json(&["dynamics", "orbit", "--set", "pattern(2,[1])", "--grid", "dyadic:16"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["sinks"], serde_json::json!([[0, 1]]));
    // chi of the full set has bit 0 clear and every other bit set, so no
    // shift returns within 1/2.
    let (code, v) = json(&["dynamics", "recurrence", "--set", "pattern(1,[0])", "--depth", "4"]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(v["report"]["rungs"][1]["witness"], Value::Null);
    let (code, v) = json(&["dynamics", "recurrence", "--set", "pattern(2,[1])", "--grid", "dyadic:16", "--depth", "4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["report"]["rungs"][3]["witness"], "1/8");
    let (code, _) = json(&["dynamics", "uniform", "--set", "pattern(2,[1])", "--grid", "dyadic:16", "--depth", "4"]);
    assert_eq!(code, EXIT_OK);
    let (code, v) = json(&["dynamics", "force", "--set", "pattern(1,[0])", "--depth", "4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["report"]["found"]["config"], "111111");
    let (code, v) = json(&[
        "dynamics", "force-uniform", "--set", "explicit()", "--depth", "4", "--ladder", "1/4:4,1/8:4", "--caps", "f_cap=4",
    ]);
    assert_eq!(code, EXIT_FAIL, "{v}");
    assert_eq!(v["report"]["agreement"], "both-refute");
}

#[test]
fn far_point_cannot_force() {
    let r = run(["nearzero", "dynamics", "force", "--set", "explicit(1/1)", "--depth", "4"]);
    assert_eq!(r.code, EXIT_DATA);
}

#[test]
fn regress_partition_reports_pinned_values() {
    let (code, v) = json(&["regress", "partition", "--r", "2", "--m", "2", "--lmax", "4"]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(v["outcome"], serde_json::json!({ "kind": "not-found", "l_max": 4 }));
    let (code, v) = json(&["regress", "partition", "--lmax", "6"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["outcome"]["l_star"], 5);
    let (code, _) = json(&["regress", "partition", "--r", "3", "--m", "3", "--lmax", "6"]);
    assert_eq!(code, EXIT_CAPS);
    assert_eq!(run(["nearzero", "regress", "partition", "--m", "4"]).code, EXIT_DATA);
}

#[test]
fn verify_is_deterministic_and_honors_overrides() {
    let argv = ["nearzero", "--format", "json", "verify", "--suite", "T-char-recurrence", "--trials", "7", "--seed", "9"];
    let a = run(argv);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    assert_eq!(a.stdout, run(argv).stdout);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["config"]["trials"], 7);
    assert_eq!(v["config"]["rng_seed"], 9);
    assert!(v.get("wall_clock_ms").is_none());
    let (_, t) = json(&["verify", "--suite", "T-partition", "--trials", "2", "--timestamp"]);
    assert!(t["wall_clock_ms"].is_u64());
}

#[test]
fn config_files_and_output_paths() {
    let dir = std::env::temp_dir().join(format!("nearzero-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    let mut c = nearzero::harness::SuiteConfig::standard(nearzero::harness::SuiteTag::BrokenIpForces);
    c.trials = 2;
    std::fs::write(&cfg, serde_json::to_string(&c).unwrap()).unwrap();
    let out = dir.join("report.json");
    let r = run([
        "nearzero", "--format", "json", "--output", out.to_str().unwrap(), "verify", "--suite", "T-broken-ip-forces",
        "--config", cfg.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["summary"]["trials"], 2);
    let r = run(["nearzero", "verify", "--suite", "T-partition", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_USAGE);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_maps_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_nearzero");
    let ok = Command::new(bin)
        .args(["analyze", "--set", "fs(1/4,1/16)", "--property", "ip", "--grid", "dyadic:64", "--depth", "2"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("certificate"));
    let bad = Command::new(bin).args(["analyze", "--set", "fs(1/4,"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
}
