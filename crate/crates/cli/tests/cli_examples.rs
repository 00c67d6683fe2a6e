//! End-to-end exercises of the documented command-line surface: exit
//! codes, JSON shape, config-file merging and validation messages.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_lptk")
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(bin())
        .args(args)
        .env_remove("LPTK_CACHE_DIR")
        .output()
        .expect("command runs");
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    let stderr = String::from_utf8_lossy(&out.stderr).to_string();
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), json, stderr)
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lptk-cli-examples-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn check_kernel_poisson_passes() {
    let (code, json, _) = run(&["check-kernel", "poisson:beta=1", "--alpha", "0.5"]);
    assert_eq!(code, 0);
    assert_eq!(json["result"]["passed"], Value::Bool(true));
    assert_eq!(json["result"]["rapidly_decreasing"], Value::Bool(true));
    assert_eq!(json["format_version"], Value::from(1));
}

#[test]
fn check_kernel_gaussian_fails_cancellation_at_alpha_one() {
    let (code, json, _) = run(&["check-kernel", "gaussd:kappa=0", "--alpha", "1"]);
    assert_eq!(code, 1);
    assert_eq!(json["result"]["passed"], Value::Bool(false));
    assert_eq!(
        json["result"]["cancellation_exceeds_alpha"],
        Value::Bool(false)
    );
}

#[test]
fn check_kernel_zero_fails_tauberian() {
    let (code, json, _) = run(&["check-kernel", "zero"]);
    assert_eq!(code, 1);
    let conditions = json["result"]["conditions"].as_array().unwrap();
    let tauberian = conditions
        .iter()
        .find(|c| c["condition"] == "C2")
        .expect("tauberian report present");
    assert_eq!(tauberian["passed"], Value::Bool(false));
}

#[test]
fn unknown_kernel_is_usage_error() {
    let (code, _, stderr) = run(&["check-kernel", "wavelet:oops=1"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown kernel"));
}

#[test]
fn norm_zero_field_is_zero_exit_zero() {
    let dir = tempdir("zero-field");
    let field = dir.join("zero.csv");
    let mut text = String::from("lptk-field,v1,dim=1,extent=64,samples=1024,representation=spatial\n");
    for _ in 0..1024 {
        text.push_str("0,0\n");
    }
    std::fs::write(&field, text).unwrap();
    let (code, json, _) = run(&["norm", "--input", field.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(json["result"]["value"], Value::from(0.0));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn norm_q_infinity_is_max_of_scale_terms() {
    let (code, json, _) = run(&[
        "norm", "--engine", "besov", "--kernel", "lp", "--alpha", "0.3", "--q", "inf",
    ]);
    assert_eq!(code, 0);
    let value = json["result"]["value"].as_f64().unwrap();
    let max_term = json["result"]["scale_terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t[1].as_f64().unwrap())
        .fold(0.0f64, f64::max);
    assert!((value - max_term).abs() <= 1e-12 * value.max(1e-300));
}

#[test]
fn norm_besov_alpha0_p2_q2_matches_l2() {
    let dir = tempdir("l2");
    // store a corpus element, then feed it back through --input
    let (code, json, _) = run(&[
        "corpus",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let l2 = json["result"]["l2_norms"][0].as_f64().unwrap();
    let field = dir.join("field_000.csv");
    let (code, json, _) = run(&[
        "norm",
        "--input",
        field.to_str().unwrap(),
        "--alpha",
        "0",
        "--p",
        "2",
        "--q",
        "2",
    ]);
    assert_eq!(code, 0);
    let value = json["result"]["value"].as_f64().unwrap();
    assert!(
        (value - l2).abs() <= 1e-10 * l2,
        "besov(0,2,2) = {value} vs L2 = {l2}"
    );
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn equivalence_negative_control_fails_gate() {
    let dir = tempdir("negative");
    let config = dir.join("ladder.toml");
    std::fs::write(
        &config,
        r#"
[corpus]
family = "dilate_ladder"
k_lo = 0
k_hi = 7
base_center = 0.19634954084936207
base_halfwidth = 0.04
seed = 77

[norm]
alpha = 1.0
"#,
    )
    .unwrap();
    let (code, json, _) = run(&[
        "equivalence",
        "--a",
        "lp",
        "--b",
        "gaussd:kappa=0",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(code, 1, "negative control must fail the stability gate");
    assert_eq!(json["result"]["passed"], Value::Bool(false));
    let spread = json["result"]["spread"].as_f64().unwrap();
    assert!(spread > 100.0, "spread={spread}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn equivalence_positive_control_passes() {
    let (code, json, _) = run(&[
        "equivalence",
        "--a",
        "lp",
        "--b",
        "poisson:beta=2",
        "--alpha",
        "0.5",
        "--p",
        "2",
        "--q",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json["result"]["passed"], Value::Bool(true));
}

#[test]
fn calderon_gate_and_csv() {
    let dir = tempdir("calderon");
    let csv = dir.join("errors.csv");
    let (code, json, _) = run(&[
        "calderon",
        "--kernel",
        "poisson:beta=1",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(json["result"]["passed"], Value::Bool(true));
    let final_error = json["result"]["final_error"].as_f64().unwrap();
    assert!(final_error < 1e-6);
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("scale_top,relative_l2_error"));
    assert_eq!(csv_text.lines().count(), 1 + 10); // header + M from -3..=6
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_validation_names_offending_key() {
    let dir = tempdir("badcfg");
    let config = dir.join("bad.toml");
    std::fs::write(&config, "[grid]\nsamples = 1000\n").unwrap();
    let (code, _, stderr) = run(&["norm", "--config", config.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("grid"), "stderr: {stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn window_violation_is_config_error() {
    let (code, _, stderr) = run(&["norm", "--jmax", "12"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("Nyquist"), "stderr: {stderr}");
}

#[test]
fn flags_override_config_file() {
    let dir = tempdir("override");
    let config = dir.join("cfg.toml");
    std::fs::write(&config, "[norm]\nalpha = 0.25\n").unwrap();
    let (_, json, _) = run(&[
        "norm",
        "--config",
        config.to_str().unwrap(),
        "--alpha",
        "0.75",
    ]);
    assert_eq!(json["config"]["norm"]["alpha"].as_f64().unwrap(), 0.75);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn stromberg_reports_constant() {
    let (code, json, _) = run(&[
        "stromberg", "--kernel", "poisson:beta=1", "--j", "1", "--lambda", "2", "--beta", "1",
    ]);
    assert_eq!(code, 0);
    assert!(json["result"]["empirical_c"].as_f64().unwrap() > 0.0);
}

#[test]
fn dilation_envelope_passes_for_poisson() {
    let (code, json, _) = run(&[
        "dilation",
        "--eta",
        "lp",
        "--psi",
        "poisson:beta=1",
        "--m",
        "1",
        "--samples",
        "4096",
    ]);
    assert_eq!(code, 0);
    let slope = json["result"]["near"]["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() <= 0.25, "slope={slope}");
}
