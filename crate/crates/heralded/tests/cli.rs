//! End-to-end checks of the `heralded` binary: subcommands, overrides,
//! exit codes, and byte-identical CSV output.

use std::path::PathBuf;
use std::process::{Command, Output};

fn heralded(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heralded"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(name);
    std::fs::write(&path, text).expect("temp config written");
    path
}

const MIXTURE_CONFIG: &str = r#"
scenario = "mixture"

[sweep]
parameter = "g"
start = 2.0
stop = 2.0
steps = 1

[params]
alpha = 1.0
beta = -0.9
p = 0.3333333333333333
"#;

#[test]
fn scan_emits_deterministic_csv_on_stdout() {
    let config = write_config("heralded_cli_mixture.toml", MIXTURE_CONFIG);
    let config = config.to_str().unwrap();
    let first = heralded(&["scan", "--config", config]);
    assert!(first.status.success(), "{:?}", first);
    let second = heralded(&["scan", "--config", config]);
    assert_eq!(first.stdout, second.stdout, "scan output must be reproducible");

    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("# scenario = mixture"));
    assert!(text.contains("# param beta = -9.00000000000e-1"));
    let data = text.lines().last().unwrap();
    let gain: f64 = data.split(',').nth(3).unwrap().parse().unwrap();
    assert!((gain - 0.0631582).abs() < 1e-6, "gain field = {gain}");
}

#[test]
fn set_overrides_reach_the_scan() {
    let config = write_config("heralded_cli_override.toml", MIXTURE_CONFIG);
    let out = heralded(&[
        "scan",
        "--config",
        config.to_str().unwrap(),
        "--set",
        "sweep.start=1.0",
        "--set",
        "sweep.stop=1.0",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let gain: f64 = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert!((gain - 1.0).abs() < 1e-12, "g = 1 must be the identity, got {gain}");
}

#[test]
fn output_flag_writes_the_file() {
    let config = write_config("heralded_cli_to_file.toml", MIXTURE_CONFIG);
    let target = std::env::temp_dir().join("heralded_cli_out.csv");
    let _ = std::fs::remove_file(&target);
    let out = heralded(&[
        "scan",
        "--config",
        config.to_str().unwrap(),
        "--output",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "CSV goes to the file, not stdout");
    let written = std::fs::read_to_string(&target).expect("file exists");
    assert!(written.starts_with("# heralded"));
    assert!(written.trim_end().lines().count() > 10);
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let incomplete = write_config(
        "heralded_cli_incomplete.toml",
        r#"
scenario = "mixture"

[sweep]
parameter = "g"
start = 2.0
stop = 2.0
steps = 1

[params]
alpha = 1.0
p = 0.5
"#,
    );
    let out = heralded(&["scan", "--config", incomplete.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta"));

    let out = heralded(&["verify", "bogus"]);
    assert_eq!(out.status.code(), Some(2));

    let out = heralded(&["scan", "--config", "/definitely/not/a/file.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_a_passing_suite() {
    let out = heralded(&["verify", "gaussian-bounds", "--seed", "3"]);
    assert!(out.status.success(), "{:?}", out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite=gaussian-bounds seed=3 trials=1000 failures=0"));
    assert!(text.trim_end().ends_with("result=pass"));
}
