//! Behavioral tests of the `floquet3` binary: exit codes, output shape,
//! and byte-level determinism of the CSV emitters.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_floquet3")
}

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env("FLOQUET3_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn h_reports_case_i_for_positive_h() {
    let out = run(&[
        "h",
        "--spec",
        spec("p_cos.toml").to_str().unwrap(),
        "--format",
        "text",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("case i"), "{text}");
    assert!(text.contains("4.221715985097e-03"), "{text}");
    assert!(text.contains("kappa = 6.366197723676e-01"), "{text}");
}

#[test]
fn h_reports_case_ii_for_negative_h() {
    let out = run(&[
        "h",
        "--spec",
        spec("q_cos.toml").to_str().unwrap(),
        "--format",
        "text",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("case ii"));
}

#[test]
fn malformed_spec_exits_with_usage_code() {
    let dir = std::env::temp_dir().join("floquet3-cli-test-bad");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    std::fs::write(&path, "p_modes = \"definitely not a table\"\n").unwrap();
    let out = run(&["h", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("parse"), "stderr: {err}");

    // Structurally valid TOML violating a coefficient invariant also maps
    // to the usage exit code, with the violation named.
    let path2 = dir.join("mean.toml");
    std::fs::write(&path2, "[[p_modes]]\nn = 0\nre = 1.0\n").unwrap();
    let out2 = run(&["h", "--spec", path2.to_str().unwrap()]);
    assert_eq!(out2.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out2.stderr).contains("mean-zero"));
}

#[test]
fn missing_subcommand_is_usage_error() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rho_scan_shape_and_determinism() {
    let spec_path = spec("p_cos.toml");
    let args = [
        "rho-scan",
        "--spec",
        spec_path.to_str().unwrap(),
        "--eps",
        "0.05",
        "--lambda-range",
        "-0.5:0.5",
        "--points",
        "41",
    ];
    let first = run(&args);
    assert!(first.status.success());
    let text = stdout(&first);
    let data_rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .collect();
    assert_eq!(data_rows[0], "lambda,rho,multiplicity");
    assert_eq!(data_rows.len(), 1 + 41);
    // Away from the microscopic band every point has multiplicity one.
    assert!(data_rows[1].ends_with(",1"), "{}", data_rows[1]);

    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "scan output must be byte-stable");
}

#[test]
fn rho_scan_rejects_reversed_range() {
    let out = run(&[
        "rho-scan",
        "--spec",
        spec("p_cos.toml").to_str().unwrap(),
        "--eps",
        "0.05",
        "--lambda-range",
        "1:-1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn band_locates_interval_for_positive_h() {
    let out = run(&[
        "band",
        "--spec",
        spec("p_cos.toml").to_str().unwrap(),
        "--eps",
        "0.1",
        "--format",
        "text",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("found = true"), "{text}");
    assert!(text.contains("width = 1.097213"), "{text}");
}

#[test]
fn band_works_on_piecewise_profiles() {
    let spec_path = spec("square_p.toml");
    let out = run(&[
        "band",
        "--spec",
        spec_path.to_str().unwrap(),
        "--eps",
        "0.1",
        "--format",
        "text",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("found = true"), "{text}");
    // width ≈ 4 (1/144)^{3/2} ε³ = 2.31e-6 at ε = 0.1.
    assert!(text.contains("width = 2.31"), "{text}");
}

#[test]
fn band_reports_absence_for_negative_h() {
    let out = run(&[
        "band",
        "--spec",
        spec("q_cos.toml").to_str().unwrap(),
        "--eps",
        "0.1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().last().unwrap();
    assert!(row.ends_with(",false"), "{row}");
}

#[test]
fn sweep_emits_fit_and_rows() {
    let out = run(&[
        "sweep",
        "--spec",
        spec("p_cos.toml").to_str().unwrap(),
        "--eps-list",
        "0.16,0.08,0.04",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# fit_exponent = 2.9999"), "{text}");
    assert!(text.contains("epsilon,r_minus,r_plus,width,width_over_eps3,found"));
    let rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && l.contains(",true"))
        .count();
    assert_eq!(rows, 3);
}

#[test]
fn rho_scan_resolves_the_band_as_a_multiplicity_block() {
    // At ε = 0.1 the band spans ±5.486e-7; a scan across it must show a
    // contiguous multiplicity-3 block flanked by 1s.
    let spec_path = spec("p_cos.toml");
    let out = run(&[
        "rho-scan",
        "--spec",
        spec_path.to_str().unwrap(),
        "--eps",
        "0.1",
        "--lambda-range",
        "-2e-6:2e-6",
        "--points",
        "81",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mults: Vec<char> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("lambda"))
        .map(|l| l.chars().last().unwrap())
        .collect();
    assert_eq!(mults.len(), 81);
    let threes = mults.iter().filter(|&&m| m == '3').count();
    assert!(threes >= 15, "only {threes} interior points: {mults:?}");
    assert_eq!(mults[0], '1');
    assert_eq!(mults[80], '1');
    // Contiguity: exactly one block of 3s.
    let blocks = mults
        .windows(2)
        .filter(|w| w[0] != '3' && w[1] == '3')
        .count();
    assert_eq!(blocks, 1, "{mults:?}");
}

#[test]
fn unreachable_tolerance_is_a_numerical_failure() {
    let spec_path = spec("p_cos.toml");
    let out = run(&[
        "rho-scan",
        "--spec",
        spec_path.to_str().unwrap(),
        "--eps",
        "0.1",
        "--points",
        "3",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("numerical failure"), "stderr: {err}");
    assert!(err.contains("lambda ="), "stderr names the failing point: {err}");
}

#[test]
fn verify_passes_on_all_shipped_specs() {
    for name in ["p_cos.toml", "q_cos.toml", "mixed.toml", "square_p.toml"] {
        let out = run(&["verify", "--spec", spec(name).to_str().unwrap()]);
        assert!(
            out.status.success(),
            "verify failed on {name}:\n{}",
            stdout(&out)
        );
        assert!(stdout(&out).contains("10/10 checks passed"), "{name}");
    }
}
