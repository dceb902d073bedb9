//! End-to-end tests of the corrdyn binary: content of the structured
//! outputs, reproducibility from sidecars, and the exit-code contract.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corrdyn"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("corrdyn-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn sturmian_two_fifths_report() {
    let out = run(bin().args(["sturmian", "--pq", "2/5"]));
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["word"], "00101");
    assert_eq!(report["min_word"], "00101");
    assert_eq!(report["max_word"], "10100");
    let symmetry: Vec<String> = report["symmetry"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert!(symmetry.contains(&"between-0s".to_string()));
    assert!(symmetry.contains(&"at-0".to_string()));
    assert_eq!(report["arc_structure"]["concentric"], 2);
    assert_eq!(report["arc_structure"]["spike"], 1);
    // the pairing table round-trips the landing algorithm
    let pairing = report["pairing"].as_array().unwrap();
    assert_eq!(pairing.len(), 5);
    // a quotient pair list is present with exact fractions
    assert!(report["quotient_pairs"].as_array().unwrap().len() >= 3);
}

#[test]
fn sturmian_one_third_pairing_matches() {
    let out = run(bin().args(["sturmian", "--pq", "1/3"]));
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let pairs: Vec<(String, String)> = report["pairing"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| {
            (
                p["lambda_minus"].as_str().unwrap().to_string(),
                p["lambda_plus"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    for expect in [("010", "100"), ("100", "010"), ("001", "001")] {
        assert!(
            pairs
                .iter()
                .any(|(m, p)| m == expect.0 && p == expect.1),
            "missing pair {expect:?} in {pairs:?}"
        );
    }
}

#[test]
fn verify_suites_pass() {
    for suite in ["algebra", "sturmian", "kleinian-modular", "involution", "pinch"] {
        let out = run(bin().args(["verify", "--suite", suite, "--seed", "7"]));
        assert!(
            out.status.success(),
            "suite {suite} failed:\n{}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn verify_unknown_suite_is_config_error() {
    let out = run(bin().args(["verify", "--suite", "nonexistent"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn render_is_reproducible_from_seed_and_sidecar() {
    let dir = scratch("render");
    let prefix = dir.join("r").to_str().unwrap().to_string();
    let args = [
        "render",
        "--a",
        "5,0",
        "--k",
        "0.95,0",
        "--width",
        "48",
        "--height",
        "36",
        "--budget",
        "2000",
        "--seed",
        "5",
        "--out",
        &prefix,
    ];
    assert!(run(bin().args(args)).status.success());
    let png = std::fs::read(format!("{prefix}.png")).unwrap();
    let ppm = std::fs::read(format!("{prefix}.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n48 36\n255\n"));

    // same seed, fresh run: byte-identical
    assert!(run(bin().args(args)).status.success());
    assert_eq!(png, std::fs::read(format!("{prefix}.png")).unwrap());

    // replay from the sidecar alone: byte-identical
    let sidecar = format!("{prefix}.json");
    std::fs::remove_file(format!("{prefix}.png")).unwrap();
    let out = run(bin().args(["run", "--config", &sidecar]));
    assert!(out.status.success());
    assert_eq!(png, std::fs::read(format!("{prefix}.png")).unwrap());
}

#[test]
fn swapped_viewport_is_config_error() {
    let dir = scratch("swapped");
    let prefix = dir.join("x").to_str().unwrap().to_string();
    let out = run(bin().args([
        "render",
        "--a",
        "5,0",
        "--viewport",
        "1.0,-0.9,-1.0,0.9",
        "--out",
        &prefix,
    ]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_parameter_is_config_error() {
    let dir = scratch("degenerate");
    let prefix = dir.join("x").to_str().unwrap().to_string();
    let out = run(bin().args(["render", "--a", "1,0", "--out", &prefix]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = scratch("unknown-field");
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "config_version": 1,
            "subcommand": "sturmian",
            "pq": "1/2",
            "depth": 1,
            "out": null,
            "mystery": true,
        })
        .to_string(),
    )
    .unwrap();
    let out = run(bin().args(["run", "--config", path.to_str().unwrap()]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mystery"));
}

#[test]
fn kleinian_modular_cloud_is_real() {
    let dir = scratch("kleinian");
    let path = dir.join("mod.json").to_str().unwrap().to_string();
    let out = run(bin().args([
        "kleinian",
        "--modular",
        "--samples",
        "400",
        "--depth",
        "200",
        "--out",
        &path,
    ]));
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(report["kleinian"]["mode"], "modular");
    assert_eq!(report["kleinian"]["jorgensen_heuristic"]["passes"], true);
    for p in report["points"].as_array().unwrap() {
        let im = p[1].as_f64().unwrap();
        assert!(im.abs() < 1e-9, "modular limit point off the real line: {im}");
    }
}

#[test]
fn kleinian_pinch_half_converges() {
    let dir = scratch("pinch-half");
    let path = dir.join("half.json").to_str().unwrap().to_string();
    let out = run(bin().args([
        "kleinian",
        "--pinch",
        "1/2",
        "--initial",
        "-0.4,0.9",
        "--samples",
        "200",
        "--depth",
        "200",
        "--out",
        &path,
    ]));
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let residual = report["kleinian"]["trace_sq_residual"].as_f64().unwrap();
    assert!(residual < 1e-10);
    let param = report["kleinian"]["solved_param"].as_array().unwrap();
    let re = param[0].as_f64().unwrap();
    let im = param[1].as_f64().unwrap();
    assert!((re + 0.5).abs() < 1e-6 && (im.abs() - 0.75f64.sqrt()).abs() < 1e-6);
}

#[test]
fn pinch_demo_rejects_bad_tmax_and_emits_grid() {
    let dir = scratch("pinch-demo");
    let csv = dir.join("grid.csv").to_str().unwrap().to_string();
    let out = run(bin().args(["pinch-demo", "--tmax", "1.0", "--out", &csv]));
    assert_eq!(out.status.code(), Some(2));

    let out = run(bin().args(["pinch-demo", "--grid", "24", "--out", &csv]));
    assert!(out.status.success());
    let body = std::fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("t,y,beltrami_modulus"));
    assert_eq!(body.lines().count(), 24 * 24 + 1);
    for line in body.lines().skip(1) {
        let mu: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((0.0..1.0).contains(&mu));
    }
}

#[test]
fn output_is_independent_of_worker_count() {
    let dir = scratch("threads");
    let one = dir.join("one").to_str().unwrap().to_string();
    let four = dir.join("four").to_str().unwrap().to_string();
    let args = |out: &str| {
        vec![
            "render".to_string(),
            "--a".into(),
            "5,0".into(),
            "--k".into(),
            "0.95,0".into(),
            "--width".into(),
            "40".into(),
            "--height".into(),
            "30".into(),
            "--budget".into(),
            "1500".into(),
            "--out".into(),
            out.to_string(),
        ]
    };
    assert!(run(bin().args(args(&one)).env("CORRDYN_THREADS", "1"))
        .status
        .success());
    assert!(run(bin().args(args(&four)).env("CORRDYN_THREADS", "4"))
        .status
        .success());
    assert_eq!(
        std::fs::read(format!("{one}.png")).unwrap(),
        std::fs::read(format!("{four}.png")).unwrap(),
        "raster depends on the worker count"
    );
}

#[test]
fn scan_masks_degenerate_parameter_pixels() {
    let dir = scratch("scan");
    let prefix = dir.join("s").to_str().unwrap().to_string();
    // 3×3 grid whose center pixel is exactly a = 1
    let out = run(bin().args([
        "scan",
        "--region",
        "0.4,-0.6,1.6,0.6",
        "--width",
        "3",
        "--height",
        "3",
        "--scan-budget",
        "40",
        "--scan-cloud",
        "80",
        "--out",
        &prefix,
    ]));
    assert!(out.status.success());
    let sidecar: serde_json::Value =
        serde_json::from_slice(&std::fs::read(format!("{prefix}.json")).unwrap()).unwrap();
    assert_eq!(sidecar["report"]["masked_pixels"], 1);
}
