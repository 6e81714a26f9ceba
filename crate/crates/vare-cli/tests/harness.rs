//! Integration tests of the experiment harness: file layout, reproducibility
//! and the CLI surface.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use vare_cli::experiment::{compare, load_summary, run_experiment, sweep, SweepParameter};
use vare_cli::{ExperimentConfig, Variant, Verdict};

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vare-harness-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn small_config(name: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new("df1", temp_dir(name));
    cfg.environments = 3;
    cfg.runs = 2;
    cfg.pf_samples = 500;
    cfg.lattice_resolution = Some(19); // 20 directions, fast
    cfg
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn trace_has_one_row_per_run_and_environment() {
    let cfg = small_config("rows");
    run_experiment(&cfg).unwrap();
    let trace = read(&cfg.out_dir.join("trace.csv"));
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines[0], "run,environment,igd,hv");
    assert_eq!(lines.len(), 1 + 2 * 3, "header plus runs×environments rows");

    let timings = read(&cfg.out_dir.join("timings.csv"));
    assert_eq!(timings.lines().count(), 1 + 2 * 3);
}

#[test]
fn rerun_is_byte_identical() {
    let cfg = small_config("determinism");
    run_experiment(&cfg).unwrap();
    let first = read(&cfg.out_dir.join("trace.csv"));
    let first_config = read(&cfg.out_dir.join("config.json"));
    run_experiment(&cfg).unwrap();
    assert_eq!(first, read(&cfg.out_dir.join("trace.csv")));
    assert_eq!(first_config, read(&cfg.out_dir.join("config.json")));
}

#[test]
fn summary_matches_trace_recomputation() {
    let cfg = small_config("summary");
    let summary = run_experiment(&cfg).unwrap();

    let trace = read(&cfg.out_dir.join("trace.csv"));
    let mut per_run: Vec<Vec<(f64, f64)>> = vec![Vec::new(); cfg.runs];
    for line in trace.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let run: usize = fields[0].parse().unwrap();
        let igd: f64 = fields[2].parse().unwrap();
        let hv: f64 = fields[3].parse().unwrap();
        per_run[run].push((igd, hv));
    }
    for (r, rows) in per_run.iter().enumerate() {
        let migd = rows.iter().map(|(igd, _)| igd).sum::<f64>() / rows.len() as f64;
        let mhv = rows.iter().map(|(_, hv)| hv).sum::<f64>() / rows.len() as f64;
        assert!((migd - summary.per_run[r].migd).abs() < 1e-9);
        assert!((mhv - summary.per_run[r].mhv).abs() < 1e-9);
    }
    let migd_mean =
        summary.per_run.iter().map(|r| r.migd).sum::<f64>() / summary.per_run.len() as f64;
    assert!((migd_mean - summary.migd_mean).abs() < 1e-9);

    let loaded = load_summary(&cfg.out_dir).unwrap();
    assert_eq!(loaded, summary);
}

#[test]
fn hypermutation_only_is_worse_on_df4() {
    let mut vare_cfg = ExperimentConfig::new("df4", temp_dir("abl-vare"));
    vare_cfg.environments = 40;
    vare_cfg.runs = 3;
    vare_cfg.pf_samples = 2_000;
    let mut eah_cfg = vare_cfg.clone();
    eah_cfg.variant = Variant::EahOnly;
    eah_cfg.out_dir = temp_dir("abl-eah");

    let vare_summary = run_experiment(&vare_cfg).unwrap();
    let eah_summary = run_experiment(&eah_cfg).unwrap();
    assert!(
        vare_summary.migd_mean < eah_summary.migd_mean,
        "adaptive {} should beat hypermutation-only {}",
        vare_summary.migd_mean,
        eah_summary.migd_mean
    );
}

#[test]
fn comparison_verdicts() {
    let mut a = small_config("cmp-a");
    a.runs = 5; // the rank-sum test needs five samples per group
    let summary_a = run_experiment(&a).unwrap();
    let report = compare(&summary_a, &summary_a).unwrap();
    assert_eq!(report.verdict, Verdict::Equivalent);
    assert_eq!(report.migd_test.p_value, 1.0);
    assert_eq!(report.ranks, (1, 1));

    // strictly degrade B
    let mut summary_b = summary_a.clone();
    for r in summary_b.per_run.iter_mut() {
        r.migd += 10.0;
    }
    summary_b.migd_mean += 10.0;
    summary_b.mhv_mean -= 0.5;
    let report = compare(&summary_a, &summary_b).unwrap();
    assert_eq!(report.verdict, Verdict::ABetter);
    assert_eq!(report.ranks, (1, 2));
}

#[test]
fn single_value_sweep_equals_run_experiment() {
    let mut cfg = small_config("sweep");
    cfg.lag = 2;
    let rows = sweep(&cfg, SweepParameter::Lag, &[2]).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].value, 2);

    let mut direct = cfg.clone();
    direct.out_dir = temp_dir("sweep-direct");
    let summary = run_experiment(&direct).unwrap();
    assert!((rows[0].mhv_mean - summary.mhv_mean).abs() < 1e-12);

    let csv = read(&cfg.out_dir.join("sweep.csv"));
    assert_eq!(csv.lines().next().unwrap(), "value,mhv_mean,mhv_std");
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn gamma_has_little_impact_on_mhv() {
    let mut cfg = ExperimentConfig::new("df4", temp_dir("gamma-sweep"));
    cfg.environments = 40;
    cfg.runs = 3;
    cfg.pf_samples = 2_000;
    let rows = sweep(&cfg, SweepParameter::Gamma, &[1, 2, 3, 4, 5]).unwrap();
    let best = rows.iter().map(|r| r.mhv_mean).fold(f64::MIN, f64::max);
    let worst = rows.iter().map(|r| r.mhv_mean).fold(f64::MAX, f64::min);
    assert!(
        (best - worst) / best < 0.10,
        "MHV spread across gamma too large: {rows:?}"
    );
}

#[test]
fn export_pf_writes_reference_sets() {
    let mut cfg = small_config("pf-export");
    cfg.export_pf = true;
    cfg.pf_samples = 50;
    run_experiment(&cfg).unwrap();
    for env in 0..cfg.environments {
        let path = cfg.out_dir.join(format!("pf_env{env}.csv"));
        assert_eq!(read(&path).lines().count(), 50);
    }
}

fn vare_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vare"))
}

#[test]
fn cli_run_and_compare_round_trip() {
    let dir_a = temp_dir("cli-a");
    let dir_b = temp_dir("cli-b");
    for (dir, seed) in [(&dir_a, "1"), (&dir_b, "9")] {
        let status = vare_bin()
            .args([
                "run",
                "--problem",
                "df1",
                "--changes",
                "3",
                "--runs",
                "5",
                "--seed",
                seed,
                "--pf-samples",
                "300",
                "--out",
            ])
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success());
        assert!(dir.join("trace.csv").exists());
        assert!(dir.join("summary.json").exists());
    }

    let output = vare_bin()
        .args(["compare", "--a"])
        .arg(&dir_a)
        .arg("--b")
        .arg(&dir_b)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("verdict"), "report should be printed: {text}");
}

#[test]
fn cli_refdirs_prints_lattice() {
    let output = vare_bin()
        .args(["refdirs", "--objectives", "2", "--resolution", "4"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "0,1");
    assert_eq!(lines[4], "1,0");
}

#[test]
fn cli_rejects_unknown_problem_with_nonzero_exit() {
    let output = vare_bin()
        .args([
            "run",
            "--problem",
            "df99",
            "--out",
            "/tmp/vare-never-written",
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let err = String::from_utf8(output.stderr).unwrap();
    assert!(err.contains("df99"), "diagnostic should name the problem");
}
