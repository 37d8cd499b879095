use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use recoil_sim::commands::{evolve_grids, factor_table, EmissionChoice};
use recoil_sim::output::read_csv;
use recoil_sim::config::ModesSpec;
use recoil_sim::RunConfig;

fn sim(args: &[&str], envs: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recoil-sim"))
        .args(args)
        .envs(envs.iter().copied())
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn single_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/single.json")
}

#[test]
fn help_succeeds_and_usage_errors_exit_one() {
    assert_eq!(code(&sim(&["--help"], &[])), 0);
    assert_eq!(code(&sim(&["frobnicate"], &[])), 1);
    assert_eq!(code(&sim(&["oracle", "--which", "everything"], &[])), 1);
}

#[test]
fn factor_table_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["decoherence-factor", "--out", path(dir.path())], &[]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&dir.path().join("decoherence_factor.csv")).unwrap();
    assert_eq!(header, ["dx_over_lambda", "F"]);
    let want = factor_table(&RunConfig::default()).unwrap();
    assert_eq!(rows.len(), 600);
    for (got, want) in rows.iter().zip(&want) {
        assert_eq!(got[0].to_bits(), want[0].to_bits());
        assert_eq!(got[1].to_bits(), want[1].to_bits());
    }
}

#[test]
fn density_files_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["evolve", "--times", "5", "--emission", "on", "--out", path(dir.path())], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.path().join("rho_gt5_emission.csv")).unwrap();
    assert_eq!(header, ["x", "x_prime", "re_rho", "im_rho", "abs_rho"]);
    let cfg = RunConfig {
        times: vec![5.0],
        ..RunConfig::default()
    };
    let dg = &evolve_grids(&cfg, EmissionChoice::On).unwrap()[0];
    let n = dg.len();
    assert_eq!(rows.len(), n * n);
    for (k, row) in rows.iter().enumerate() {
        let (i, j) = (k / n, k % n);
        assert_eq!(row[0].to_bits(), dg.x()[i].to_bits());
        assert_eq!(row[1].to_bits(), dg.x()[j].to_bits());
        assert_eq!(row[2].to_bits(), dg.at(i, j).re.to_bits());
        assert_eq!(row[3].to_bits(), dg.at(i, j).im.to_bits());
    }
}

#[test]
fn summary_lists_every_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["--config", path(&single_config()), "evolve", "--out", path(dir.path())], &[]);
    assert_eq!(code(&o), 0);
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    let runs = summary["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 6);
    for run in runs {
        assert!(dir.path().join(run["file"].as_str().unwrap()).exists());
        assert!((run["trace"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!(run["diagonal_width"].as_f64().unwrap() > 0.0);
    }
    assert_eq!(runs[0]["validity"], "marginal");
    assert_eq!(runs[4]["validity"], "valid");
    assert!(summary["generated"]["unix_time"].is_u64());
}

#[test]
fn empty_time_list_writes_an_empty_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["evolve", "--times", "", "--out", path(dir.path())], &[]);
    assert_eq!(code(&o), 0);
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, ["summary.json"]);
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["runs"], serde_json::json!([]));
}

#[test]
fn validity_gate_exits_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = sim(&["evolve", "--times", "0.5", "--emission", "on", "--out", path(&out)], &[]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
    // the gate only concerns the emission-on matrix
    let o = sim(&["evolve", "--times", "0.5", "--emission", "off", "--out", path(&out)], &[]);
    assert_eq!(code(&o), 0);
}

#[test]
fn config_and_environment_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    assert_eq!(code(&sim(&["--config", "/nonexistent.json", "evolve", "--out", out], &[])), 1);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&sim(&["--config", path(&bad), "evolve", "--out", out], &[])), 1);
    assert_eq!(code(&sim(&["evolve", "--times", "2,x", "--out", out], &[])), 1);
    assert_eq!(code(&sim(&["decoherence-factor", "--out", out], &[("SIM_THREADS", "zero")])), 1);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&sim(&["evolve", "--out", path(&a)], &[("SIM_THREADS", "1")])), 0);
    assert_eq!(code(&sim(&["evolve", "--out", path(&b)], &[("SIM_THREADS", "3")])), 0);
    for name in ["rho_gt2_emission.csv", "rho_gt3_free.csv", "rho_gt5_emission.csv"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn rate_oracle_flags_a_narrow_band() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["oracle", "--which", "rate", "--out", path(dir.path())], &[]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&dir.path().join("oracle_rate.csv")).unwrap();
    assert_eq!(header[..3], ["half_width_gamma", "modes", "rate"]);
    assert_eq!(rows.len(), 1);

    let mut cfg = RunConfig::default();
    cfg.modes = ModesSpec {
        half_width_gamma: 4.0,
        ..cfg.modes
    };
    let narrow = dir.path().join("narrow.json");
    std::fs::write(&narrow, serde_json::to_string(&cfg).unwrap()).unwrap();
    let o = sim(&["--config", path(&narrow), "oracle", "--which", "rate", "--out", path(dir.path())], &[]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bandwidth_too_narrow"));
}

#[test]
fn quadrature_oracle_passes_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["oracle", "--which", "quadrature", "--out", path(dir.path())], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("zero_offset_max_relative_deviation"));
    let (_, rows) = read_csv(&dir.path().join("oracle_quadrature.csv")).unwrap();
    assert_eq!(rows.len(), 256);
}
