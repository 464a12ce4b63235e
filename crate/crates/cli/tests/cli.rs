use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ionospec_cli::export::read_csv;
use ionospec_cli::{parse_args, Format, Mode};
use ionospec_core::spectra::{spectrum_grid, PRESET_NAMES};
use ionospec_core::NormalizedParams;

fn ionospec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ionospec"))
        .args(args)
        .env_remove("IONOSPEC_THREADS")
        .output()
        .unwrap()
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn no_arguments_prints_usage() {
    let o = ionospec(&[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
    assert!(o.stdout.is_empty());
}

#[test]
fn spectrum_flags_parse_to_fig4_parameters() {
    let cfg = parse_args(["spectrum", "--qa", "1", "--gamma-a", "1", "--omega", "2", "--ea", "1", "--el", "0.8", "--out", "fig4.csv"])
        .unwrap();
    assert_eq!(cfg.mode, Mode::Spectrum);
    assert_eq!(cfg.params, NormalizedParams::neighbor(1.0, 1.0, 2.0, 1.0, 0.8));
    assert_eq!(cfg.format, Format::Csv);
    assert_eq!(cfg.out.as_deref(), Some(Path::new("fig4.csv")));
}

#[test]
fn preset_expands_and_takes_overrides() {
    let cfg = parse_args(["preset", "fig2b", "--omega", "4"]).unwrap();
    assert_eq!(cfg.params.q_a, 100.0);
    assert_eq!(cfg.params.gamma_a, 1.0);
    assert_eq!(cfg.params.omega, 4.0);
    assert!(cfg.omega_set);
}

#[test]
fn flags_override_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = path(&dir, "run.cfg");
    fs::write(&cfg_path, "# detuned setup\nmode = spectrum\nqa = 1\ngamma-a = 1\nomega = 2 # pump\nel = 0.8\n").unwrap();
    let cfg = parse_args(["spectrum", "--config", &cfg_path, "--omega", "3"]).unwrap();
    assert_eq!(cfg.params, NormalizedParams::neighbor(1.0, 1.0, 3.0, 1.0, 0.8));
}

#[test]
fn config_errors_point_at_their_source() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = path(&dir, "bad.cfg");

    fs::write(&cfg_path, "qa = 1\nfrequency = 2\n").unwrap();
    let e = parse_args(["spectrum", "--config", &cfg_path]).unwrap_err();
    assert!(e.0.contains("bad.cfg:2: unknown key `frequency`"), "{e}");

    fs::write(&cfg_path, "mode = sweep\n").unwrap();
    let e = parse_args(["spectrum", "--config", &cfg_path]).unwrap_err();
    assert!(e.0.contains("conflicting modes"), "{e}");

    fs::write(&cfg_path, "qa = 1\ngamma-a = inf\nomega = 1\n").unwrap();
    let e = parse_args(["spectrum", "--config", &cfg_path]).unwrap_err();
    assert!(e.0.contains("bad.cfg:2: `gamma-a` expects a finite number"), "{e}");

    let e = parse_args(["spectrum", "--qa", "1", "--gamma-a", "1", "--omega", "1", "--levels", "3"]).unwrap_err();
    assert!(e.0.contains("--levels is not used by spectrum mode"), "{e}");

    let o = ionospec(&["spectrum", "--qa", "1", "--gamma-a", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("needs `omega`"));
}

#[test]
fn model_errors_exit_with_their_name() {
    let o = ionospec(&["fano", "--qb", "1", "--gamma-b", "1", "--omega", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error: NoLongTimeLimit"), "{}", stderr(&o));
}

#[test]
fn bad_thread_cap_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_ionospec"))
        .args(["zeros", "--qa", "1", "--gamma-a", "1", "--omega", "1"])
        .env("IONOSPEC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectrum_csv_round_trips_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "fig4.csv");
    let args = [
        "spectrum", "--qa", "1", "--gamma-a", "1", "--omega", "2", "--ea", "1", "--el", "0.8", "--e-min", "-9", "--e-max", "11",
        "--points", "201", "--out", &out,
    ];
    let o = ionospec(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().next().unwrap().starts_with("# ionospec "));
    assert!(text.ends_with('\n'));
    let (header, rows) = read_csv(&text).unwrap();
    assert_eq!(header, ["E", "I_lt", "I_st0", "I_st1", "I_osc", "phi0", "phi1"]);

    let dec = spectrum_grid(&NormalizedParams::neighbor(1.0, 1.0, 2.0, 1.0, 0.8), -9.0, 11.0, 201).unwrap();
    assert_eq!(rows.len(), 201);
    for (i, row) in rows.iter().enumerate() {
        let expected = [dec.grid[i], dec.i_lt[i], dec.i_st0[i], dec.i_st1[i], dec.i_osc[i], dec.phi0[i], dec.phi1[i]];
        for (cell, v) in row.iter().zip(expected) {
            assert_eq!(cell.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    // Same configuration, same bytes.
    let again = path(&dir, "again.csv");
    let mut args2 = args.to_vec();
    *args2.last_mut().unwrap() = &again;
    assert!(ionospec(&args2).status.success());
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn json_output_is_one_object() {
    let o = ionospec(&["zeros", "--qa", "1", "--gamma-a", "1", "--omega", "0.001", "--j", "0", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["columns"], serde_json::json!(["spectrum_index", "E_D", "E_reduced"]));
    let reduced: Vec<f64> = v["rows"].as_array().unwrap().iter().map(|r| r[2].as_f64().unwrap()).collect();
    assert_eq!(reduced.len(), 2);
    assert!((reduced[0] + 1.0).abs() < 5e-3 && reduced[1].abs() < 5e-3, "{reduced:?}");
}

#[test]
fn sweep_writes_branches_and_events() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "sweep.csv");
    let o = ionospec(&["sweep", "--qa", "1", "--gamma-a", "1", "--omega-max", "1", "--omega-step", "0.05", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(header, ["omega", "branch_id", "E_D", "spectrum_index"]);
    assert!(!rows.is_empty());
    assert!(rows.iter().any(|r| r[3] == "1"));
    // Two zeros persist over the whole range for q_a = 1: no pair events.
    let events: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sweep.events.json")).unwrap()).unwrap();
    assert_eq!(events, serde_json::json!({ "events": [] }));

    let o = ionospec(&["sweep", "--qa", "1", "--gamma-a", "1", "--omega-max", "0.2"]);
    assert_eq!(o.status.code(), Some(2), "stdout sweep needs an events path");
}

#[test]
fn oracle_check_report_fields() {
    let o = ionospec(&[
        "oracle-check", "--qa", "1", "--gamma-a", "1", "--omega", "1", "--levels", "401", "--t-final", "1", "--samples", "4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["max_err_c", "rms_err_d", "rms_err_spectrum", "t_final", "n_levels"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["n_levels"], 401);
    assert!(v["max_err_c"].as_f64().unwrap() < 0.05);
}

#[test]
fn every_preset_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in PRESET_NAMES {
        let out = path(&dir, &format!("{name}.csv"));
        let mut args = vec!["preset", name, "--out", &out];
        if name.starts_with("fig6") || name.starts_with("fig7") {
            args.extend(["--omega-step", "0.2"]);
        } else {
            args.extend(["--points", "101"]);
        }
        let o = ionospec(&args);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let (_, rows) = read_csv(&fs::read_to_string(&out).unwrap()).unwrap();
        assert!(!rows.is_empty(), "{name}");
    }
}
