use std::path::Path;
use std::process::{Command, Output};

use twinbeam::experiment::*;
use twinbeam::output::Table;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twinbeam")).args(args).env("RUST_LOG", "error").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn table(path: &Path) -> Table {
    Table::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn every_preset_round_trips_through_toml() {
    for p in experiment_preset_names() {
        let cfg = experiment_preset(p.name).unwrap();
        let text = cfg.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(back, cfg, "{}", p.name);
        assert_eq!(back.hash(), cfg.hash());
        assert!(validate(&cfg).is_ok(), "{}: {:?}", p.name, validate(&cfg).err());
    }
    assert!(experiment_preset("nope").unwrap_err().is_config());
}

#[test]
fn hash_tracks_content() {
    let a = experiment_preset("lbo-far-field").unwrap();
    let mut b = a.clone();
    b.run.master_seed += 1;
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn missing_fields_are_listed_together() {
    let err = ExperimentConfig::from_toml("schema_version = 1\ncrystal = \"bbo\"\n[pump]\nprofile = \"gaussian\"\n[grid]\nn_x = 64\n")
        .unwrap_err()
        .to_string();
    for f in ["detector", "optics", "run", "pump.sigma_p_lc", "pump.w0", "pump.tau0", "grid.dims", "grid.l_x", "grid.n_z"] {
        assert!(err.contains(f), "'{f}' not reported in: {err}");
    }
    assert!(!err.contains("grid.n_x"));
}

#[test]
fn bad_documents_are_config_errors() {
    let good = experiment_preset("bbo-near-field").unwrap().to_toml().unwrap();
    let cases = [
        good.replace("schema_version = 1", "schema_version = 7"),
        good.replace("[run]", "[run]\nbogus = 3"),
        good.replace("crystal = \"bbo\"", "crystal = 12"),
        "not = [valid".to_string(),
    ];
    for text in &cases {
        let e = ExperimentConfig::from_toml(text).unwrap_err();
        assert!(e.is_config(), "{e}");
    }
}

#[test]
fn validation_names_the_violated_constraint() {
    let mut cfg = experiment_preset("bbo-near-field").unwrap();
    cfg.grid.n_x /= 8;
    cfg.grid.l_x *= 4.0;
    let msg = validate(&cfg).unwrap_err().to_string();
    assert!(msg.contains("Nyquist"), "{msg}");

    let mut cfg = experiment_preset("lbo-far-field").unwrap();
    cfg.grid.l_x /= 8.0;
    cfg.grid.n_x /= 8;
    assert!(validate(&cfg).unwrap_err().to_string().contains("window"));

    let mut cfg = experiment_preset("lbo-far-field").unwrap();
    cfg.detector.eta = 2.0;
    assert!(validate(&cfg).unwrap_err().is_config());
}

#[test]
fn validation_reports_dimensionless_groups() {
    let r = validate(&experiment_preset("lbo-far-field").unwrap()).unwrap();
    let get = |k: &str| r.iter().find(|(n, _)| *n == k).map(|p| p.1).unwrap();
    assert!((get("sigma_p_lc") - 3.0).abs() < 1e-12);
    assert!((get("dq0_over_q0") - 0.1).abs() < 1e-3);
}

// --- command line ---

#[test]
fn presets_are_listed_and_dumped() {
    let o = cli(&["presets"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for p in experiment_preset_names() {
        assert!(text.contains(p.name));
    }
    assert!(text.contains("crystals: lbo, bbo"));

    let o = cli(&["presets", "--dump", "bbo-far-field"]);
    assert_eq!(code(&o), 0);
    let cfg = ExperimentConfig::from_toml(&String::from_utf8_lossy(&o.stdout)).unwrap();
    assert_eq!(cfg, experiment_preset("bbo-far-field").unwrap());
}

#[test]
fn validate_accepts_files_and_rejects_bad_input_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("near.toml");
    std::fs::write(&path, experiment_preset("bbo-near-field").unwrap().to_toml().unwrap()).unwrap();
    let o = cli(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("ok\n"));

    let mut bad = experiment_preset("bbo-near-field").unwrap();
    bad.grid.n_x /= 8;
    bad.grid.l_x *= 4.0;
    std::fs::write(&path, bad.to_toml().unwrap()).unwrap();
    let o = cli(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Nyquist"));

    assert_eq!(code(&cli(&["validate", "--preset", "nope"])), 2);
    assert_eq!(code(&cli(&["validate"])), 2);
    assert_eq!(code(&cli(&["validate", "--config", "/nonexistent/x.toml"])), 2);
    assert_eq!(code(&cli(&["validate", "--preset", "lbo-far-field", "--n-traj", "1"])), 2);
    // clap usage errors share the configuration code
    assert_eq!(code(&cli(&["frobnicate"])), 2);
}

#[test]
fn runtime_failures_exit_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "").unwrap();
    let out = file.join("sub");
    let o = cli(&["pwpa", "--preset", "lbo-far-field", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn pwpa_task_writes_tables_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["pwpa", "--preset", "lbo-far-field", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = table(&dir.path().join("pwpa_ratio_vs_d.tsv"));
    let meta = |k: &str| t.meta.iter().find(|(n, _)| n == k).map(|p| p.1.clone());
    assert_eq!(meta("task").as_deref(), Some("pwpa"));
    assert!(!t.rows.is_empty());
    let saved = ExperimentConfig::load(&dir.path().join("config.toml")).unwrap();
    assert_eq!(meta("config_sha256").unwrap(), saved.hash());
    assert_eq!(saved.output.dir, dir.path().to_str().unwrap());
    assert_eq!(meta("mode").as_deref(), Some("pwpa"));
}

#[test]
fn simulate_is_reproducible_from_the_seed() {
    let run = |seed: &str, dir: &Path| {
        let o = cli(&["simulate", "--preset", "lbo-far-field", "--n-traj", "4", "--mode", "mc", "--seed", seed, "--out", dir.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        table(&dir.join("mc_ratio_vs_d.tsv")).rows
    };
    // bitwise, so NaN columns compare equal
    let bits = |r: &Vec<Vec<f64>>| r.iter().map(|row| row.iter().map(|v| v.to_bits()).collect::<Vec<_>>()).collect::<Vec<_>>();
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ra, rb, rc) = (run("5", a.path()), run("5", b.path()), run("6", c.path()));
    assert_eq!(bits(&ra), bits(&rb));
    assert_ne!(bits(&ra), bits(&rc));
    assert!(ra.iter().all(|r| r[3] > 0.0 && r[4] > 0.0));
}
