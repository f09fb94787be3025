use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::detection::{Measurement, Plane};
use crate::error::{Error, Result};
use crate::experiment::pipeline::{far_center, far_shape};
use crate::experiment::*;
use crate::optics::OpticalPath;
use crate::output::{Matrix, Table};
use crate::propagator::{sample_vacuum, write_field, TrajectorySeed};
use crate::pwpa::{mean_intensity_far, QuadSettings};
use crate::pwpa::table::pixel_table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Analytic tables only.
    Pwpa,
    /// The configured pipeline at the configured imaging shift.
    Simulate,
    /// Pixel-size scan plus the (Δz, Δy) surface when the scan lists are given.
    Scan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub wall_time: f64,
    /// Diagnostics collected along the way (statistical warnings, dropped trajectories).
    pub notes: Vec<String>,
}

/// Checks a configuration; returns the dimensionless groups on success and every
/// violated constraint otherwise.
pub fn validate(cfg: &ExperimentConfig) -> Result<Vec<(&'static str, f64)>> {
    let setup = Setup::new(cfg)?;
    let diag = setup.diagnostics();
    if !diag.is_empty() {
        return Err(Error::Config(diag.join("; ")));
    }
    Ok(setup.scales.ratios(&setup.crystal, &setup.pump))
}

struct Writer {
    dir: PathBuf,
    meta: Vec<(String, String)>,
    files: Vec<PathBuf>,
    tables: Vec<(String, Table)>,
    matrices: Vec<(String, Matrix)>,
}

impl Writer {
    fn table(&mut self, name: &str, t: Table) {
        self.tables.push((name.into(), t));
    }

    fn finish(mut self, wall: f64) -> Result<Vec<PathBuf>> {
        let mut meta = self.meta.clone();
        meta.push(("wall_time_s".into(), format!("{wall:.3}")));
        for (name, t) in std::mem::take(&mut self.tables) {
            let mut all = meta.clone();
            all.extend(t.meta.iter().cloned());
            let t = Table { meta: all, ..t };
            let p = self.dir.join(name);
            t.write(&p)?;
            self.files.push(p);
        }
        for (name, m) in std::mem::take(&mut self.matrices) {
            let mut all = meta.clone();
            all.extend(m.meta.iter().cloned());
            let m = Matrix { meta: all, ..m };
            let p = self.dir.join(name);
            m.write(&p)?;
            self.files.push(p);
        }
        Ok(self.files)
    }
}

fn provenance(cfg: &ExperimentConfig, task: Task, mode: RunMode) -> Result<Vec<(String, String)>> {
    let g = &cfg.grid;
    let mut m = vec![
        ("program".to_string(), format!("twinbeam {}", env!("CARGO_PKG_VERSION"))),
        ("task".into(), format!("{task:?}").to_lowercase()),
        ("mode".into(), format!("{mode:?}").to_lowercase()),
        ("config_sha256".into(), cfg.hash()),
        ("master_seed".into(), cfg.run.master_seed.to_string()),
        ("n_traj".into(), cfg.run.n_traj.to_string()),
        (
            "grid".into(),
            format!("{:?} n_x={} n_y={} n_t={} n_z={} l_x={:e} l_y={:e} t_win={:e}", g.dims, g.n_x, g.n_y, g.n_t, g.n_z, g.l_x, g.l_y, g.t_win),
        ),
    ];
    if let Some(n) = &cfg.name {
        m.push(("name".into(), n.clone()));
    }
    for line in cfg.to_toml()?.lines().filter(|l| !l.trim().is_empty()) {
        m.push(("config".into(), line.to_string()));
    }
    Ok(m)
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

const MC_COLUMNS: [&str; 12] =
    ["d", "d_over_unit", "cells", "n1", "n2", "n_plus", "var_minus", "ratio", "se_n_plus", "se_var_minus", "se_ratio", "thinned_ratio"];

fn mc_row(d: f64, unit: f64, cells: usize, m: &Measurement, thinned: Option<&Measurement>) -> Vec<f64> {
    vec![
        d,
        d / unit,
        cells as f64,
        m.n1,
        m.n2,
        m.n_plus,
        m.var_minus,
        opt(m.ratio),
        m.se_n_plus,
        m.se_var_minus,
        opt(m.se_ratio),
        opt(thinned.and_then(|t| t.ratio)),
    ]
}

/// Runs the configured pipeline(s) and writes one plot-ready table per output into `out`.
pub fn run_experiment(cfg: &ExperimentConfig, task: Task, out: &Path) -> Result<RunSummary> {
    let t0 = Instant::now();
    let setup = Setup::new(cfg).map_err(|e| e.context("setup"))?;
    let diag = setup.diagnostics();
    if !diag.is_empty() {
        return Err(Error::Config(diag.join("; ")));
    }
    let mode = if task == Task::Pwpa { RunMode::Pwpa } else { cfg.run.mode };
    let scan = &cfg.scan;
    if task == Task::Scan && scan.d_list.is_empty() && scan.d_rel.is_empty() && scan.dz_list.is_empty() {
        return Err(Error::Config("scan needs scan.d_list, scan.d_rel or scan.dz_list/dy_list".into()));
    }
    std::fs::create_dir_all(out)?;
    let cfg_path = out.join("config.toml");
    std::fs::write(&cfg_path, cfg.to_toml()?)?;
    let mut w = Writer {
        dir: out.to_path_buf(),
        meta: provenance(cfg, task, mode)?,
        files: vec![cfg_path],
        tables: Vec::new(),
        matrices: Vec::new(),
    };
    let mut notes = Vec::new();
    let far = cfg.detector.plane == Plane::FarField;
    let unit = if far { setup.scales.x_diff } else { setup.scales.x_coh };
    let d_values = if task == Task::Simulate && scan.d_list.is_empty() && scan.d_rel.is_empty() {
        vec![cfg.detector.d]
    } else {
        setup.d_values(unit)
    };
    let (dz0, dy0) = match cfg.optics {
        OpticalPath::NearField { delta_z, delta_y, .. } => (delta_z, delta_y),
        _ => (0.0, 0.0),
    };
    let surface = task == Task::Scan && !scan.dz_list.is_empty() && !scan.dy_list.is_empty();

    let mut scales = Table::new(&["value"]);
    for (k, v) in setup.scales.ratios(&setup.crystal, &setup.pump) {
        scales.meta(k, format!("{v:.6e}"));
    }
    scales.meta("x_coh", setup.scales.x_coh);
    scales.meta("x_diff", setup.scales.x_diff);
    scales.meta("q_0", setup.scales.q_0);
    scales.meta("omega_0", setup.scales.omega_0);
    scales.push(vec![unit]);
    scales.columns = vec![if far { "x_diff".into() } else { "x_coh".into() }];
    w.table("scales.tsv", scales);

    if mode != RunMode::Mc {
        if far {
            let curve = pwpa_far_curve(&setup, &d_values).map_err(|e| e.context("analytic far-field curve"))?;
            let mut t = pixel_table("d", &curve);
            t.meta("natural_unit", unit);
            w.table("pwpa_ratio_vs_d.tsv", t);
            let shape = far_shape(&setup)?;
            let quad = QuadSettings { rel_tol: 1e-3, ..setup.quad() };
            let mut prof = Table::new(&["y", "intensity"]);
            for iy in 0..shape.y.n {
                let y = shape.y.coord(iy);
                let r = mean_intensity_far([0.0, y], &setup.crystal, &setup.scales, setup.sigma_p(), setup.focal(), &quad)
                    .map_err(|e| e.context("analytic far-field profile"))?;
                prof.push(vec![y, r.value]);
            }
            w.table("pwpa_far_profile.tsv", prof);
        } else {
            let curve = pwpa_near_curve(&setup, &d_values, dz0, dy0).map_err(|e| e.context("analytic near-field curve"))?;
            let mut t = pixel_table("d", &curve);
            t.meta("delta_z", dz0);
            t.meta("delta_y", dy0);
            t.meta("natural_unit", unit);
            w.table("pwpa_ratio_vs_d.tsv", t);
            if dz0 != 0.0 || dy0 != 0.0 {
                let curve = pwpa_near_curve(&setup, &d_values, 0.0, 0.0).map_err(|e| e.context("analytic near-field curve"))?;
                w.table("pwpa_ratio_vs_d_unshifted.tsv", pixel_table("d", &curve));
            }
            if surface {
                let s = pwpa_near_surface(&setup, cfg.detector.d, &scan.dz_list, &scan.dy_list)
                    .map_err(|e| e.context("analytic near-field surface"))?;
                let mut meta = vec![
                    ("d".to_string(), format!("{:e}", s.d)),
                    ("min_delta_z".into(), format!("{:e}", s.min_dz)),
                    ("min_delta_y".into(), format!("{:e}", s.min_dy)),
                    ("min_ratio".into(), format!("{:.6}", s.min_ratio)),
                    ("valley_slope".into(), format!("{:.6}", s.valley_slope)),
                ];
                meta.push(("values".into(), "ratio, rows delta_z, columns delta_y".into()));
                w.matrices.push((
                    "pwpa_surface.tsv".into(),
                    Matrix { meta, row_axis: ("delta_z".into(), s.dz), col_axis: ("delta_y".into(), s.dy), values: s.ratio },
                ));
            }
        }
    }

    if mode != RunMode::Pwpa {
        let prop = setup.propagator().map_err(|e| e.context("propagator"))?;
        for i in 0..(cfg.output.dump_fields as u64).min(cfg.run.n_traj) {
            let seed = TrajectorySeed::new(cfg.run.master_seed, i);
            let st = prop.propagate(sample_vacuum(&cfg.grid, setup.crystal.envelope_count(), seed))?;
            let p = out.join(format!("field_{i:04}.bin"));
            write_field(&p, &st, Some((cfg.run.master_seed, i)))?;
            w.files.push(p);
        }
        if far {
            let r = far_field_run(&setup, &prop, &d_values, scan.map).map_err(|e| e.context("far-field ensemble"))?;
            let mut t = Table::new(&MC_COLUMNS);
            t.meta("eta", cfg.detector.eta);
            t.meta("trajectories_ok", r.info.n_ok);
            t.meta("trajectories_failed", r.info.failed.len());
            for p in &r.points {
                t.push(mc_row(p.d, unit, p.cells, &p.measurement, p.thinned.as_ref()));
                notes.extend(p.measurement.diagnostics.iter().cloned());
            }
            w.table("mc_ratio_vs_d.tsv", t);
            let mut prof = Table::new(&["y", "x", "n_mean", "se"]);
            for (j, (m, e)) in r.profile.iter().zip(&r.profile_se).enumerate() {
                let (iy, ix) = (j / r.shape.x.n, j % r.shape.x.n);
                prof.push(vec![r.shape.y.coord(iy), r.shape.x.coord(ix), *m, *e]);
            }
            w.table("mc_profile.tsv", prof);
            if let Some(map) = &r.map {
                let mut t = Table::new(&["y", "x", "corr", "se"]);
                let c = far_center(&setup);
                t.meta("fixed_y", c[1]);
                t.meta("fixed_x", c[0]);
                for j in 0..map.cols {
                    let (iy, ix) = (j / r.shape.x.n, j % r.shape.x.n);
                    t.push(vec![r.shape.y.coord(iy), r.shape.x.coord(ix), map.get(0, j), map.err(0, j)]);
                }
                w.table("mc_map_row.tsv", t);
            }
            notes.extend(r.info.failed.iter().map(|(i, e)| format!("trajectory {i} dropped: {e}")));
        } else {
            let shifts: Vec<(f64, f64)> = if surface {
                scan.dz_list.iter().flat_map(|&z| scan.dy_list.iter().map(move |&y| (z, y))).collect()
            } else {
                vec![(dz0, dy0)]
            };
            let d_mc = if surface { vec![cfg.detector.d] } else { d_values.clone() };
            let (info, pts) = near_field_run(&setup, &prop, &shifts, &d_mc, scan.pooled)
                .map_err(|e| e.context("near-field ensemble"))?;
            let mut cols = vec!["delta_z", "delta_y"];
            cols.extend_from_slice(&MC_COLUMNS);
            let mut t = Table::new(&cols);
            t.meta("trajectories_ok", info.n_ok);
            t.meta("trajectories_failed", info.failed.len());
            t.meta("pooled", scan.pooled);
            for p in &pts {
                let mut row = vec![p.dz, p.dy];
                row.extend(mc_row(p.scan.d, unit, p.scan.cells, &p.scan.measurement, None));
                t.push(row);
                notes.extend(p.scan.measurement.diagnostics.iter().cloned());
            }
            w.table(if surface { "mc_surface.tsv" } else { "mc_ratio_vs_d.tsv" }, t);
            notes.extend(info.failed.iter().map(|(i, e)| format!("trajectory {i} dropped: {e}")));
        }
    }
    let wall = t0.elapsed().as_secs_f64();
    let files = w.finish(wall)?;
    Ok(RunSummary { files, wall_time: wall, notes })
}
