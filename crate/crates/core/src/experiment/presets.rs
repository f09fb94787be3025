use crate::detection::{DetectorSpec, Plane};
use crate::error::{Error, Result};
use crate::experiment::config::*;
use crate::model::{crystal_preset, GridDims, GridSpec, PumpParams, PumpProfile};
use crate::optics::{filter_half_width, OpticalPath};
use crate::propagator::StepScheme;
use crate::pwpa::optimal_shifts;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetInfo {
    pub name: &'static str,
    pub summary: &'static str,
}

const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "lbo-far-field",
        summary: "type I LBO, Δ₀l_c = 13.6, σ_p l_c = 3, δq₀/q₀ = 0.1: far-field ratio vs d, map row, profile",
    },
    PresetInfo { name: "lbo-far-field-0.05", summary: "as lbo-far-field with δq₀/q₀ = 0.05 (w₀ ≈ 920 µm)" },
    PresetInfo { name: "lbo-far-field-0.3", summary: "as lbo-far-field with δq₀/q₀ = 0.3 (w₀ ≈ 150 µm)" },
    PresetInfo { name: "lbo-far-field-0.5", summary: "as lbo-far-field with δq₀/q₀ = 0.5" },
    PresetInfo {
        name: "bbo-far-field",
        summary: "type II BBO, q_R = 0, σ_p l_c = 4, δq₀/q₀ = 0.1, τ₀ = 1.5 ps: far-field ratio vs d",
    },
    PresetInfo {
        name: "bbo-near-field",
        summary: "type II BBO, w₀ = 332 µm, τ₀ = 1.5 ps, σ_p l_c = 3, 10 nm filter: near-field ratio vs d and (Δz, Δy) surface",
    },
];

pub fn experiment_preset_names() -> &'static [PresetInfo] {
    PRESETS
}

pub fn experiment_preset(name: &str) -> Result<ExperimentConfig> {
    match name {
        "lbo-far-field" => lbo_far_field(0.1),
        "lbo-far-field-0.05" => lbo_far_field(0.05),
        "lbo-far-field-0.3" => lbo_far_field(0.3),
        "lbo-far-field-0.5" => lbo_far_field(0.5),
        "bbo-far-field" => bbo_far_field(0.1),
        "bbo-near-field" => bbo_near_field(),
        other => Err(Error::Config(format!("unknown experiment preset '{other}'"))),
    }
}

fn q0_of(name: &str) -> Result<f64> {
    let c = crystal_preset(name)?;
    Ok((c.k_bar() / c.l_c).sqrt())
}

fn lattice(len: f64, max_step: f64) -> usize {
    ((len / max_step).ceil() as usize).next_power_of_two()
}

fn run(n_traj: u64) -> RunConfig {
    RunConfig {
        n_traj,
        master_seed: 1,
        mode: RunMode::Both,
        workers: 0,
        scheme: StepScheme::RotatingComoving,
        filter_fwhm: None,
        chunk: 256,
        salvage_partial: false,
    }
}

/// Type I LBO far field. The pump is Gaussian in space and continuous in time, which
/// keeps the frequency lattice small; the window is ten waists wide.
pub fn lbo_far_field(dq0_over_q0: f64) -> Result<ExperimentConfig> {
    let q0 = q0_of("lbo")?;
    let c = crystal_preset("lbo")?;
    let q_r = (c.k_bar() * c.delta_0).max(0.0).sqrt();
    let w0 = 2.0 / (dq0_over_q0 * q0);
    let l = 10.0 * w0;
    let n = lattice(l, std::f64::consts::PI / (q_r + 4.0 * q0) * 0.98);
    let dt = 7.0e-15;
    Ok(ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        name: Some(format!("lbo-far-field dq0/q0={dq0_over_q0}")),
        description: Some("type I LBO far-field correlations, pump size scan member".into()),
        crystal: CrystalSpec::Preset("lbo".into()),
        pump: PumpConfig {
            sigma_p_lc: 3.0,
            w0: None,
            dq0_over_q0: Some(dq0_over_q0),
            tau0: Some(f64::INFINITY),
            domega0_over_omega0: None,
            profile: PumpProfile::Gaussian,
        },
        grid: GridSpec { dims: GridDims::Xt, n_x: n, n_y: 1, n_t: 8, l_x: l, l_y: 0.0, t_win: 8.0 * dt, n_z: 32 },
        detector: DetectorSpec {
            plane: Plane::FarField,
            d: 1e-3,
            center_1: [0.0, 0.0],
            center_2: [0.0, 0.0],
            t_d: None,
            eta: 1.0,
            symmetric: true,
        },
        optics: OpticalPath::FarField { f: 0.1 },
        run: run(1000),
        scan: ScanConfig {
            d_list: Vec::new(),
            d_rel: vec![0.35, 0.7, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0],
            dz_list: Vec::new(),
            dy_list: Vec::new(),
            map: true,
            pixel_center: PixelCenter::Ring,
            pooled: false,
        },
        output: OutputConfig { dir: "out/lbo-far-field".into(), dump_fields: 0 },
    })
}

/// Type II BBO far field at σ_p l_c = 4.
pub fn bbo_far_field(dq0_over_q0: f64) -> Result<ExperimentConfig> {
    let q0 = q0_of("bbo")?;
    let w0 = 2.0 / (dq0_over_q0 * q0);
    let l = 6.0 * w0;
    let c = crystal_preset("bbo")?;
    let q_c = 0.5 * c.k_bar() * c.rho_2;
    let n = lattice(l, std::f64::consts::PI / (q_c + 5.0 * q0));
    Ok(ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        name: Some("bbo-far-field".into()),
        description: Some("type II BBO far-field correlations with vanishing ring radius".into()),
        crystal: CrystalSpec::Preset("bbo".into()),
        pump: PumpConfig {
            sigma_p_lc: 4.0,
            w0: None,
            dq0_over_q0: Some(dq0_over_q0),
            tau0: Some(1.5e-12),
            domega0_over_omega0: None,
            profile: PumpProfile::Gaussian,
        },
        grid: GridSpec { dims: GridDims::Xt, n_x: n, n_y: 1, n_t: 32, l_x: l, l_y: 0.0, t_win: 9.6e-12, n_z: 256 },
        detector: DetectorSpec {
            plane: Plane::FarField,
            d: 1e-3,
            center_1: [0.0, 0.0],
            center_2: [0.0, 0.0],
            t_d: None,
            eta: 1.0,
            symmetric: true,
        },
        optics: OpticalPath::FarField { f: 0.1 },
        run: run(200),
        scan: ScanConfig {
            d_rel: vec![0.5, 1.0, 2.0, 3.0, 4.0, 6.0],
            map: true,
            pixel_center: PixelCenter::Ring,
            ..ScanConfig::default()
        },
        output: OutputConfig { dir: "out/bbo-far-field".into(), dump_fields: 0 },
    })
}

/// Type II BBO near field with walk-off and diffraction compensation at the optimal shifts.
/// The lattice step is x_coh/6, so the reference pixel d = 2x_coh covers 12 cells, and the
/// time step matches the filter band.
pub fn bbo_near_field() -> Result<ExperimentConfig> {
    let crystal = crystal_preset("bbo")?;
    let q0 = q0_of("bbo")?;
    let x_coh = 1.0 / q0;
    let w0 = 332e-6;
    let tau0 = 1.5e-12;
    let pump = PumpParams::with_gain(&crystal, w0, tau0, 3.0, PumpProfile::Gaussian)?;
    let (dz, dy) = optimal_shifts(&crystal, pump.sigma_p(&crystal))?;
    let step = x_coh / 6.0;
    let n = lattice(6.0 * w0, step);
    let half = filter_half_width(crystal.lambda[1], 10e-9);
    let dt = std::f64::consts::PI / half;
    let nt = ((6.0 * tau0 / dt).ceil() as usize).next_power_of_two();
    let span = |c: f64, k: usize| -> Vec<f64> { (0..k).map(|i| c * 2.0 * i as f64 / (k - 1) as f64).collect() };
    Ok(ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        name: Some("bbo-near-field".into()),
        description: Some("type II BBO near-field correlations behind a 10 nm interference filter".into()),
        crystal: CrystalSpec::Preset("bbo".into()),
        pump: PumpConfig {
            sigma_p_lc: 3.0,
            w0: Some(w0),
            dq0_over_q0: None,
            tau0: Some(tau0),
            domega0_over_omega0: None,
            profile: PumpProfile::Gaussian,
        },
        grid: GridSpec {
            dims: GridDims::Xt,
            n_x: n,
            n_y: 1,
            n_t: nt,
            l_x: n as f64 * step,
            l_y: 0.0,
            t_win: nt as f64 * dt,
            n_z: 128,
        },
        detector: DetectorSpec {
            plane: Plane::NearField,
            d: 2.0 * x_coh,
            center_1: [0.0, 0.0],
            center_2: [0.0, 0.0],
            t_d: None,
            eta: 1.0,
            symmetric: false,
        },
        optics: OpticalPath::NearField { f: 0.1, delta_z: dz, delta_y: dy },
        run: RunConfig { filter_fwhm: Some(10e-9), chunk: 32, ..run(100) },
        scan: ScanConfig {
            d_rel: vec![0.5, 1.0, 2.0, 3.0, 4.0, 6.0],
            dz_list: span(dz, 21),
            dy_list: span(dy, 21),
            ..ScanConfig::default()
        },
        output: OutputConfig { dir: "out/bbo-near-field".into(), dump_fields: 0 },
    })
}
