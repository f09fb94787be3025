//! Experiment configuration, presets and the pipelines that drive the solver,
//! the optics and the detectors.

pub mod config;
pub mod pipeline;
pub mod presets;
pub mod run;

pub use config::{
    missing_fields, CrystalSpec, ExperimentConfig, OutputConfig, PixelCenter, PumpConfig, RunConfig, RunMode,
    ScanConfig, SCHEMA_VERSION,
};
pub use pipeline::{
    drive, far_field_run, gaussian_factorization, near_field_run, pwpa_far_curve, pwpa_near_curve, pwpa_near_surface,
    FarFieldResult, NearFieldPoint, RunInfo, ScanPoint, Surface,
};
pub use presets::{experiment_preset, experiment_preset_names, PresetInfo};
pub use run::{run_experiment, validate, RunSummary, Task};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{derive_scales, CrystalParams, DerivedScales, GridDims, PumpParams};
use crate::optics::{filter_half_width, OpticalPath};
use crate::propagator::Propagator;
use crate::pwpa::{QuadSettings, TransverseDims};

/// A configuration with every derived quantity resolved.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: ExperimentConfig,
    pub crystal: CrystalParams,
    pub pump: PumpParams,
    pub scales: DerivedScales,
    pub dims: TransverseDims,
}

impl Setup {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        let crystal = config.crystal.resolve()?.build()?;
        crystal.validate()?;
        let p = &config.pump;
        let unit = PumpParams { a_p: 0.0, w0: 1.0, tau0: 1.0, sigma_p_lc: 0.0, profile: p.profile };
        let base = derive_scales(&crystal, &unit, 1.0);
        let w0 = match (p.w0, p.dq0_over_q0) {
            (Some(w), None) => w,
            (None, Some(r)) if r == 0.0 => f64::INFINITY,
            (None, Some(r)) => 2.0 / (r * base.q_0),
            _ => return Err(Error::Config("give exactly one of pump.w0 and pump.dq0_over_q0".into())),
        };
        let tau0 = match (p.tau0, p.domega0_over_omega0) {
            (Some(t), None) => t,
            (None, Some(r)) if r == 0.0 => f64::INFINITY,
            (None, Some(r)) => 2.0 / (r * base.omega_0),
            _ => return Err(Error::Config("give exactly one of pump.tau0 and pump.domega0_over_omega0".into())),
        };
        let pump = PumpParams::with_gain(&crystal, w0, tau0, p.sigma_p_lc, p.profile)?;
        let f = match config.optics {
            OpticalPath::FarField { f } | OpticalPath::NearField { f, .. } => f,
            OpticalPath::FreeSpace { .. } => 1.0,
        };
        let scales = derive_scales(&crystal, &pump, f);
        let dims = match config.grid.dims {
            GridDims::Xt => TransverseDims::One,
            GridDims::Xy | GridDims::Xyt => TransverseDims::Two,
        };
        Ok(Setup { config: config.clone(), crystal, pump, scales, dims })
    }

    pub fn focal(&self) -> f64 {
        match self.config.optics {
            OpticalPath::FarField { f } | OpticalPath::NearField { f, .. } => f,
            OpticalPath::FreeSpace { .. } => 1.0,
        }
    }

    pub fn sigma_p(&self) -> f64 {
        self.pump.sigma_p(&self.crystal)
    }

    /// Signal focal-plane position per unit transverse wave vector, λf/2π.
    pub fn far_scale(&self) -> f64 {
        self.crystal.lambda[1] * self.focal() / (2.0 * PI)
    }

    /// Transverse wave vector of the phase-matching ring along +y.
    pub fn ring_q(&self) -> f64 {
        self.scales.q_r - self.scales.q_c
    }

    /// Filter half-width (rad/s), if an interference filter is configured.
    pub fn filter_half_width(&self) -> Option<f64> {
        self.config.run.filter_fwhm.map(|w| filter_half_width(self.crystal.lambda[1], w))
    }

    pub fn quad(&self) -> QuadSettings {
        QuadSettings { filter_half_width: self.filter_half_width(), ..QuadSettings::default() }
    }

    /// Effective pump length (one transverse dimension) or area (two) for far-field δ(0).
    pub fn pump_extent(&self) -> f64 {
        match self.dims {
            TransverseDims::One => self.pump.w0 * (0.5 * PI).sqrt(),
            TransverseDims::Two => self.scales.s_a,
        }
    }

    /// Detection time used by the analytic route; ratios do not depend on it.
    pub fn detection_time(&self) -> f64 {
        let g = &self.config.grid;
        self.config.detector.t_d.unwrap_or(if g.t_win > 0.0 { g.t_win } else { 1.0 })
    }

    /// Pixel sizes requested by the scan block, falling back to the detector pixel.
    pub fn d_values(&self, natural_unit: f64) -> Vec<f64> {
        let s = &self.config.scan;
        let mut v = s.d_list.clone();
        v.extend(s.d_rel.iter().map(|r| r * natural_unit));
        if v.is_empty() {
            v.push(self.config.detector.d);
        }
        v
    }

    pub fn propagator(&self) -> Result<Propagator> {
        Propagator::new(&self.crystal, &self.pump, &self.config.grid, self.config.run.scheme)
    }

    /// Every violated parameter, grid and geometry constraint.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let cfg = &self.config;
        out.extend(cfg.grid.violations(&self.crystal, &self.pump, &self.scales));
        if let Err(e) = cfg.optics.validate(&self.crystal) {
            out.push(e.to_string());
        }
        if let Err(e) = cfg.detector.validate() {
            out.push(e.to_string());
        }
        if cfg.run.n_traj < 2 && cfg.run.mode != RunMode::Pwpa {
            out.push("run.n_traj must be at least 2".into());
        }
        if cfg.run.chunk == 0 {
            out.push("run.chunk must be positive".into());
        }
        if let Some(w) = cfg.run.filter_fwhm {
            if !(w > 0.0) {
                out.push("run.filter_fwhm must be positive".into());
            }
        }
        out
    }
}
