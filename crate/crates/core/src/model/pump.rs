use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::crystal::CrystalParams;

/// Spatio-temporal pump shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PumpProfile {
    #[default]
    Gaussian,
    /// Constant amplitude A_p everywhere (plane-wave, continuous-wave limit).
    PlaneWave,
}

/// Gaussian pump: A₀(x,t,0) = A_p exp(−|x|²/w₀² − t²/τ₀²).
/// An infinite τ₀ (or w₀) gives a continuous-wave (or plane-wave) limit along that axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpParams {
    pub a_p: f64,
    pub w0: f64,
    pub tau0: f64,
    pub sigma_p_lc: f64,
    pub profile: PumpProfile,
}

impl PumpParams {
    /// Builds the pump with A_p chosen so that σA_p l_c equals the requested gain.
    pub fn with_gain(crystal: &CrystalParams, w0: f64, tau0: f64, sigma_p_lc: f64, profile: PumpProfile) -> Result<Self> {
        let a_p = if crystal.sigma > 0.0 { sigma_p_lc / (crystal.sigma * crystal.l_c) } else { 0.0 };
        let p = PumpParams { a_p, w0, tau0, sigma_p_lc, profile };
        p.validate(crystal)?;
        Ok(p)
    }

    /// Peak gain σ_p = σA_p (1/m).
    pub fn sigma_p(&self, crystal: &CrystalParams) -> f64 {
        crystal.sigma * self.a_p
    }

    pub fn validate(&self, crystal: &CrystalParams) -> Result<()> {
        if !(self.w0 > 0.0) || !(self.tau0 > 0.0) {
            return Err(Error::Param("pump waist w0 and duration tau0 must be positive".into()));
        }
        if !(self.sigma_p_lc >= 0.0) || !(self.a_p >= 0.0) {
            return Err(Error::Param("pump gain must be non-negative".into()));
        }
        let g = crystal.sigma * self.a_p * crystal.l_c;
        if (g - self.sigma_p_lc).abs() > 1e-12 * self.sigma_p_lc.max(1.0) {
            return Err(Error::Param("sigma_p_lc inconsistent with σ·A_p·l_c".into()));
        }
        Ok(())
    }
}
