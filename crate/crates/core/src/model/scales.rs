use std::f64::consts::PI;

use crate::model::crystal::{CrystalParams, PhaseMatching};
use crate::model::pump::PumpParams;

/// Characteristic bandwidths and lengths of a crystal/pump/lens configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    pub q_0: f64,
    /// Infinite when k′₁ = k′₂.
    pub omega_0_prime: f64,
    pub omega_0_dprime: f64,
    pub omega_0: f64,
    pub k_bar: f64,
    pub x_coh: f64,
    pub q_c: f64,
    /// Zero when `no_rings` is set.
    pub q_r: f64,
    pub no_rings: bool,
    pub delta_q0: f64,
    pub delta_omega0: f64,
    pub x_diff: f64,
    pub x_0: f64,
    pub s_a: f64,
    pub s_diff: f64,
    pub z_r0: f64,
    /// Infinite when k″₀ = 0.
    pub z_disp0: f64,
}

impl DerivedScales {
    pub fn omega_0_prime_infinite(&self) -> bool {
        self.omega_0_prime.is_infinite()
    }

    /// Dimensionless groups that specify an experiment.
    pub fn ratios(&self, crystal: &CrystalParams, pump: &PumpParams) -> Vec<(&'static str, f64)> {
        vec![
            ("sigma_p_lc", pump.sigma_p_lc),
            ("delta0_lc", crystal.delta_0 * crystal.l_c),
            ("dq0_over_q0", self.delta_q0 / self.q_0),
            ("domega0_over_omega0", self.delta_omega0 / self.omega_0),
            ("qR_over_q0", self.q_r / self.q_0),
            ("qC_over_q0", self.q_c / self.q_0),
            ("lc_over_zR0", crystal.l_c / self.z_r0),
        ]
    }
}

/// Effective pump cross-section S_A = πw₀²/2.
pub fn pump_area(w0: f64) -> f64 {
    0.5 * PI * w0 * w0
}

pub fn derive_scales(crystal: &CrystalParams, pump: &PumpParams, f: f64) -> DerivedScales {
    let l = crystal.l_c;
    let k_bar = crystal.k_bar();
    let q_0 = (k_bar / l).sqrt();
    let dkp = (crystal.kp[1] - crystal.kp[2]).abs();
    let omega_0_prime = if dkp == 0.0 { f64::INFINITY } else { 1.0 / (dkp * l) };
    let kpp_sum = crystal.kpp[1] + crystal.kpp[2];
    let omega_0_dprime = if kpp_sum == 0.0 { f64::INFINITY } else { (2.0 / (kpp_sum.abs() * l)).sqrt() };
    let omega_0 = match crystal.phase_matching {
        PhaseMatching::TypeIDegenerate => omega_0_dprime,
        PhaseMatching::TypeII => omega_0_prime,
    };
    let q_c = 0.5 * k_bar * crystal.rho_2;
    let qr_sq = k_bar * crystal.delta_0 + q_c * q_c;
    let (q_r, no_rings) = if qr_sq >= 0.0 { (qr_sq.sqrt(), false) } else { (0.0, true) };
    let lambda = crystal.lambda[1];
    let delta_q0 = 2.0 / pump.w0;
    let delta_omega0 = 2.0 / pump.tau0;
    let s_a = pump_area(pump.w0);
    let z_disp0 = if crystal.kpp[0] == 0.0 {
        f64::INFINITY
    } else {
        pump.tau0 * pump.tau0 / (2.0 * crystal.kpp[0].abs())
    };
    DerivedScales {
        q_0,
        omega_0_prime,
        omega_0_dprime,
        omega_0,
        k_bar,
        x_coh: 1.0 / q_0,
        q_c,
        q_r,
        no_rings,
        delta_q0,
        delta_omega0,
        x_diff: lambda * f / (2.0 * PI) * delta_q0,
        x_0: lambda * f / (2.0 * PI) * q_0,
        s_a,
        s_diff: (lambda * f).powi(2) / s_a,
        z_r0: PI * pump.w0 * pump.w0 / crystal.lambda[0],
        z_disp0,
    }
}
