use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{CrystalParams, PhaseMatching};
use crate::pwpa::gain::twin_amplitude;

/// tanh(x)/(2x), continued to 1/2 at x = 0.
pub fn tanh_factor(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        0.5 * (1.0 - x * x / 3.0)
    } else {
        x.tanh() / (2.0 * x)
    }
}

/// Longitudinal and transverse detector shifts (Δz_opt, Δy_opt) that cancel the
/// linear part of the twin-photon phase in the near field.
pub fn optimal_shifts(crystal: &CrystalParams, sigma_p: f64) -> Result<(f64, f64)> {
    if crystal.phase_matching != PhaseMatching::TypeII {
        return Err(Error::Param("optimal shifts are defined for type II crystals".into()));
    }
    let l = crystal.l_c;
    let f = tanh_factor(sigma_p * l);
    let (n1, n2) = (crystal.n[1], crystal.n[2]);
    Ok((f * (n1 + n2) / (2.0 * n1 * n2) * l, f * crystal.rho_2 * l))
}

/// Phase imprinted on the cross term by back-propagating both arms by Δz and
/// offsetting the pixel centres by Δy = x̄₁ − x̄₂.
pub fn imaging_phase(crystal: &CrystalParams, q_sq: f64, qy: f64, dz: f64, dy: f64) -> f64 {
    q_sq * dz * (crystal.lambda[1] + crystal.lambda[2]) / (4.0 * PI) + qy * dy
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseComparison {
    pub exact: f64,
    pub approx: f64,
    /// Both arguments lie inside the high-gain band where the linearized phase is trusted.
    pub in_band: bool,
}

/// Default band |Δl_c| ≤ σ_p l_c for the linearized phase.
pub fn default_band(sigma_p_lc: f64) -> f64 {
    sigma_p_lc
}

/// Exact phase of U₁(q)V₂(−q)U₁*(q′)V₂*(−q′) against its high-gain linearization.
pub fn phase_of_gain_product(
    q: [f64; 2],
    q2: [f64; 2],
    omega: f64,
    crystal: &CrystalParams,
    sigma_p: f64,
    band: f64,
) -> PhaseComparison {
    let l = crystal.l_c;
    let a = twin_amplitude(q[0], q[1], omega, crystal, sigma_p, l);
    let b = twin_amplitude(q2[0], q2[1], omega, crystal, sigma_p, l);
    let exact = (a * b.conj()).arg();
    let d1 = crystal.mismatch(q[0], q[1], omega) * l;
    let d2 = crystal.mismatch(q2[0], q2[1], omega) * l;
    let approx = tanh_factor(sigma_p * l) * (d1 - d2);
    PhaseComparison { exact, approx, in_band: d1.abs() <= band && d2.abs() <= band }
}
