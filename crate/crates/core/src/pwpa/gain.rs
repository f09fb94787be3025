use num_complex::Complex64;

use crate::model::CrystalParams;

/// Plane-wave-pump gains of one (q, Ω) mode pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSample {
    pub u1: Complex64,
    pub v1: Complex64,
    pub u2: Complex64,
    pub v2: Complex64,
    /// Γ(q,Ω); purely imaginary when σ_p² < Δ²/4.
    pub gamma: Complex64,
    /// Δ(q,Ω) in 1/m.
    pub delta: f64,
}

impl GainSample {
    pub fn u1v2_product(&self, mirror: &GainSample) -> Complex64 {
        self.u1 * mirror.v2
    }
}

/// (cosh Γz, sinh(Γz)/Γ) for Γ² = σ² − Δ²/4, continued to (cos κz, sin(κz)/κ) when Γ² < 0.
pub(crate) fn ch_sh(sigma_p: f64, delta: f64, z: f64) -> (f64, f64, Complex64) {
    let g2 = sigma_p * sigma_p - 0.25 * delta * delta;
    if g2 >= 0.0 {
        let g = g2.sqrt();
        let x = g * z;
        let sh = if x < 1e-8 { z * (1.0 + x * x / 6.0) } else { x.sinh() / g };
        (x.cosh(), sh, Complex64::new(g, 0.0))
    } else {
        let k = (-g2).sqrt();
        let x = k * z;
        let sh = if x < 1e-8 { z * (1.0 - x * x / 6.0) } else { x.sin() / k };
        (x.cos(), sh, Complex64::new(0.0, k))
    }
}

fn gains_for(sigma_p: f64, delta: f64, z: f64, phase: f64) -> (Complex64, Complex64, Complex64) {
    let (c, s, gamma) = ch_sh(sigma_p, delta, z);
    let pre = Complex64::from_polar(1.0, phase);
    let u = pre * Complex64::new(c, 0.5 * delta * s);
    let v = pre * (sigma_p * s);
    (u, v, gamma)
}

/// Input–output gains after a length z of crystal with uniform pump gain σ_p.
pub fn gain_uv(qx: f64, qy: f64, omega: f64, crystal: &CrystalParams, sigma_p: f64, z: f64) -> GainSample {
    let d1 = crystal.detuning(1, qx, qy, omega);
    let d2m = crystal.detuning(2, -qx, -qy, -omega);
    let d2 = crystal.detuning(2, qx, qy, omega);
    let d1m = crystal.detuning(1, -qx, -qy, -omega);
    let delta = crystal.delta_0 + d1 + d2m;
    let delta_m = crystal.delta_0 + d2 + d1m;
    let (u1, v1, gamma) = gains_for(sigma_p, delta, z, 0.5 * (d1 - d2m - crystal.delta_0) * z);
    let (u2, v2, _) = gains_for(sigma_p, delta_m, z, 0.5 * (d2 - d1m - crystal.delta_0) * z);
    GainSample { u1, v1, u2, v2, gamma, delta }
}

/// |V₁(q,Ω)|² without phase bookkeeping.
pub fn v1_sq(qx: f64, qy: f64, omega: f64, crystal: &CrystalParams, sigma_p: f64, z: f64) -> f64 {
    let delta = crystal.mismatch(qx, qy, omega);
    let (_, s, _) = ch_sh(sigma_p, delta, z);
    (sigma_p * s).powi(2)
}

/// U₁(q,Ω)V₂(−q,−Ω), the amplitude of the twin-photon correlation.
pub fn twin_amplitude(qx: f64, qy: f64, omega: f64, crystal: &CrystalParams, sigma_p: f64, z: f64) -> Complex64 {
    let delta = crystal.mismatch(qx, qy, omega);
    let (c, s, _) = ch_sh(sigma_p, delta, z);
    Complex64::from_polar(1.0, -crystal.delta_0 * z) * Complex64::new(c, 0.5 * delta * s) * (sigma_p * s)
}
