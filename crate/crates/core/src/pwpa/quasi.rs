use num_complex::Complex64;

use crate::model::{CrystalParams, PumpParams, PumpProfile};
use crate::pwpa::gain::{gain_uv, v1_sq};

/// Local pump amplitude A₀(x, y, t) at the crystal entrance.
pub fn local_amplitude(pump: &PumpParams, x: f64, y: f64, t: f64) -> f64 {
    match pump.profile {
        PumpProfile::PlaneWave => pump.a_p,
        PumpProfile::Gaussian => {
            pump.a_p * (-(x * x + y * y) / (pump.w0 * pump.w0) - t * t / (pump.tau0 * pump.tau0)).exp()
        }
    }
}

/// Locally plane-wave gains (U₁, V₁) at (q, Ω) with σ_p replaced by σA₀(x, t).
/// Returned in the laboratory frame, so they coincide with `gain_uv` at the pump centre.
#[allow(clippy::too_many_arguments)]
pub fn quasi_stationary_kernels(
    z: f64,
    q: [f64; 2],
    omega: f64,
    x: [f64; 2],
    t: f64,
    crystal: &CrystalParams,
    pump: &PumpParams,
) -> (Complex64, Complex64) {
    let sigma_loc = crystal.sigma * local_amplitude(pump, x[0], x[1], t);
    let g = gain_uv(q[0], q[1], omega, crystal, sigma_loc, z);
    (g.u1, g.v1)
}

/// Pump-averaged spectrum ∫d^Gu Σ_Ω |V₁(q, Ω; σ_p e^{−|u|²})|², up to a constant, for a pump
/// that is Gaussian along `gauss_dims` axes. The average depends on |u| only, so it reduces
/// to ∫ρ^{G/2−1} f(σ_p e^{−ρ}) dρ.
pub fn pump_averaged_spectrum(
    q: [f64; 2],
    omegas: &[f64],
    crystal: &CrystalParams,
    sigma_p: f64,
    gauss_dims: u32,
) -> f64 {
    let f = |sig: f64| -> f64 { omegas.iter().map(|&w| v1_sq(q[0], q[1], w, crystal, sig, crystal.l_c)).sum() };
    if gauss_dims == 0 {
        return f(sigma_p);
    }
    // ρ = s² removes the integrable ρ^{-1/2} endpoint for G = 1
    let (n, s_max) = (2000usize, 6.0f64);
    let h = s_max / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let s = i as f64 * h;
        let w = if i == 0 || i == n { 0.5 * h } else { h };
        acc += w * 2.0 * s.powi(gauss_dims as i32 - 1) * f(sigma_p * (-s * s).exp());
    }
    acc
}
