use num_complex::Complex64;

use crate::model::{CrystalParams, PumpParams, PumpProfile, Shape};
use crate::propagator::fft::Spectral;

/// Pump spectral detuning relative to the comoving frame, δ₀′ = ½k₀″Ω² − q²/2k₀.
pub fn pump_detuning_comoving(crystal: &CrystalParams, qx: f64, qy: f64, omega: f64) -> f64 {
    0.5 * crystal.kpp[0] * omega * omega - (qx * qx + qy * qy) / (2.0 * crystal.k(0))
}

/// Real-space pump lattice at the entrance face, peak A_p at the lattice centre.
pub fn pump_entrance(shape: &Shape, pump: &PumpParams) -> Vec<Complex64> {
    (0..shape.len())
        .map(|i| {
            let (x, y, t) = shape.real_coords(i);
            Complex64::new(crate::pwpa::local_amplitude(pump, x, y, t), 0.0)
        })
        .collect()
}

/// A₀ at depth z. `comoving` drops the group-delay and walk-off terms k₀′Ω + ρ₀q_y,
/// leaving the pulse centred on the lattice.
pub fn pump_envelope(
    z: f64,
    shape: &Shape,
    fft: &Spectral,
    crystal: &CrystalParams,
    pump: &PumpParams,
    comoving: bool,
) -> Vec<Complex64> {
    let mut a = pump_entrance(shape, pump);
    if pump.profile == PumpProfile::PlaneWave || z == 0.0 {
        return a;
    }
    fft.to_fourier(&mut a);
    for (i, v) in a.iter_mut().enumerate() {
        let (qx, qy, w) = shape.fourier_coords(i);
        let mut d = pump_detuning_comoving(crystal, qx, qy, w);
        if !comoving {
            d += crystal.kp[0] * w + crystal.rho_0 * qy;
        }
        *v *= Complex64::from_polar(1.0, d * z);
    }
    fft.to_real(&mut a);
    a
}
