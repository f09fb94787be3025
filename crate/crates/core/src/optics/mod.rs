//! Free-space and lens optics between the crystal exit face and the detectors.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CrystalParams, GridDims, Shape};
use crate::propagator::{complex_normal, Domain, FieldState, Spectral};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OpticalPath {
    /// Single lens, detectors in the back focal plane.
    FarField { f: f64 },
    /// Unit-magnification imaging of the plane Δz inside the crystal, idler detector offset by Δy.
    NearField {
        f: f64,
        #[serde(default)]
        delta_z: f64,
        #[serde(default)]
        delta_y: f64,
    },
    FreeSpace { distance: f64 },
}

impl OpticalPath {
    pub fn validate(&self, crystal: &CrystalParams) -> Result<()> {
        match *self {
            OpticalPath::FarField { f } | OpticalPath::NearField { f, .. } if !(f > 0.0) => {
                Err(Error::Optics("focal length f must be positive".into()))
            }
            OpticalPath::NearField { delta_z, .. } if delta_z.abs() > crystal.l_c => {
                Err(Error::Optics(format!("|Δz| = {delta_z:e} m exceeds the crystal length")))
            }
            OpticalPath::FreeSpace { distance } if !distance.is_finite() => {
                Err(Error::Optics("free-space distance must be finite".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Per-envelope vacuum wavelengths (signal, then idler if present).
pub fn envelope_wavelengths(crystal: &CrystalParams) -> Vec<f64> {
    crystal.lambda[1..=crystal.envelope_count()].to_vec()
}

fn require_real(state: &FieldState) -> Result<()> {
    if state.domain != Domain::RealSpace {
        return Err(Error::Optics("optics expects a real-space field".into()));
    }
    Ok(())
}

fn transverse_q(shape: &Shape, idx: usize) -> (f64, f64) {
    let (qx, qy, _) = shape.fourier_coords(idx);
    (qx, qy)
}

/// Applies a transverse Fourier multiplier m(q_x, q_y) to one envelope.
fn spatial_filter(state: &mut FieldState, env: usize, m: impl Fn(f64, f64) -> Complex64) {
    let shape = state.shape();
    let fft = Spectral::spatial(shape);
    let e = &mut state.envelopes[env];
    fft.to_fourier(e);
    for (i, a) in e.iter_mut().enumerate() {
        let (qx, qy) = transverse_q(&shape, i);
        *a *= m(qx, qy);
    }
    fft.to_real(e);
}

/// Paraxial free-space propagation over `distance` (negative propagates backwards).
pub fn free_space(state: &mut FieldState, distance: f64, wavelengths: &[f64]) -> Result<()> {
    require_real(state)?;
    for (env, &lambda) in wavelengths.iter().enumerate().take(state.envelopes.len()) {
        spatial_filter(state, env, |qx, qy| {
            Complex64::from_polar(1.0, -lambda * (qx * qx + qy * qy) * distance / (4.0 * PI))
        });
    }
    Ok(())
}

/// Largest quadratic-phase step between neighbouring Fourier cells for a free-space
/// distance; above π the chirp aliases.
pub fn chirp_phase_step(shape: &Shape, lambda: f64, distance: f64) -> f64 {
    [shape.y, shape.x]
        .iter()
        .filter(|a| a.present)
        .map(|a| {
            let dq = 2.0 * PI / a.len();
            lambda * distance.abs() * a.nyquist() * dq / (2.0 * PI)
        })
        .fold(0.0, f64::max)
}

/// Near-field imaging: both arms back-propagated by Δz, idler translated by +Δy along
/// the walk-off axis. The envelopes stay in one state (signal, idler).
pub fn image_near_field(state: &FieldState, path: &OpticalPath, crystal: &CrystalParams) -> Result<FieldState> {
    require_real(state)?;
    let OpticalPath::NearField { delta_z, delta_y, .. } = *path else {
        return Err(Error::Optics("image_near_field needs a near-field path".into()));
    };
    path.validate(crystal)?;
    if state.envelopes.len() != 2 {
        return Err(Error::Optics("near-field imaging needs separate signal and idler envelopes".into()));
    }
    let shape = state.shape();
    let lambdas = envelope_wavelengths(crystal);
    for &l in &lambdas {
        let step = chirp_phase_step(&shape, l, delta_z);
        if step > PI {
            return Err(Error::Optics(format!(
                "Δz = {delta_z:e} m aliases the free-space chirp ({step:.3} rad per Fourier cell > π)"
            )));
        }
    }
    let mut out = state.clone();
    if delta_z != 0.0 {
        free_space(&mut out, -delta_z, &lambdas)?;
    }
    if delta_y != 0.0 {
        spatial_filter(&mut out, 1, |_, qy| Complex64::from_polar(1.0, -qy * delta_y));
    }
    Ok(out)
}

/// Far-field image of one envelope in the focal plane: the unitary transverse Fourier
/// transform, re-gridded so that Fourier index q sits at x = (λf/2π)q.
pub fn to_far_field_arm(state: &FieldState, env: usize, f: f64, lambda: f64) -> Result<FieldState> {
    require_real(state)?;
    if !(f > 0.0) {
        return Err(Error::Optics("focal length f must be positive".into()));
    }
    let shape = state.shape();
    let fft = Spectral::spatial(shape);
    let mut e = state.envelopes[env].clone();
    fft.to_fourier(&mut e);
    let mut grid = state.grid.clone();
    // new transverse step (λf/2π)(2π/L) = λf/L, window N·λf/L
    match grid.dims {
        GridDims::Xt => grid.l_x = shape.y.n as f64 * lambda * f / shape.y.len(),
        GridDims::Xy | GridDims::Xyt => {
            grid.l_x = shape.x.n as f64 * lambda * f / shape.x.len();
            grid.l_y = shape.y.n as f64 * lambda * f / shape.y.len();
        }
    }
    let out_shape = grid.shape();
    let ratio = (shape.cell_volume() / out_shape.cell_volume()).sqrt();
    let mut out = vec![Complex64::default(); e.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let (it, iy, ix) = out_shape.unravel(i);
        let src = shape.index(it, (iy + shape.y.n - shape.y.n / 2) % shape.y.n, (ix + shape.x.n - shape.x.n / 2) % shape.x.n);
        *o = e[src] * ratio;
    }
    Ok(FieldState { grid, plane_z: state.plane_z, domain: Domain::RealSpace, envelopes: vec![out] })
}

/// Far-field image of all envelopes. Requires a common wavelength so that both arms share one lattice.
pub fn to_far_field(state: &FieldState, path: &OpticalPath, crystal: &CrystalParams) -> Result<FieldState> {
    let OpticalPath::FarField { f } = *path else {
        return Err(Error::Optics("to_far_field needs a far-field path".into()));
    };
    let lambdas = envelope_wavelengths(crystal);
    if lambdas.iter().any(|l| (l - lambdas[0]).abs() > 1e-12 * lambdas[0]) {
        return Err(Error::Optics(
            "non-degenerate wavelengths map to different focal-plane lattices; use to_far_field_arm".into(),
        ));
    }
    let mut arms = (0..state.envelopes.len())
        .map(|env| to_far_field_arm(state, env, f, lambdas[env]))
        .collect::<Result<Vec<_>>>()?;
    let mut out = arms.remove(0);
    for a in arms {
        out.envelopes.extend(a.envelopes);
    }
    Ok(out)
}

/// Beam-splitter loss: a → √η a + √(1−η) v with fresh Wigner vacuum v in every cell.
pub fn attenuate<R: Rng + ?Sized>(state: &mut FieldState, eta: f64, rng: &mut R) -> Result<()> {
    require_real(state)?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Optics(format!("efficiency η = {eta} outside [0, 1]")));
    }
    let amp = (0.5 / state.shape().cell_volume()).sqrt() * (1.0 - eta).sqrt();
    let t = eta.sqrt();
    for e in &mut state.envelopes {
        for a in e.iter_mut() {
            *a = t * *a + amp * complex_normal(rng);
        }
    }
    Ok(())
}

/// Hard band-pass |Ω| ≤ `half_width` on the time axis. Rejected modes are replaced by
/// fresh vacuum, as for a lossy element.
pub fn spectral_filter<R: Rng + ?Sized>(state: &mut FieldState, half_width: f64, rng: &mut R) -> Result<()> {
    require_real(state)?;
    let shape = state.shape();
    if !shape.t.present {
        return Ok(());
    }
    let reject: Vec<usize> = (0..shape.t.n).filter(|&it| shape.t.freq(it).abs() > half_width).collect();
    if reject.is_empty() {
        return Ok(());
    }
    let fft = Spectral::new(shape);
    let amp = (0.5 / shape.cell_volume()).sqrt();
    let nxy = shape.y.n * shape.x.n;
    for e in &mut state.envelopes {
        fft.to_fourier(e);
        for &it in &reject {
            for v in &mut e[it * nxy..(it + 1) * nxy] {
                *v = amp * complex_normal(rng);
            }
        }
        fft.to_real(e);
    }
    Ok(())
}

/// Half-width (rad/s) of an interference filter of full width `fwhm` (m) at `lambda` (m).
pub fn filter_half_width(lambda: f64, fwhm: f64) -> f64 {
    PI * 299_792_458.0 * fwhm / (lambda * lambda)
}
