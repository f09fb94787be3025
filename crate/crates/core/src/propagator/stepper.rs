use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{CrystalParams, GridSpec, PhaseMatching, PumpParams, PumpProfile, Shape};
use crate::propagator::fft::Spectral;
use crate::propagator::pump::pump_envelope;
use crate::propagator::state::{Domain, FieldState};

/// Splitting variant of the symmetric split-step integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepScheme {
    /// Δ₀/2 folded into each linear multiplier; no explicit phase in the coupling.
    #[default]
    RotatingComoving,
    /// Coupling carries e^{−iΔ₀z} evaluated at the step midpoint.
    MidpointPhase,
}

/// Default cap on precomputed nonlinear-step lattices, in bytes.
pub const DEFAULT_TABLE_BYTES: usize = 1 << 30;

#[derive(Debug, Clone)]
enum Coupling {
    /// (cosh g, sinh g·e^{iφ}) per step, same for every cell.
    Uniform(Vec<(f64, Complex64)>),
    /// Per step, per cell.
    Table(Vec<Vec<(f64, Complex64)>>),
    /// Recomputed from the pump at every step.
    OnTheFly,
}

/// Integrates the envelopes from z = 0 to l_c with a fixed number of steps.
#[derive(Debug, Clone)]
pub struct Propagator {
    crystal: CrystalParams,
    pump: PumpParams,
    grid: GridSpec,
    shape: Shape,
    fft: Spectral,
    scheme: StepScheme,
    dz: f64,
    half_linear: Vec<Vec<Complex64>>,
    coupling: Coupling,
}

impl Propagator {
    pub fn new(crystal: &CrystalParams, pump: &PumpParams, grid: &GridSpec, scheme: StepScheme) -> Result<Self> {
        Self::with_table_limit(crystal, pump, grid, scheme, DEFAULT_TABLE_BYTES)
    }

    pub fn with_table_limit(
        crystal: &CrystalParams,
        pump: &PumpParams,
        grid: &GridSpec,
        scheme: StepScheme,
        table_bytes: usize,
    ) -> Result<Self> {
        crystal.validate()?;
        let bad = grid.validate_layout();
        if !bad.is_empty() {
            return Err(Error::Grid(bad.join("; ")));
        }
        let shape = grid.shape();
        let fft = Spectral::new(shape);
        let dz = grid.dz(crystal);
        let n_env = crystal.envelope_count();
        let idler = if crystal.phase_matching == PhaseMatching::TypeII { 2 } else { 1 };
        let half_linear = [1, idler][..n_env]
            .iter()
            .map(|&j| {
                (0..shape.len())
                    .map(|i| {
                        let (qx, qy, w) = shape.fourier_coords(i);
                        let mut d = crystal.detuning(j, qx, qy, w) - crystal.kp[0] * w - crystal.rho_0 * qy;
                        if scheme == StepScheme::RotatingComoving {
                            d += 0.5 * crystal.delta_0;
                        }
                        Complex64::from_polar(1.0, 0.5 * d * dz)
                    })
                    .collect()
            })
            .collect();
        let mut p = Propagator {
            crystal: crystal.clone(),
            pump: *pump,
            grid: grid.clone(),
            shape,
            fft,
            scheme,
            dz,
            half_linear,
            coupling: Coupling::OnTheFly,
        };
        p.coupling = if pump.profile == PumpProfile::PlaneWave {
            Coupling::Uniform((0..grid.n_z).map(|s| p.cell_coupling(Complex64::new(pump.a_p, 0.0), s)).collect())
        } else if grid.n_z * shape.len() * 24 <= table_bytes {
            Coupling::Table((0..grid.n_z).map(|s| p.step_lattice(s)).collect())
        } else {
            Coupling::OnTheFly
        };
        Ok(p)
    }

    pub fn crystal(&self) -> &CrystalParams {
        &self.crystal
    }

    pub fn pump(&self) -> &PumpParams {
        &self.pump
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn spectral(&self) -> &Spectral {
        &self.fft
    }

    pub fn scheme(&self) -> StepScheme {
        self.scheme
    }

    fn z_mid(&self, step: usize) -> f64 {
        (step as f64 + 0.5) * self.dz
    }

    fn cell_coupling(&self, a0: Complex64, step: usize) -> (f64, Complex64) {
        let g = self.crystal.sigma * a0.norm() * self.dz;
        let mut phi = a0.arg();
        if self.scheme == StepScheme::MidpointPhase {
            phi -= self.crystal.delta_0 * self.z_mid(step);
        }
        (g.cosh(), Complex64::from_polar(g.sinh(), phi))
    }

    fn step_lattice(&self, step: usize) -> Vec<(f64, Complex64)> {
        let a0 = pump_envelope(self.z_mid(step), &self.shape, &self.fft, &self.crystal, &self.pump, true);
        a0.into_iter().map(|a| self.cell_coupling(a, step)).collect()
    }

    fn nonlinear(&self, state: &mut FieldState, step: usize) {
        let owned;
        let uniform;
        let table: &[(f64, Complex64)] = match &self.coupling {
            Coupling::Uniform(v) => {
                uniform = [v[step]];
                &uniform
            }
            Coupling::Table(t) => &t[step],
            Coupling::OnTheFly => {
                owned = self.step_lattice(step);
                &owned
            }
        };
        let at = |i: usize| if table.len() == 1 { table[0] } else { table[i] };
        match state.envelopes.as_mut_slice() {
            [a] => {
                for (i, v) in a.iter_mut().enumerate() {
                    let (c, s) = at(i);
                    *v = c * *v + s * v.conj();
                }
            }
            [a1, a2] => {
                for (i, (u, w)) in a1.iter_mut().zip(a2.iter_mut()).enumerate() {
                    let (c, s) = at(i);
                    let (u0, w0) = (*u, *w);
                    *u = c * u0 + s * w0.conj();
                    *w = c * w0 + s * u0.conj();
                }
            }
            _ => unreachable!("envelope count checked on entry"),
        }
    }

    fn linear_half(&self, state: &mut FieldState) {
        for (e, m) in state.envelopes.iter_mut().zip(&self.half_linear) {
            for (a, k) in e.iter_mut().zip(m) {
                *a *= k;
            }
        }
    }

    /// Propagates a real-space entrance field to the exit face. Output is real space,
    /// in the pump-comoving frame.
    pub fn propagate(&self, mut state: FieldState) -> Result<FieldState> {
        if state.envelopes.len() != self.crystal.envelope_count() {
            return Err(Error::Grid(format!(
                "field carries {} envelopes, crystal needs {}",
                state.envelopes.len(),
                self.crystal.envelope_count()
            )));
        }
        if state.envelopes.iter().any(|e| e.len() != self.shape.len()) {
            return Err(Error::Grid("field lattice does not match the grid".into()));
        }
        state.to_fourier(&self.fft);
        for step in 0..self.grid.n_z {
            self.linear_half(&mut state);
            state.to_real(&self.fft);
            self.nonlinear(&mut state, step);
            state.to_fourier(&self.fft);
            self.linear_half(&mut state);
            if !state.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite field after step {} of {} (z = {:.4e} m); gain too high for the grid",
                    step + 1,
                    self.grid.n_z,
                    (step + 1) as f64 * self.dz
                )));
            }
        }
        state.to_real(&self.fft);
        state.domain = Domain::RealSpace;
        state.plane_z = self.crystal.l_c;
        Ok(state)
    }
}
