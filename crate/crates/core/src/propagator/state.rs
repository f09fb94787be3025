use num_complex::Complex64;

use crate::model::{GridSpec, Shape};
use crate::propagator::fft::Spectral;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    RealSpace,
    FourierSpace,
}

/// Signal/idler envelopes on a lattice at one longitudinal plane.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: GridSpec,
    pub plane_z: f64,
    pub domain: Domain,
    /// One lattice per down-converted envelope (signal first).
    pub envelopes: Vec<Vec<Complex64>>,
}

impl FieldState {
    pub fn zeros(grid: &GridSpec, n_env: usize) -> Self {
        let n = grid.shape().len();
        FieldState {
            grid: grid.clone(),
            plane_z: 0.0,
            domain: Domain::RealSpace,
            envelopes: vec![vec![Complex64::default(); n]; n_env],
        }
    }

    pub fn shape(&self) -> Shape {
        self.grid.shape()
    }

    pub fn to_fourier(&mut self, fft: &Spectral) {
        if self.domain == Domain::RealSpace {
            for e in &mut self.envelopes {
                fft.to_fourier(e);
            }
            self.domain = Domain::FourierSpace;
        }
    }

    pub fn to_real(&mut self, fft: &Spectral) {
        if self.domain == Domain::FourierSpace {
            for e in &mut self.envelopes {
                fft.to_real(e);
            }
            self.domain = Domain::RealSpace;
        }
    }

    /// Σ|a|²ΔV of one envelope; identical in either domain.
    pub fn photon_sum(&self, env: usize) -> f64 {
        self.envelopes[env].iter().map(|a| a.norm_sqr()).sum::<f64>() * self.shape().cell_volume()
    }

    /// Σ(|a₁|² − |a₂|²)ΔV, conserved by parametric coupling.
    pub fn photon_difference(&self) -> f64 {
        if self.envelopes.len() < 2 {
            return 0.0;
        }
        let d: f64 = self.envelopes[0].iter().zip(&self.envelopes[1]).map(|(a, b)| a.norm_sqr() - b.norm_sqr()).sum();
        d * self.shape().cell_volume()
    }

    pub fn is_finite(&self) -> bool {
        self.envelopes.iter().flatten().all(|a| a.re.is_finite() && a.im.is_finite())
    }
}
