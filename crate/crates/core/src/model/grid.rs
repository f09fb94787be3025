use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::crystal::CrystalParams;
use crate::model::pump::{PumpParams, PumpProfile};
use crate::model::scales::DerivedScales;

/// Lattice dimensionality.
///
/// In `Xt` the single transverse axis is the walk-off (y) axis, so `n_x`/`l_x`
/// describe sampling along y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridDims {
    Xt,
    Xy,
    Xyt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dims: GridDims,
    pub n_x: usize,
    #[serde(default = "one")]
    pub n_y: usize,
    #[serde(default = "one")]
    pub n_t: usize,
    pub l_x: f64,
    #[serde(default)]
    pub l_y: f64,
    #[serde(default)]
    pub t_win: f64,
    pub n_z: usize,
}

fn one() -> usize {
    1
}

/// One sampled axis. Absent axes have `n = 1` and do not contribute to cell volumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub n: usize,
    pub step: f64,
    pub present: bool,
}

impl Axis {
    fn absent() -> Self {
        Axis { n: 1, step: 1.0, present: false }
    }

    fn new(n: usize, len: f64) -> Self {
        Axis { n, step: len / n as f64, present: true }
    }

    pub fn len(&self) -> f64 {
        self.step * self.n as f64
    }

    /// Signed FFT index of sample i.
    pub fn signed(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < (n + 1) / 2 {
            i
        } else {
            i - n
        }
    }

    /// Real-space coordinate, centred so that index n/2 sits at zero.
    pub fn coord(&self, i: usize) -> f64 {
        if !self.present {
            return 0.0;
        }
        (i as f64 - (self.n / 2) as f64) * self.step
    }

    /// Angular wavenumber/frequency of Fourier index i.
    pub fn freq(&self, i: usize) -> f64 {
        if !self.present {
            return 0.0;
        }
        2.0 * PI * self.signed(i) as f64 / self.len()
    }

    /// Fourier index holding −freq(i).
    pub fn mirror(&self, i: usize) -> usize {
        (self.n - i) % self.n
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.step
    }
}

/// Storage layout of a lattice: index = (it·n_y + iy)·n_x + ix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    pub t: Axis,
    pub y: Axis,
    pub x: Axis,
}

impl Shape {
    pub fn len(&self) -> usize {
        self.t.n * self.y.n * self.x.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, it: usize, iy: usize, ix: usize) -> usize {
        (it * self.y.n + iy) * self.x.n + ix
    }

    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let ix = idx % self.x.n;
        let r = idx / self.x.n;
        (r / self.y.n, r % self.y.n, ix)
    }

    /// Index of the Fourier cell at (−q, −Ω).
    pub fn mirror_index(&self, idx: usize) -> usize {
        let (it, iy, ix) = self.unravel(idx);
        self.index(self.t.mirror(it), self.y.mirror(iy), self.x.mirror(ix))
    }

    /// Real-space cell volume ΔV (product of the present steps).
    pub fn cell_volume(&self) -> f64 {
        [self.t, self.y, self.x].iter().filter(|a| a.present).map(|a| a.step).product()
    }

    /// Fourier coordinates (q_x, q_y, Ω) of a storage index.
    pub fn fourier_coords(&self, idx: usize) -> (f64, f64, f64) {
        let (it, iy, ix) = self.unravel(idx);
        (self.x.freq(ix), self.y.freq(iy), self.t.freq(it))
    }

    /// Real-space coordinates (x, y, t) of a storage index.
    pub fn real_coords(&self, idx: usize) -> (f64, f64, f64) {
        let (it, iy, ix) = self.unravel(idx);
        (self.x.coord(ix), self.y.coord(iy), self.t.coord(it))
    }
}

impl GridSpec {
    pub fn dz(&self, crystal: &CrystalParams) -> f64 {
        crystal.l_c / self.n_z as f64
    }

    pub fn shape(&self) -> Shape {
        match self.dims {
            GridDims::Xt => Shape {
                t: Axis::new(self.n_t, self.t_win),
                y: Axis::new(self.n_x, self.l_x),
                x: Axis::absent(),
            },
            GridDims::Xy => Shape {
                t: Axis::absent(),
                y: Axis::new(self.n_y, self.l_y),
                x: Axis::new(self.n_x, self.l_x),
            },
            GridDims::Xyt => Shape {
                t: Axis::new(self.n_t, self.t_win),
                y: Axis::new(self.n_y, self.l_y),
                x: Axis::new(self.n_x, self.l_x),
            },
        }
    }

    pub fn has_time(&self) -> bool {
        self.dims != GridDims::Xy
    }

    /// Checks sampling counts only (no physics).
    pub fn validate_layout(&self) -> Vec<String> {
        let mut v = Vec::new();
        let shape = self.shape();
        for (name, ax) in [("n_t", shape.t), ("transverse y", shape.y), ("n_x", shape.x)] {
            if ax.present && (ax.n < 2 || !ax.n.is_power_of_two()) {
                v.push(format!("{name} = {} must be a power of two ≥ 2", ax.n));
            }
            if ax.present && !(ax.step > 0.0 && ax.step.is_finite()) {
                v.push(format!("window length for {name} must be positive"));
            }
        }
        if self.n_z == 0 {
            v.push("n_z must be ≥ 1".into());
        }
        v
    }

    /// Largest |Δ(q, Ω)| over the lattice modes.
    pub fn max_mismatch(&self, crystal: &CrystalParams) -> f64 {
        let shape = self.shape();
        (0..shape.len())
            .map(|i| {
                let (qx, qy, w) = shape.fourier_coords(i);
                crystal.mismatch(qx, qy, w).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Every violated sampling/coverage constraint, named.
    pub fn violations(&self, crystal: &CrystalParams, pump: &PumpParams, scales: &DerivedScales) -> Vec<String> {
        let mut v = self.validate_layout();
        if !v.is_empty() {
            return v;
        }
        let shape = self.shape();
        let phase = self.max_mismatch(crystal) * self.dz(crystal);
        if phase >= 2.0 * PI {
            v.push(format!(
                "step size: max|Δ|·dz = {phase:.3} rad must stay below 2π (spurious quasi-phase-matched gain); raise n_z"
            ));
        }
        let need_plain = scales.q_r + 4.0 * scales.q_0;
        let need_walk = scales.q_r + scales.q_c.abs() + 4.0 * scales.q_0;
        if shape.y.nyquist() <= need_walk {
            v.push(format!(
                "Nyquist: π/Δy = {:.4e} 1/m must exceed q_R + |q_C| + 4q₀ = {:.4e} 1/m",
                shape.y.nyquist(),
                need_walk
            ));
        }
        if shape.x.present && shape.x.nyquist() <= need_plain {
            v.push(format!(
                "Nyquist: π/Δx = {:.4e} 1/m must exceed q_R + 4q₀ = {:.4e} 1/m",
                shape.x.nyquist(),
                need_plain
            ));
        }
        if shape.t.present && scales.omega_0.is_finite() && shape.t.nyquist() <= 4.0 * scales.omega_0 {
            v.push(format!(
                "Nyquist: π/Δt = {:.4e} rad/s must exceed 4Ω₀ = {:.4e} rad/s",
                shape.t.nyquist(),
                4.0 * scales.omega_0
            ));
        }
        if pump.profile == PumpProfile::Gaussian {
            for (name, ax) in [("y", shape.y), ("x", shape.x)] {
                if ax.present && pump.w0.is_finite() && ax.len() < 6.0 * pump.w0 {
                    v.push(format!("window: L_{name} = {:.4e} m must be ≥ 6w₀ = {:.4e} m", ax.len(), 6.0 * pump.w0));
                }
            }
            if shape.t.present && pump.tau0.is_finite() && shape.t.len() < 6.0 * pump.tau0 {
                v.push(format!(
                    "window: T_win = {:.4e} s must be ≥ 6τ₀ = {:.4e} s",
                    shape.t.len(),
                    6.0 * pump.tau0
                ));
            }
        }
        v
    }

    pub fn validate(&self, crystal: &CrystalParams, pump: &PumpParams, scales: &DerivedScales) -> Result<()> {
        let v = self.violations(crystal, pump, scales);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Grid(v.join("; ")))
        }
    }
}
