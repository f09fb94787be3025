use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::model::Shape;

struct AxisPlan {
    to_fourier: Arc<dyn Fft<f64>>,
    to_real: Arc<dyn Fft<f64>>,
    scale: f64,
}

/// Unitary lattice transforms. Spatial axes use e^{−iqx}, the time axis e^{+iΩt},
/// so a(x,t) = Σ a(q,Ω) e^{i(qx − Ωt)} / √N.
#[derive(Clone)]
pub struct Spectral {
    shape: Shape,
    plans: Arc<[Option<AxisPlan>; 3]>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("shape", &self.shape).finish()
    }
}

impl Spectral {
    pub fn new(shape: Shape) -> Self {
        Self::build(shape, true)
    }

    /// Transforms the transverse axes only; time samples are left in place.
    pub fn spatial(shape: Shape) -> Self {
        Self::build(shape, false)
    }

    fn build(shape: Shape, with_time: bool) -> Self {
        let mut planner = FftPlanner::new();
        let mut plan = |n: usize, present: bool, time: bool| {
            if !present || n < 2 {
                return None;
            }
            let (fwd, inv) = if time {
                (FftDirection::Inverse, FftDirection::Forward)
            } else {
                (FftDirection::Forward, FftDirection::Inverse)
            };
            Some(AxisPlan {
                to_fourier: planner.plan_fft(n, fwd),
                to_real: planner.plan_fft(n, inv),
                scale: 1.0 / (n as f64).sqrt(),
            })
        };
        let plans = [
            plan(shape.t.n, shape.t.present && with_time, true),
            plan(shape.y.n, shape.y.present, false),
            plan(shape.x.n, shape.x.present, false),
        ];
        Spectral { shape, plans: Arc::new(plans) }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn to_fourier(&self, data: &mut [Complex64]) {
        self.apply(data, true);
    }

    pub fn to_real(&self, data: &mut [Complex64]) {
        self.apply(data, false);
    }

    fn apply(&self, data: &mut [Complex64], forward: bool) {
        assert_eq!(data.len(), self.shape.len(), "lattice length does not match grid");
        let (nt, ny, nx) = (self.shape.t.n, self.shape.y.n, self.shape.x.n);
        let mut total_scale = 1.0;
        // x: contiguous rows
        if let Some(p) = &self.plans[2] {
            let f = if forward { &p.to_fourier } else { &p.to_real };
            f.process(data);
            total_scale *= p.scale;
        }
        let mut line = Vec::new();
        if let Some(p) = &self.plans[1] {
            let f = if forward { &p.to_fourier } else { &p.to_real };
            if nx == 1 {
                f.process(data);
            } else {
                line.resize(ny, Complex64::default());
                for it in 0..nt {
                    for ix in 0..nx {
                        let base = it * ny * nx + ix;
                        for (iy, v) in line.iter_mut().enumerate() {
                            *v = data[base + iy * nx];
                        }
                        f.process(&mut line);
                        for (iy, v) in line.iter().enumerate() {
                            data[base + iy * nx] = *v;
                        }
                    }
                }
            }
            total_scale *= p.scale;
        }
        if let Some(p) = &self.plans[0] {
            let f = if forward { &p.to_fourier } else { &p.to_real };
            let stride = ny * nx;
            // transpose so time lines are contiguous
            let mut tr = vec![Complex64::default(); data.len()];
            transpose(data, &mut tr, nt, stride);
            f.process(&mut tr);
            transpose(&tr, data, stride, nt);
            total_scale *= p.scale;
        }
        if total_scale != 1.0 {
            for v in data.iter_mut() {
                *v *= total_scale;
            }
        }
    }
}

/// out[c·rows + r] = src[r·cols + c], blocked for cache locality.
fn transpose(src: &[Complex64], out: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    out[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}
