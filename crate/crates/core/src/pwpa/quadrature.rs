use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CrystalParams, DerivedScales};
use crate::pwpa::gain::{ch_sh, twin_amplitude};
use crate::pwpa::shifts::imaging_phase;

/// Number of transverse dimensions integrated over.
/// With `One`, the single transverse axis is the walk-off (y) axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransverseDims {
    One,
    Two,
}

impl TransverseDims {
    pub fn count(self) -> i32 {
        match self {
            TransverseDims::One => 1,
            TransverseDims::Two => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub max_refinements: usize,
    /// Initial transverse step; default q₀/8.
    pub q_step: Option<f64>,
    /// Initial frequency step; default Ω₀/8.
    pub omega_step: Option<f64>,
    /// Half-width of the transverse domain around the ring centre; default q_R + 8q₀.
    pub q_halfwidth: Option<f64>,
    /// Frequency integration window; default the filter band, else 6Ω₀.
    pub omega_max: Option<f64>,
    /// Hard spectral filter (half-width, rad/s); `None` disables it.
    pub filter_half_width: Option<f64>,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            rel_tol: 1e-4,
            max_refinements: 5,
            q_step: None,
            omega_step: None,
            q_halfwidth: None,
            omega_max: None,
            filter_half_width: None,
        }
    }
}

/// Temporal bandwidth used for discretization (Ω₀, or Ω₀″ when Ω₀ is infinite).
pub fn omega_scale(scales: &DerivedScales) -> f64 {
    if scales.omega_0.is_finite() {
        scales.omega_0
    } else {
        scales.omega_0_dprime
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Value at each refinement level.
    pub trace: Vec<f64>,
}

/// Uniform trapezoid nodes on [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nodes {
    pub lo: f64,
    pub step: f64,
    pub n: usize,
}

impl Nodes {
    pub fn centered(center: f64, half: f64, step: f64) -> Self {
        let m = (half / step).ceil().max(1.0) as usize;
        Nodes { lo: center - m as f64 * step, step, n: 2 * m + 1 }
    }

    pub fn at(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }

    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            0.5 * self.step
        } else {
            self.step
        }
    }
}

/// Transverse and frequency nodes at one refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub dims: TransverseDims,
    pub qy: Nodes,
    /// Unused (single node, unit weight) in one dimension.
    pub qx: Nodes,
    pub omega: Nodes,
}

impl Domain {
    pub fn new(scales: &DerivedScales, dims: TransverseDims, s: &QuadSettings, level: usize) -> Self {
        let f = 0.5f64.powi(level as i32);
        let q_step = s.q_step.unwrap_or(scales.q_0 / 8.0) * f;
        let w_step = s.omega_step.unwrap_or(omega_scale(scales) / 8.0) * f;
        let half = s.q_halfwidth.unwrap_or(scales.q_r + 8.0 * scales.q_0);
        // a filter sets the band; otherwise a window of 6Ω₀
        let w = match (s.omega_max, s.filter_half_width) {
            (Some(m), Some(f)) => m.min(f),
            (Some(m), None) => m,
            (None, Some(f)) => f,
            (None, None) => 6.0 * omega_scale(scales),
        };
        let qy = Nodes::centered(-scales.q_c, half, q_step);
        let qx = match dims {
            TransverseDims::One => Nodes { lo: 0.0, step: 1.0, n: 1 },
            TransverseDims::Two => Nodes::centered(0.0, half, q_step),
        };
        Domain { dims, qy, qx, omega: Nodes::centered(0.0, w, w_step) }
    }

    fn qx_weight(&self, i: usize) -> f64 {
        match self.dims {
            TransverseDims::One => 1.0,
            TransverseDims::Two => self.qx.weight(i),
        }
    }

    fn qx_at(&self, i: usize) -> f64 {
        match self.dims {
            TransverseDims::One => 0.0,
            TransverseDims::Two => self.qx.at(i),
        }
    }
}

fn refine<F: FnMut(usize) -> f64>(s: &QuadSettings, mut eval: F) -> Result<QuadResult> {
    let mut trace = vec![eval(0)];
    for level in 1..=s.max_refinements {
        let v = eval(level);
        let prev = *trace.last().unwrap();
        trace.push(v);
        let scale = v.abs().max(prev.abs());
        if scale == 0.0 || (v - prev).abs() <= s.rel_tol * scale {
            return Ok(QuadResult { value: v, trace });
        }
    }
    Err(Error::Quadrature(format!("refinement trace {trace:?}")))
}

fn v_sq(crystal: &CrystalParams, sigma_p: f64, qx: f64, qy: f64, omega: f64) -> f64 {
    let (_, s, _) = ch_sh(sigma_p, crystal.mismatch(qx, qy, omega), crystal.l_c);
    (sigma_p * s).powi(2)
}

/// Near-field photon flux density ∫dΩ/2π ∫d^Dq/(2π)^D |V₁|² at the crystal exit.
pub fn mean_intensity_near(
    crystal: &CrystalParams,
    scales: &DerivedScales,
    sigma_p: f64,
    dims: TransverseDims,
    s: &QuadSettings,
) -> Result<QuadResult> {
    let norm = (2.0 * PI).powi(1 + dims.count());
    refine(s, |level| {
        let dom = Domain::new(scales, dims, s, level);
        let mut acc = 0.0;
        for iw in 0..dom.omega.n {
            let w = dom.omega.at(iw);
            let ww = dom.omega.weight(iw);
            for ix in 0..dom.qx.n {
                let wx = dom.qx_weight(ix) * ww;
                let qx = dom.qx_at(ix);
                for iy in 0..dom.qy.n {
                    acc += wx * dom.qy.weight(iy) * v_sq(crystal, sigma_p, qx, dom.qy.at(iy), w);
                }
            }
        }
        acc / norm
    })
}

/// ∫dΩ/2π |V₁(q, Ω)|² at fixed transverse wave vector.
pub fn far_spectrum(q: [f64; 2], crystal: &CrystalParams, scales: &DerivedScales, sigma_p: f64, s: &QuadSettings) -> Result<QuadResult> {
    refine(s, |level| {
        let dom = Domain::new(scales, TransverseDims::One, s, level);
        let mut acc = 0.0;
        for iw in 0..dom.omega.n {
            acc += dom.omega.weight(iw) * v_sq(crystal, sigma_p, q[0], q[1], dom.omega.at(iw));
        }
        acc / (2.0 * PI)
    })
}

/// Far-field photon flux density at position x of the lens focal plane.
pub fn mean_intensity_far(
    x: [f64; 2],
    crystal: &CrystalParams,
    scales: &DerivedScales,
    sigma_p: f64,
    f: f64,
    s: &QuadSettings,
) -> Result<QuadResult> {
    if !(f > 0.0) {
        return Err(Error::Param("focal length must be positive".into()));
    }
    let k = 2.0 * PI / (crystal.lambda[1] * f);
    let mut r = far_spectrum([k * x[0], k * x[1]], crystal, scales, sigma_p, s)?;
    r.value /= scales.s_diff;
    for v in &mut r.trace {
        *v /= scales.s_diff;
    }
    Ok(r)
}

/// Pixel kernel used for the near-field integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HKernel {
    /// (d/2π)² sinc²[(q−q′)d/2] per transverse dimension.
    Exact,
    /// Large-pixel limit (d/2π) δ(q−q′) per transverse dimension.
    DeltaLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PixelGeometry {
    /// Square pixels of side d; idler arm back-propagated by Δz, Δy = x̄₁ − x̄₂.
    Near { d: f64, dz: f64, dy: f64, kernel: HKernel },
    /// Symmetric far-field pixels Q₁ (centre, side in q) and Q₂ = −Q₁.
    /// `pump_extent` is the pump area (2D) or length (1D) regularizing δ(0).
    Far { q_center: [f64; 2], q_width: f64, pump_extent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelCorrelationResult {
    pub self_var: f64,
    pub cross_cov: f64,
    pub shot: f64,
    pub ratio: f64,
}

impl PixelCorrelationResult {
    pub fn assemble(self_var: f64, cross_cov: f64, shot: f64) -> Self {
        let ratio = ((shot + 2.0 * self_var - 2.0 * cross_cov) / shot).max(0.0);
        PixelCorrelationResult { self_var, cross_cov, shot, ratio }
    }
}

/// Circulant embedding of the symmetric Toeplitz matrix H(q_k − q_k′) on n nodes.
pub struct Toeplitz {
    n: usize,
    m: usize,
    kernel_hat: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Toeplitz {
    pub fn new<K: Fn(f64) -> f64>(n: usize, step: f64, kernel: K) -> Self {
        let m = (2 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let mut kernel_hat = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..n {
            let v = kernel(j as f64 * step);
            kernel_hat[j] = Complex64::new(v, 0.0);
            if j > 0 {
                kernel_hat[m - j] = Complex64::new(v, 0.0);
            }
        }
        fwd.process(&mut kernel_hat);
        Toeplitz { n, m, kernel_hat, fwd, inv }
    }

    /// out_k = Σ_k′ H(k − k′) data_k′.
    pub fn apply(&self, data: &mut [Complex64], buf: &mut Vec<Complex64>) {
        buf.clear();
        buf.extend_from_slice(data);
        buf.resize(self.m, Complex64::new(0.0, 0.0));
        self.fwd.process(buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inv.process(buf);
        let norm = 1.0 / self.m as f64;
        for (d, b) in data.iter_mut().zip(buf.iter()).take(self.n) {
            *d = b * norm;
        }
    }
}

/// (d/2π)² sinc²(u d/2).
pub fn pixel_kernel_1d(d: f64, u: f64) -> f64 {
    let x = 0.5 * u * d;
    let s = if x.abs() < 1e-8 { 1.0 - x * x / 3.0 } else { x.sin() / x };
    (d / (2.0 * PI)).powi(2) * s * s
}

/// Per-frequency integrands (self, cross, shot) of the pixel-correlation integrals,
/// already integrated over the transverse nodes of `dom` (per unit detection time, per dΩ).
pub fn pixel_terms_at_omega(
    geom: &PixelGeometry,
    crystal: &CrystalParams,
    sigma_p: f64,
    dom: &Domain,
    omega: f64,
) -> (f64, f64, f64) {
    let dcount = dom.dims.count();
    let l = crystal.l_c;
    let (nx, ny) = (dom.qx.n, dom.qy.n);
    match *geom {
        PixelGeometry::Far { q_center, q_width, pump_extent } => {
            let inside = |qx: f64, qy: f64| {
                let tol = 0.5 * q_width * (1.0 + 1e-9);
                let dy = (qy - q_center[1]).abs() <= tol;
                let dx = dom.dims == TransverseDims::One || (qx - q_center[0]).abs() <= tol;
                dx && dy
            };
            let (mut shot, mut selfv, mut cross) = (0.0, 0.0, 0.0);
            for ix in 0..nx {
                let qx = dom.qx_at(ix);
                for iy in 0..ny {
                    let qy = dom.qy.at(iy);
                    if !inside(qx, qy) {
                        continue;
                    }
                    let w = dom.qx_weight(ix) * dom.qy.weight(iy);
                    let v2 = v_sq(crystal, sigma_p, qx, qy, omega);
                    shot += 2.0 * w * v2;
                    selfv += w * v2 * v2;
                    cross += w * v2 * (1.0 + v2);
                }
            }
            let norm = pump_extent / (2.0 * PI).powi(dcount);
            (selfv * norm, cross * norm, shot * norm)
        }
        PixelGeometry::Near { d, dz, dy, kernel } => {
            let mut p = Vec::with_capacity(nx * ny);
            let mut g = Vec::with_capacity(nx * ny);
            let mut shot = 0.0;
            for iy in 0..ny {
                let qy = dom.qy.at(iy);
                for ix in 0..nx {
                    let qx = dom.qx_at(ix);
                    let w = dom.qx_weight(ix) * dom.qy.weight(iy);
                    let v2 = v_sq(crystal, sigma_p, qx, qy, omega);
                    shot += 2.0 * w * v2;
                    let phase = imaging_phase(crystal, qx * qx + qy * qy, qy, dz, dy);
                    let amp = twin_amplitude(qx, qy, omega, crystal, sigma_p, l) * Complex64::from_polar(1.0, phase);
                    p.push(Complex64::new(w * v2, 0.0));
                    g.push(amp * w);
                }
            }
            shot *= d.powi(dcount) / (2.0 * PI).powi(dcount);
            match kernel {
                HKernel::DeltaLimit => {
                    let c = (d / (2.0 * PI)).powi(dcount);
                    let mut selfv = 0.0;
                    let mut cross = 0.0;
                    for iy in 0..ny {
                        for ix in 0..nx {
                            let k = iy * nx + ix;
                            let w = dom.qx_weight(ix) * dom.qy.weight(iy);
                            selfv += p[k].re * p[k].re / w;
                            cross += g[k].norm_sqr() / w;
                        }
                    }
                    (c * selfv, c * cross, shot)
                }
                HKernel::Exact => {
                    let selfv = toeplitz_quadratic(&mut p.clone(), &p, nx, ny, dom, d);
                    let cross = toeplitz_quadratic(&mut g.clone(), &g, nx, ny, dom, d);
                    (selfv, cross, shot)
                }
            }
        }
    }
}

/// Σ_k Σ_k′ H(q_k − q_k′) a_k a*_k′ with separable pixel kernel, via circulant FFTs.
fn toeplitz_quadratic(work: &mut [Complex64], a: &[Complex64], nx: usize, ny: usize, dom: &Domain, d: f64) -> f64 {
    let mut buf = Vec::new();
    let ty = Toeplitz::new(ny, dom.qy.step, |u| pixel_kernel_1d(d, u));
    let mut col = vec![Complex64::new(0.0, 0.0); ny];
    for ix in 0..nx {
        for iy in 0..ny {
            col[iy] = work[iy * nx + ix];
        }
        ty.apply(&mut col, &mut buf);
        for iy in 0..ny {
            work[iy * nx + ix] = col[iy];
        }
    }
    if dom.dims == TransverseDims::Two {
        let tx = Toeplitz::new(nx, dom.qx.step, |u| pixel_kernel_1d(d, u));
        for row in work.chunks_mut(nx) {
            tx.apply(row, &mut buf);
        }
    }
    a.iter().zip(work.iter()).map(|(x, hx)| (x.conj() * hx).re).sum()
}

/// Pixel-integrated self/cross correlations and shot noise for detection time `t_d`.
pub fn pixel_correlations_pwpa(
    geom: &PixelGeometry,
    crystal: &CrystalParams,
    scales: &DerivedScales,
    sigma_p: f64,
    dims: TransverseDims,
    t_d: f64,
    s: &QuadSettings,
) -> Result<PixelCorrelationResult> {
    let mut s = s.clone();
    if let PixelGeometry::Near { d, .. } = geom {
        if !(*d > 0.0) {
            return Err(Error::Detector("pixel size must be positive".into()));
        }
        let base = s.q_step.unwrap_or(scales.q_0 / 8.0);
        s.q_step = Some(base.min(2.0 * PI / (8.0 * d)));
    }
    let terms = |level: usize| {
        let mut dom = Domain::new(scales, dims, &s, level);
        if let PixelGeometry::Far { q_center, q_width, .. } = *geom {
            // integrate over the pixel itself rather than counting domain nodes inside it
            let m = 8usize << level;
            let span = |c: f64| Nodes { lo: c - 0.5 * q_width, step: q_width / m as f64, n: m + 1 };
            dom.qy = span(q_center[1]);
            if dims == TransverseDims::Two {
                dom.qx = span(q_center[0]);
            }
        }
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for iw in 0..dom.omega.n {
            let w = dom.omega.weight(iw) / (2.0 * PI) * t_d;
            let (x, y, z) = pixel_terms_at_omega(geom, crystal, sigma_p, &dom, dom.omega.at(iw));
            a += w * x;
            b += w * y;
            c += w * z;
        }
        [a, b, c]
    };
    let mut trace = vec![terms(0)];
    let mut converged = false;
    for level in 1..=s.max_refinements {
        let cur = terms(level);
        let prev = *trace.last().unwrap();
        trace.push(cur);
        if cur.iter().zip(prev.iter()).all(|(a, b)| (a - b).abs() <= s.rel_tol * a.abs().max(b.abs()).max(1e-300)) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Quadrature(format!("pixel correlations, (self, cross, shot) trace {trace:?}")));
    }
    let [selfv, cross, shot] = *trace.last().unwrap();
    if !(shot > 0.0) {
        return Err(Error::Numerical("shot noise vanishes (no gain in the pixels)".into()));
    }
    Ok(PixelCorrelationResult::assemble(selfv, cross, shot))
}
