use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Axis, Shape};
use crate::propagator::{Domain, FieldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Plane {
    NearField,
    FarField,
}

/// Two square pixels (one per detector) and their time gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    pub plane: Plane,
    /// Pixel side d (m).
    pub d: f64,
    /// Centre of pixel 1 as (x, y); in one transverse dimension only y is used.
    #[serde(default)]
    pub center_1: [f64; 2],
    /// Centre of pixel 2. Ignored when `symmetric` is set.
    #[serde(default)]
    pub center_2: [f64; 2],
    /// Detection window T_d (s); `None` integrates the whole lattice window.
    #[serde(default)]
    pub t_d: Option<f64>,
    #[serde(default = "unit")]
    pub eta: f64,
    /// Far field: pixel 2 is the point reflection of pixel 1.
    #[serde(default)]
    pub symmetric: bool,
}

fn unit() -> f64 {
    1.0
}

impl DetectorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0) {
            return Err(Error::Detector("pixel size d must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Detector(format!("quantum efficiency η = {} outside [0, 1]", self.eta)));
        }
        if let Some(t) = self.t_d {
            if !(t > 0.0) {
                return Err(Error::Detector("detection window T_d must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Contiguous run of samples along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub len: usize,
}

impl Span {
    pub fn full(ax: &Axis) -> Self {
        Span { start: 0, len: ax.n }
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }

    /// Point reflection through the axis origin; coord(i) = (i − n/2)Δ, so −coord(i) sits at n − i.
    pub fn reflect(&self, ax: &Axis) -> Result<Self> {
        if self.start == 0 {
            return Err(Error::Detector("pixel touches the lattice edge and has no mirror image".into()));
        }
        let last = self.start + self.len - 1;
        Ok(Span { start: ax.n - last, len: self.len })
    }
}

/// Samples of width `width` centred on `center` along one axis.
pub fn axis_span(ax: &Axis, center: f64, width: f64, name: &str) -> Result<Span> {
    if !ax.present {
        return Ok(Span { start: 0, len: 1 });
    }
    let len = (width / ax.step).round() as i64;
    if len < 1 {
        return Err(Error::Detector(format!(
            "{name} width {width:e} is below the lattice cell {:.4e}",
            ax.step
        )));
    }
    let first = (center / ax.step + (ax.n / 2) as f64 - 0.5 * (len - 1) as f64).round() as i64;
    if first < 0 || first + len > ax.n as i64 {
        return Err(Error::Detector(format!("{name} region centred at {center:e} leaves the lattice window")));
    }
    if len as usize > ax.n {
        return Err(Error::Detector(format!("{name} width {width:e} exceeds the lattice window")));
    }
    Ok(Span { start: first as usize, len: len as usize })
}

/// A pixel × time-window region of the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub t: Span,
    pub y: Span,
    pub x: Span,
}

impl Region {
    /// Number of lattice cells, the vacuum mode count M.
    pub fn cells(&self) -> usize {
        self.t.len * self.y.len * self.x.len
    }

    pub fn reflect(&self, shape: &Shape) -> Result<Region> {
        Ok(Region {
            t: self.t,
            y: if shape.y.present { self.y.reflect(&shape.y)? } else { self.y },
            x: if shape.x.present { self.x.reflect(&shape.x)? } else { self.x },
        })
    }

    pub fn for_each(&self, shape: &Shape, mut f: impl FnMut(usize)) {
        for it in self.t.indices() {
            for iy in self.y.indices() {
                for ix in self.x.indices() {
                    f(shape.index(it, iy, ix));
                }
            }
        }
    }
}

pub fn time_span(shape: &Shape, t_d: Option<f64>) -> Result<Span> {
    match t_d {
        None => Ok(Span::full(&shape.t)),
        Some(_) if !shape.t.present => Ok(Span::full(&shape.t)),
        Some(t) => axis_span(&shape.t, 0.0, t, "detection window"),
    }
}

/// Square pixel of side d centred on (x, y).
pub fn pixel_region(shape: &Shape, center: [f64; 2], d: f64, t_d: Option<f64>) -> Result<Region> {
    Ok(Region {
        t: time_span(shape, t_d)?,
        y: axis_span(&shape.y, center[1], d, "pixel")?,
        x: axis_span(&shape.x, center[0], d, "pixel")?,
    })
}

/// The two detector regions.
pub fn detector_regions(shape: &Shape, det: &DetectorSpec) -> Result<(Region, Region)> {
    det.validate()?;
    let r1 = pixel_region(shape, det.center_1, det.d, det.t_d)?;
    let r2 = if det.symmetric { r1.reflect(shape)? } else { pixel_region(shape, det.center_2, det.d, det.t_d)? };
    Ok((r1, r2))
}

/// Raw Wigner count Σ|a|²ΔV over a region of one envelope.
pub fn region_count(lattice: &[num_complex::Complex64], shape: &Shape, region: &Region) -> f64 {
    let mut s = 0.0;
    region.for_each(shape, |i| s += lattice[i].norm_sqr());
    s * shape.cell_volume()
}

/// (N₁_W, N₂_W). Pixel 2 reads the idler envelope when present, otherwise the single envelope.
pub fn count_photons(state: &FieldState, det: &DetectorSpec) -> Result<(f64, f64)> {
    if state.domain != Domain::RealSpace {
        return Err(Error::Detector("counting needs a real-space field".into()));
    }
    let shape = state.shape();
    let (r1, r2) = detector_regions(&shape, det)?;
    let e2 = state.envelopes.len() - 1;
    Ok((region_count(&state.envelopes[0], &shape, &r1), region_count(&state.envelopes[e2], &shape, &r2)))
}

/// Time-integrated Wigner counts per transverse cell, for re-binning into pixels of any size.
/// Indexed iy·n_x + ix.
pub fn transverse_profile(lattice: &[num_complex::Complex64], shape: &Shape, t: Span) -> Vec<f64> {
    let nxy = shape.y.n * shape.x.n;
    let mut out = vec![0.0; nxy];
    for it in t.indices() {
        for (j, o) in out.iter_mut().enumerate() {
            *o += lattice[it * nxy + j].norm_sqr();
        }
    }
    let dv = shape.cell_volume();
    out.iter_mut().for_each(|v| *v *= dv);
    out
}

/// Sum of a transverse profile over a region's transverse spans.
pub fn profile_count(profile: &[f64], shape: &Shape, region: &Region) -> f64 {
    let mut s = 0.0;
    for iy in region.y.indices() {
        for ix in region.x.indices() {
            s += profile[iy * shape.x.n + ix];
        }
    }
    s
}
