use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::detection::{
    apply_efficiency, axis_span, ordering_correct, pixel_region, profile_count, time_span, transverse_profile,
    CorrelationMap, GaussianCheck, GaussianReport, MapAccumulator, MapMode, Measurement, PairMoments, Region, Span,
    StatsAccumulator,
};
use crate::error::{Error, Result};
use crate::experiment::{RunConfig, Setup};
use crate::model::{PumpProfile, Shape};
use crate::optics::{attenuate, image_near_field, spectral_filter, to_far_field, OpticalPath};
use crate::propagator::{sample_vacuum, FieldState, Propagator, TrajectorySeed};
use crate::pwpa::{pixel_correlations_pwpa, HKernel, PixelCorrelationResult, PixelGeometry};

/// Bookkeeping of one ensemble run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunInfo {
    pub n_ok: u64,
    /// Trajectories dropped under `salvage_partial`, with the reason.
    pub failed: Vec<(u64, String)>,
    pub wall_time: f64,
}

/// Runs `run.n_traj` trajectories in chunks on the worker pool. `observe` maps each exit
/// field to a small record; `consume` folds the records in trajectory order, so results
/// do not depend on the pool size.
pub fn drive<O, F, C>(prop: &Propagator, run: &RunConfig, observe: F, mut consume: C) -> Result<RunInfo>
where
    O: Send,
    F: Fn(TrajectorySeed, FieldState) -> Result<O> + Sync,
    C: FnMut(u64, O) -> Result<()> + Send,
{
    let t0 = Instant::now();
    let n_env = prop.crystal().envelope_count();
    let chunk = run.chunk.max(1) as u64;
    let mut body = || -> Result<RunInfo> {
        let mut info = RunInfo::default();
        let mut start = 0;
        while start < run.n_traj {
            let end = (start + chunk).min(run.n_traj);
            let out: Vec<(u64, Result<O>)> = (start..end)
                .into_par_iter()
                .map(|i| {
                    let seed = TrajectorySeed::new(run.master_seed, i);
                    let r = prop
                        .propagate(sample_vacuum(prop.grid(), n_env, seed))
                        .map_err(|e| e.context("propagation"))
                        .and_then(|s| observe(seed, s));
                    (i, r)
                })
                .collect();
            for (i, r) in out {
                match r {
                    Ok(o) => {
                        consume(i, o)?;
                        info.n_ok += 1;
                    }
                    Err(e) if run.salvage_partial => {
                        log::warn!("trajectory {i} dropped: {e}");
                        info.failed.push((i, e.to_string()));
                    }
                    Err(e) => return Err(e.context(&format!("trajectory {i}"))),
                }
            }
            log::debug!("{end}/{} trajectories", run.n_traj);
            start = end;
        }
        Ok(info)
    };
    let mut info = if run.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(run.workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        pool.install(body)?
    } else {
        body()?
    };
    info.wall_time = t0.elapsed().as_secs_f64();
    Ok(info)
}

fn filtered(setup: &Setup, seed: TrajectorySeed, mut state: FieldState) -> Result<FieldState> {
    if let Some(hw) = setup.filter_half_width() {
        spectral_filter(&mut state, hw, &mut seed.aux_rng(0)).map_err(|e| e.context("spectral filter"))?;
    }
    Ok(state)
}

/// One pixel size of a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub d_requested: f64,
    /// Side actually covered on the lattice.
    pub d: f64,
    /// Lattice cells per pixel (vacuum modes M).
    pub cells: usize,
    pub measurement: Measurement,
    /// Lossless measurement thinned by η, when η < 1.
    pub thinned: Option<Measurement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldResult {
    pub info: RunInfo,
    pub points: Vec<ScanPoint>,
    /// Row of ⟨:δN(x)δN(x′):⟩ with x′ at pixel 1, over the pixel-2 envelope.
    pub map: Option<CorrelationMap>,
    pub fixed_index: usize,
    /// Focal-plane shape of one envelope.
    pub shape: Shape,
    /// Normally ordered mean count per transverse cell of the signal envelope, and its error.
    pub profile: Vec<f64>,
    pub profile_se: Vec<f64>,
}

/// Focal-plane lattice for a crystal-exit grid.
pub fn far_shape(setup: &Setup) -> Result<Shape> {
    let n_env = setup.crystal.envelope_count();
    let z = FieldState::zeros(&setup.config.grid, n_env);
    Ok(to_far_field(&z, &setup.config.optics, &setup.crystal)?.shape())
}

fn pixel_pair(setup: &Setup, shape: &Shape, center: [f64; 2], d: f64) -> Result<(Region, Region)> {
    let det = &setup.config.detector;
    let r1 = pixel_region(shape, center, d, det.t_d)?;
    let r2 = if det.symmetric { r1.reflect(shape)? } else { pixel_region(shape, det.center_2, d, det.t_d)? };
    Ok((r1, r2))
}

fn covered(shape: &Shape, r: &Region) -> f64 {
    if shape.x.present {
        (r.x.len as f64 * shape.x.step).max(r.y.len as f64 * shape.y.step)
    } else {
        r.y.len as f64 * shape.y.step
    }
}

/// Pixel-1 centre: the configured one, or the ring along +y in the focal plane.
pub fn far_center(setup: &Setup) -> [f64; 2] {
    match setup.config.scan.pixel_center {
        crate::experiment::PixelCenter::Given => setup.config.detector.center_1,
        crate::experiment::PixelCenter::Ring => [0.0, setup.far_scale() * setup.ring_q()],
    }
}

type Profiles = Vec<Vec<f64>>;

/// Far-field ensemble: pixel-size scan on a shared set of trajectories, optional
/// correlation-map row and the mean photon profile.
pub fn far_field_run(setup: &Setup, prop: &Propagator, d_values: &[f64], with_map: bool) -> Result<FarFieldResult> {
    let cfg = &setup.config;
    let det = &cfg.detector;
    det.validate()?;
    if !matches!(cfg.optics, OpticalPath::FarField { .. }) {
        return Err(Error::Config("far-field run needs optics.kind = \"far-field\"".into()));
    }
    let shape = far_shape(setup)?;
    let tspan = time_span(&shape, det.t_d)?;
    let center = far_center(setup);
    let pairs = d_values.iter().map(|&d| pixel_pair(setup, &shape, center, d)).collect::<Result<Vec<_>>>()?;
    let lossy = det.eta < 1.0;
    let mut accs: Vec<StatsAccumulator> =
        pairs.iter().map(|(a, b)| StatsAccumulator::new(a.cells(), b.cells())).collect();
    let mut accs_clean = accs.clone();

    let nxy = shape.y.n * shape.x.n;
    let n_env = setup.crystal.envelope_count();
    let fixed = {
        let y = axis_span(&shape.y, center[1], shape.y.step, "map pixel")?;
        let x = axis_span(&shape.x, center[0], shape.x.step, "map pixel")?;
        y.start * shape.x.n + x.start
    };
    let mut map = if with_map {
        let k = if n_env == 2 { 2 * nxy } else { nxy };
        Some(MapAccumulator::new(MapMode::Row(fixed), vec![tspan.len as f64; k], 20)?)
    } else {
        None
    };
    let mut psum = vec![0.0; nxy];
    let mut psq = vec![0.0; nxy];

    let observe = |seed: TrajectorySeed, state: FieldState| -> Result<(Profiles, Option<Profiles>)> {
        let state = filtered(setup, seed, state)?;
        let ff = to_far_field(&state, &cfg.optics, &setup.crystal).map_err(|e| e.context("far-field optics"))?;
        let prof = |s: &FieldState| -> Profiles { s.envelopes.iter().map(|e| transverse_profile(e, &shape, tspan)).collect() };
        let lossy_prof = if lossy {
            let mut l = ff.clone();
            attenuate(&mut l, det.eta, &mut seed.aux_rng(1)).map_err(|e| e.context("detector loss"))?;
            Some(prof(&l))
        } else {
            None
        };
        Ok((prof(&ff), lossy_prof))
    };
    let info = drive(prop, &cfg.run, observe, |traj, (clean, lossy_p)| {
        let seen = lossy_p.as_ref().unwrap_or(&clean);
        let last = seen.len() - 1;
        for (acc, (r1, r2)) in accs.iter_mut().zip(&pairs) {
            acc.push(profile_count(&seen[0], &shape, r1), profile_count(&seen[last], &shape, r2));
        }
        if lossy {
            for (acc, (r1, r2)) in accs_clean.iter_mut().zip(&pairs) {
                acc.push(profile_count(&clean[0], &shape, r1), profile_count(&clean[last], &shape, r2));
            }
        }
        if let Some(m) = map.as_mut() {
            if n_env == 2 {
                let mut counts = seen[0].clone();
                counts.extend_from_slice(&seen[1]);
                m.push(traj, &counts);
            } else {
                m.push(traj, &seen[0]);
            }
        }
        for (j, v) in seen[0].iter().enumerate() {
            psum[j] += v;
            psq[j] += v * v;
        }
        Ok(())
    })?;

    let mut points = Vec::with_capacity(d_values.len());
    for (i, &d) in d_values.iter().enumerate() {
        let measurement = ordering_correct(&accs[i])?;
        let thinned = if lossy { Some(apply_efficiency(&ordering_correct(&accs_clean[i])?, det.eta)?) } else { None };
        points.push(ScanPoint {
            d_requested: d,
            d: covered(&shape, &pairs[i].0),
            cells: pairs[i].0.cells(),
            measurement,
            thinned,
        });
    }
    let n = info.n_ok as f64;
    let half = 0.5 * tspan.len as f64;
    let profile = psum.iter().map(|s| s / n - half).collect();
    let profile_se = psum
        .iter()
        .zip(&psq)
        .map(|(s, q)| {
            let m = s / n;
            ((q / n - m * m).max(0.0) / (n - 1.0).max(1.0)).sqrt()
        })
        .collect();
    let map = match map {
        Some(m) => {
            let mut full = m.finish()?;
            if n_env == 2 {
                // keep the idler columns
                full.values.drain(..nxy);
                full.errors.drain(..nxy);
                full.means.drain(..nxy);
                full.cols = nxy;
            }
            Some(full)
        }
        None => None,
    };
    Ok(FarFieldResult { info, points, map, fixed_index: fixed, shape, profile, profile_se })
}

/// One (Δz, Δy, d) point of a near-field run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearFieldPoint {
    pub dz: f64,
    pub dy: f64,
    pub scan: ScanPoint,
}

fn tiles(ax: &crate::model::Axis, len: usize) -> Vec<Span> {
    if !ax.present {
        return vec![Span { start: 0, len: 1 }];
    }
    (0..ax.n / len).map(|k| Span { start: k * len, len }).collect()
}

/// Near-field ensemble over imaging shifts and pixel sizes. With `pooled`, every pixel
/// position of a transversely uniform lattice contributes (plane-wave pump only);
/// otherwise both pixels sit at `detector.center_1` in the imaged frame.
pub fn near_field_run(
    setup: &Setup,
    prop: &Propagator,
    shifts: &[(f64, f64)],
    d_values: &[f64],
    pooled: bool,
) -> Result<(RunInfo, Vec<NearFieldPoint>)> {
    let cfg = &setup.config;
    let det = &cfg.detector;
    det.validate()?;
    let OpticalPath::NearField { f, .. } = cfg.optics else {
        return Err(Error::Config("near-field run needs optics.kind = \"near-field\"".into()));
    };
    if setup.crystal.envelope_count() != 2 {
        return Err(Error::Config("near-field imaging needs distinct signal and idler envelopes (type II)".into()));
    }
    if pooled && !(setup.pump.profile == PumpProfile::PlaneWave || setup.pump.w0.is_infinite()) {
        return Err(Error::Config("pooled pixels need a transversely uniform (plane-wave) pump".into()));
    }
    if det.eta < 1.0 {
        return Err(Error::Config("near-field runs take η = 1; apply losses to the measurement instead".into()));
    }
    let shape = cfg.grid.shape();
    let tspan = time_span(&shape, det.t_d)?;
    // per d: list of (region) tiles
    let mut layouts: Vec<Vec<Region>> = Vec::new();
    for &d in d_values {
        let r = pixel_region(&shape, det.center_1, d, det.t_d)?;
        if pooled {
            let mut v = Vec::new();
            for y in tiles(&shape.y, r.y.len) {
                for x in tiles(&shape.x, r.x.len) {
                    v.push(Region { t: tspan, y, x });
                }
            }
            layouts.push(v);
        } else {
            layouts.push(vec![r]);
        }
    }
    let paths: Vec<OpticalPath> =
        shifts.iter().map(|&(dz, dy)| OpticalPath::NearField { f, delta_z: dz, delta_y: dy }).collect();
    for p in &paths {
        p.validate(&setup.crystal)?;
    }
    let mut accs: Vec<StatsAccumulator> = Vec::new();
    for _ in shifts {
        for l in &layouts {
            accs.push(StatsAccumulator::new(l[0].cells(), l[0].cells()));
        }
    }
    let observe = |seed: TrajectorySeed, state: FieldState| -> Result<Vec<PairMoments>> {
        let state = filtered(setup, seed, state)?;
        let mut out = Vec::with_capacity(paths.len() * layouts.len());
        for p in &paths {
            let img = image_near_field(&state, p, &setup.crystal).map_err(|e| e.context("near-field optics"))?;
            let p1 = transverse_profile(&img.envelopes[0], &shape, tspan);
            let p2 = transverse_profile(&img.envelopes[1], &shape, tspan);
            for l in &layouts {
                let samples: Vec<(f64, f64)> =
                    l.iter().map(|r| (profile_count(&p1, &shape, r), profile_count(&p2, &shape, r))).collect();
                out.push(PairMoments::from_samples(&samples));
            }
        }
        Ok(out)
    };
    let info = drive(prop, &cfg.run, observe, |_, groups| {
        for (acc, g) in accs.iter_mut().zip(groups) {
            acc.push_group(g);
        }
        Ok(())
    })?;
    let mut points = Vec::new();
    let mut k = 0;
    for &(dz, dy) in shifts {
        for (i, l) in layouts.iter().enumerate() {
            let measurement = ordering_correct(&accs[k])?;
            k += 1;
            points.push(NearFieldPoint {
                dz,
                dy,
                scan: ScanPoint {
                    d_requested: d_values[i],
                    d: covered(&shape, &l[0]),
                    cells: l[0].cells(),
                    measurement,
                    thinned: None,
                },
            });
        }
    }
    Ok((info, points))
}

/// Fourth-order moments of a central block of crystal-exit cells (signal envelope)
/// compared with their Gaussian factorization. `block` is (cells along y, cells along t).
pub fn gaussian_factorization(setup: &Setup, prop: &Propagator, block: [usize; 2], n_groups: usize) -> Result<GaussianReport> {
    let shape = setup.config.grid.shape();
    if block[0] > shape.y.n || block[1] > shape.t.n {
        return Err(Error::Detector("Gaussian-check block exceeds the lattice".into()));
    }
    let y0 = shape.y.n / 2 - block[0] / 2;
    let t0 = shape.t.n / 2 - block[1] / 2;
    let ix = shape.x.n / 2;
    let idx: Vec<usize> = (0..block[1])
        .flat_map(|it| (0..block[0]).map(move |iy| (it, iy)))
        .map(|(it, iy)| shape.index(t0 + it, y0 + iy, ix))
        .collect();
    let mut check = GaussianCheck::new(idx.len(), shape.cell_volume(), n_groups);
    drive(
        prop,
        &setup.config.run,
        |_, st| Ok(idx.iter().map(|&i| st.envelopes[0][i]).collect::<Vec<_>>()),
        |traj, amps| {
            check.push(traj, &amps);
            Ok(())
        },
    )?;
    check.finish()
}

/// Analytic far-field ratio versus pixel size for symmetric pixels on the ring.
pub fn pwpa_far_curve(setup: &Setup, d_values: &[f64]) -> Result<Vec<(f64, PixelCorrelationResult)>> {
    let q_center = match setup.config.scan.pixel_center {
        crate::experiment::PixelCenter::Ring => [0.0, setup.ring_q()],
        crate::experiment::PixelCenter::Given => {
            let c = setup.config.detector.center_1;
            [c[0] / setup.far_scale(), c[1] / setup.far_scale()]
        }
    };
    let quad = setup.quad();
    d_values
        .par_iter()
        .map(|&d| {
            let geom = PixelGeometry::Far { q_center, q_width: d / setup.far_scale(), pump_extent: setup.pump_extent() };
            pixel_correlations_pwpa(
                &geom,
                &setup.crystal,
                &setup.scales,
                setup.sigma_p(),
                setup.dims,
                setup.detection_time(),
                &quad,
            )
            .map(|r| (d, r))
        })
        .collect()
}

fn near_point(setup: &Setup, d: f64, dz: f64, dy: f64) -> Result<PixelCorrelationResult> {
    let geom = PixelGeometry::Near { d, dz, dy, kernel: HKernel::Exact };
    pixel_correlations_pwpa(&geom, &setup.crystal, &setup.scales, setup.sigma_p(), setup.dims, setup.detection_time(), &setup.quad())
}

/// Analytic near-field ratio versus pixel size at fixed imaging shifts.
pub fn pwpa_near_curve(setup: &Setup, d_values: &[f64], dz: f64, dy: f64) -> Result<Vec<(f64, PixelCorrelationResult)>> {
    d_values.par_iter().map(|&d| near_point(setup, d, dz, dy).map(|r| (d, r))).collect()
}

/// Analytic near-field ratio over a (Δz, Δy) grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Surface {
    pub d: f64,
    pub dz: Vec<f64>,
    pub dy: Vec<f64>,
    /// Row-major, one row per Δz.
    pub ratio: Vec<f64>,
    pub min_dz: f64,
    pub min_dy: f64,
    pub min_ratio: f64,
    /// Least-squares slope of the per-row minimum, dΔy/dΔz, along the valley.
    pub valley_slope: f64,
}

pub fn pwpa_near_surface(setup: &Setup, d: f64, dz: &[f64], dy: &[f64]) -> Result<Surface> {
    if dz.is_empty() || dy.is_empty() {
        return Err(Error::Config("surface scan needs scan.dz_list and scan.dy_list".into()));
    }
    let pts: Vec<(f64, f64)> = dz.iter().flat_map(|&z| dy.iter().map(move |&y| (z, y))).collect();
    let ratio = pts
        .par_iter()
        .map(|&(z, y)| near_point(setup, d, z, y).map(|r| r.ratio))
        .collect::<Result<Vec<f64>>>()?;
    let (imin, min_ratio) =
        ratio.iter().copied().enumerate().fold((0, f64::INFINITY), |b, (i, r)| if r < b.1 { (i, r) } else { b });
    let row_min: Vec<(f64, f64)> = dz
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let row = &ratio[i * dy.len()..(i + 1) * dy.len()];
            let j = row.iter().copied().enumerate().fold((0, f64::INFINITY), |b, (j, r)| if r < b.1 { (j, r) } else { b }).0;
            (z, dy[j])
        })
        .collect();
    let n = row_min.len() as f64;
    let (mz, my) = row_min.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let sxy: f64 = row_min.iter().map(|p| (p.0 - mz) * (p.1 - my)).sum();
    let sxx: f64 = row_min.iter().map(|p| (p.0 - mz).powi(2)).sum();
    Ok(Surface {
        d,
        dz: dz.to_vec(),
        dy: dy.to_vec(),
        min_dz: pts[imin].0,
        min_dy: pts[imin].1,
        min_ratio,
        valley_slope: if sxx > 0.0 { sxy / sxx } else { f64::NAN },
        ratio,
    })
}
