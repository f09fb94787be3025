use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use twinbeam::model::*;
use twinbeam::optics::{free_space, image_near_field, to_far_field, to_far_field_arm, OpticalPath};
use twinbeam::propagator::*;
use twinbeam::pwpa::gain_uv;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn grid(dims: GridDims, n_x: usize, n_y: usize, n_t: usize, l: f64, t_win: f64, n_z: usize) -> GridSpec {
    GridSpec { dims, n_x, n_y, n_t, l_x: l, l_y: if dims == GridDims::Xt { 0.0 } else { 0.8 * l }, t_win, n_z }
}

fn plane_wave(c: &CrystalParams, g: f64) -> PumpParams {
    PumpParams::with_gain(c, f64::INFINITY, f64::INFINITY, g, PumpProfile::PlaneWave).unwrap()
}

fn random_state(g: &GridSpec, n_env: usize, seed: u64) -> FieldState {
    sample_vacuum(g, n_env, TrajectorySeed::new(seed, 0))
}

// --- vacuum ---

#[test]
fn vacuum_cells_have_the_wigner_variance() {
    let g = grid(GridDims::Xt, 1024, 1, 1024, 3e-3, 2e-12, 1);
    let st = sample_vacuum(&g, 1, TrajectorySeed::new(42, 7));
    let dv = st.shape().cell_volume();
    let a = &st.envelopes[0];
    let n = a.len() as f64;
    assert!(n >= 1e6);
    let mean = a.iter().sum::<Complex64>() / n;
    let var: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
    let target = 0.5 / dv;
    // each quadrature has variance target/2
    let se = (0.5 * target / n).sqrt();
    assert!(mean.re.abs() < 4.0 * se && mean.im.abs() < 4.0 * se, "mean {mean}");
    assert!(rel(var, target) < 0.01, "variance {var} vs {target}");
    // circular: ⟨a²⟩ = 0
    let pseudo = a.iter().map(|z| z * z).sum::<Complex64>() / n;
    assert!(pseudo.norm() < 4.0 * target / n.sqrt());
}

#[test]
fn vacuum_cells_and_trajectories_are_independent() {
    let g = grid(GridDims::Xt, 4, 1, 4, 1.0, 1.0, 1);
    let n = 20000;
    let (mut cells, mut trajs) = (Complex64::default(), Complex64::default());
    let mut prev = sample_vacuum(&g, 2, TrajectorySeed::new(3, 0));
    for i in 1..=n {
        let st = sample_vacuum(&g, 2, TrajectorySeed::new(3, i));
        cells += st.envelopes[0][0] * st.envelopes[0][5].conj();
        trajs += st.envelopes[1][3] * prev.envelopes[1][3].conj();
        prev = st;
    }
    // each component of a product of two independent cells has standard deviation v/√2
    let v = 0.5 / g.shape().cell_volume();
    let bound = 4.0 * v / 2f64.sqrt() / (n as f64).sqrt();
    for v in [cells / n as f64, trajs / n as f64] {
        assert!(v.re.abs() < bound && v.im.abs() < bound, "{v}");
    }
}

#[test]
fn seeds_reproduce_and_streams_differ() {
    let g = grid(GridDims::Xt, 16, 1, 8, 1.0, 1.0, 1);
    let a = sample_vacuum(&g, 2, TrajectorySeed::new(9, 4));
    assert_eq!(a, sample_vacuum(&g, 2, TrajectorySeed::new(9, 4)));
    assert_ne!(a, sample_vacuum(&g, 2, TrajectorySeed::new(9, 5)));
    assert_ne!(a, sample_vacuum(&g, 2, TrajectorySeed::new(10, 4)));
    let s = TrajectorySeed::new(9, 4);
    use rand::Rng;
    let (x, y): (u64, u64) = (s.rng().gen(), s.aux_rng(1).gen());
    assert_ne!(x, y);
}

#[test]
fn complex_normal_is_standard() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let n = 200_000;
    let m: f64 = (0..n).map(|_| complex_normal(&mut rng).norm_sqr()).sum::<f64>() / n as f64;
    assert!((m - 1.0).abs() < 4.0 / (n as f64).sqrt());
}

// --- transforms ---

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transforms_round_trip(dims in 0usize..3, seed in 0u64..1000) {
        let dims = [GridDims::Xt, GridDims::Xy, GridDims::Xyt][dims];
        let g = grid(dims, 16, 8, 4, 2e-3, 1e-12, 1);
        let st = random_state(&g, 2, seed);
        let fft = Spectral::new(st.shape());
        let mut t = st.clone();
        t.to_fourier(&fft);
        prop_assert_eq!(t.domain, Domain::FourierSpace);
        prop_assert!(rel(t.photon_sum(1), st.photon_sum(1)) < 1e-12);
        t.to_real(&fft);
        let norm: f64 = st.envelopes[0].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for (a, b) in t.envelopes.iter().flatten().zip(st.envelopes.iter().flatten()) {
            prop_assert!((a - b).norm() < 1e-12 * norm);
        }
    }
}

#[test]
fn fourier_index_carries_its_wave() {
    let g = grid(GridDims::Xt, 16, 1, 8, 2e-3, 1e-12, 1);
    let shape = g.shape();
    let fft = Spectral::new(shape);
    let (it, iy) = (3, 13);
    let (q, w) = (shape.y.freq(iy), shape.t.freq(it));
    let mut a: Vec<Complex64> = (0..shape.len())
        .map(|i| {
            let (_, y, t) = shape.real_coords(i);
            Complex64::from_polar(1.0, q * y - w * t)
        })
        .collect();
    fft.to_fourier(&mut a);
    let k = shape.index(it, iy, 0);
    assert!(rel(a[k].norm(), (shape.len() as f64).sqrt()) < 1e-12);
    let rest: f64 = a.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, v)| v.norm_sqr()).sum();
    assert!(rest < 1e-20 * shape.len() as f64);
    assert_eq!(shape.fourier_coords(k), (0.0, q, w));
    assert_eq!(shape.fourier_coords(shape.mirror_index(k)), (0.0, -q, -w));
}

// --- pump ---

#[test]
fn pump_envelope_peak_and_diffraction() {
    let c = crystal_preset("bbo").unwrap();
    let pump = PumpParams::with_gain(&c, 150e-6, 1.5e-12, 3.0, PumpProfile::Gaussian).unwrap();
    let g = grid(GridDims::Xt, 256, 1, 64, 8.0 * 150e-6, 12e-12, 1);
    let shape = g.shape();
    let fft = Spectral::new(shape);
    let centre = shape.index(32, 128, 0);
    let a0 = pump_envelope(0.0, &shape, &fft, &c, &pump, false);
    assert!(rel(a0[centre].re, pump.a_p) < 1e-12 && a0[centre].im == 0.0);
    let al = pump_envelope(c.l_c, &shape, &fft, &c, &pump, true);
    assert!(c.l_c < 0.1 * PI * pump.w0 * pump.w0 / c.lambda[0]);
    assert!((al[centre].norm() / pump.a_p - 1.0).abs() < 0.01);
    let (mut f0, mut fl) = (a0.clone(), al.clone());
    fft.to_fourier(&mut f0);
    fft.to_fourier(&mut fl);
    assert!((f0[0] - fl[0]).norm() < 1e-12 * f0[0].norm());
    // without the comoving frame the pulse moves by k₀′l_c in time
    let lab = pump_envelope(c.l_c, &shape, &fft, &c, &pump, false);
    let (_, _, dt) = shape.real_coords(shape.index(33, 0, 0));
    let shift = (c.kp[0] * c.l_c / dt).round() as i64;
    assert!(shift != 0);
    let moved = shape.index((32 + shift).rem_euclid(64) as usize, 128, 0);
    assert!(lab[moved].norm() > 0.9 * pump.a_p);
}

// --- propagation ---

fn bbo_mode_grid(n_z: usize) -> (CrystalParams, GridSpec) {
    let c = crystal_preset("bbo").unwrap();
    let p = PumpParams::with_gain(&c, 1e-3, 1e-12, 3.0, PumpProfile::Gaussian).unwrap();
    let s = derive_scales(&c, &p, 0.1);
    let g = GridSpec {
        dims: GridDims::Xt,
        n_x: 16,
        n_y: 1,
        n_t: 16,
        l_x: 2.0 * PI * 5.0 / (0.97 * s.q_c),
        l_y: 0.0,
        t_win: 4.0 * PI / s.omega_0,
        n_z,
    };
    (c, g)
}

fn single_mode_out(c: &CrystalParams, g: &GridSpec, scheme: StepScheme, k: usize, gain: f64) -> FieldState {
    let prop = Propagator::new(c, &plane_wave(c, gain), g, scheme).unwrap();
    let mut st = FieldState::zeros(g, c.envelope_count());
    st.domain = Domain::FourierSpace;
    st.envelopes[0][k] = Complex64::new(1.0, 0.0);
    let mut out = prop.propagate(st).unwrap();
    out.to_fourier(prop.spectral());
    out
}

#[test]
fn single_mode_matches_plane_wave_gains() {
    // splitting error grows with |Ω|; 2000 steps keep the whole band below 1e-6
    let (c, g) = bbo_mode_grid(2000);
    let shape = g.shape();
    // every paired lattice mode inside the gain band, |Δl_c| < 2σ_p l_c; Nyquist rows have no twin
    let modes: Vec<usize> = (0..shape.len())
        .filter(|&k| {
            let (qx, qy, w) = shape.fourier_coords(k);
            let (mx, my, mw) = shape.fourier_coords(shape.mirror_index(k));
            (mx, my, mw) == (-qx, -qy, -w) && (c.mismatch(qx, qy, w) * c.l_c).abs() < 6.0
        })
        .collect();
    assert!(modes.len() >= 4, "{} modes", modes.len());
    for scheme in [StepScheme::RotatingComoving, StepScheme::MidpointPhase] {
        for &k in &modes {
            let (qx, qy, w) = shape.fourier_coords(k);
            let out = single_mode_out(&c, &g, scheme, k, 3.0);
            let gain = gain_uv(qx, qy, w, &c, 3.0 / c.l_c, c.l_c);
            let mirror = gain_uv(-qx, -qy, -w, &c, 3.0 / c.l_c, c.l_c);
            let mk = shape.mirror_index(k);
            let e1 = rel(out.envelopes[0][k].norm(), gain.u1.norm());
            let e2 = rel(out.envelopes[1][mk].norm(), mirror.v2.norm());
            assert!(e1 < 1e-6 && e2 < 1e-6, "{scheme:?} mode {k}: {e1:e} {e2:e}");
        }
    }
}

#[test]
fn type_one_single_mode_feeds_its_mirror() {
    let c = crystal_preset("lbo").unwrap();
    let p = PumpParams::with_gain(&c, 1e-3, 1e-12, 2.0, PumpProfile::Gaussian).unwrap();
    let s = derive_scales(&c, &p, 0.1);
    let g = GridSpec { dims: GridDims::Xt, n_x: 32, n_y: 1, n_t: 8, l_x: 32.0 * PI / (s.q_r + 4.0 * s.q_0), l_y: 0.0, t_win: 8.0 * PI / (5.0 * s.omega_0), n_z: 800 };
    let shape = g.shape();
    let k = shape.index(1, 5, 0);
    let (qx, qy, w) = shape.fourier_coords(k);
    let out = single_mode_out(&c, &g, StepScheme::RotatingComoving, k, 2.0);
    let gain = gain_uv(qx, qy, w, &c, 2.0 / c.l_c, c.l_c);
    assert!(rel(out.envelopes[0][k].norm(), gain.u1.norm()) < 1e-5);
    assert!(rel(out.envelopes[0][shape.mirror_index(k)].norm(), gain.v1.norm()) < 1e-5);
}

#[test]
fn splitting_is_second_order() {
    let (c, _) = bbo_mode_grid(1);
    let errs: Vec<f64> = [100, 200, 400]
        .iter()
        .map(|&nz| {
            let (_, g) = bbo_mode_grid(nz);
            let shape = g.shape();
            let k = shape.index(1, 11, 0);
            let (qx, qy, w) = shape.fourier_coords(k);
            let out = single_mode_out(&c, &g, StepScheme::RotatingComoving, k, 3.0);
            rel(out.envelopes[0][k].norm(), gain_uv(qx, qy, w, &c, 3.0 / c.l_c, c.l_c).u1.norm())
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.3, "errors {errs:?}");
    }
}

#[test]
fn zero_gain_only_rotates_phases() {
    let (c, g) = bbo_mode_grid(20);
    let prop = Propagator::new(&c, &plane_wave(&c, 0.0), &g, StepScheme::RotatingComoving).unwrap();
    let input = random_state(&g, 2, 5);
    let mut out = prop.propagate(input.clone()).unwrap();
    assert_eq!(out.plane_z, c.l_c);
    let mut inp = input;
    inp.to_fourier(prop.spectral());
    out.to_fourier(prop.spectral());
    for (a, b) in out.envelopes.iter().flatten().zip(inp.envelopes.iter().flatten()) {
        assert!((a.norm() - b.norm()).abs() < 1e-12 * b.norm().max(1.0));
    }
}

#[test]
fn photon_difference_is_conserved_with_gaussian_pump() {
    let c = crystal_preset("bbo").unwrap();
    let pump = PumpParams::with_gain(&c, 100e-6, 0.5e-12, 2.5, PumpProfile::Gaussian).unwrap();
    let g = GridSpec { dims: GridDims::Xt, n_x: 128, n_y: 1, n_t: 32, l_x: 6.5 * 100e-6, l_y: 0.0, t_win: 3.2e-12, n_z: 40 };
    for scheme in [StepScheme::RotatingComoving, StepScheme::MidpointPhase] {
        let prop = Propagator::new(&c, &pump, &g, scheme).unwrap();
        let input = random_state(&g, 2, 11);
        let out = prop.propagate(input.clone()).unwrap();
        let scale = out.photon_sum(0) + out.photon_sum(1);
        assert!(out.photon_sum(0) > 1.01 * input.photon_sum(0), "gain {}", out.photon_sum(0) / input.photon_sum(0));
        assert!((out.photon_difference() - input.photon_difference()).abs() < 1e-8 * scale);
    }
}

#[test]
fn propagation_rejects_mismatched_fields() {
    let (c, g) = bbo_mode_grid(4);
    let prop = Propagator::new(&c, &plane_wave(&c, 1.0), &g, StepScheme::RotatingComoving).unwrap();
    assert!(prop.propagate(FieldState::zeros(&g, 1)).is_err());
    let mut bad = g.clone();
    bad.n_x = 12;
    assert!(Propagator::new(&c, &plane_wave(&c, 1.0), &bad, StepScheme::RotatingComoving).is_err());
}

#[test]
fn runaway_gain_is_reported() {
    let (mut c, g) = bbo_mode_grid(2);
    c.sigma = 1.0;
    let pump = PumpParams::with_gain(&c, f64::INFINITY, f64::INFINITY, 2000.0, PumpProfile::PlaneWave).unwrap();
    let prop = Propagator::new(&c, &pump, &g, StepScheme::RotatingComoving).unwrap();
    let err = prop.propagate(random_state(&g, 2, 1)).unwrap_err();
    assert!(err.to_string().contains("non-finite"), "{err}");
}

fn ensemble_checksum(threads: usize) -> Vec<f64> {
    let c = crystal_preset("bbo").unwrap();
    let pump = PumpParams::with_gain(&c, 100e-6, 0.5e-12, 2.0, PumpProfile::Gaussian).unwrap();
    let g = GridSpec { dims: GridDims::Xt, n_x: 64, n_y: 1, n_t: 16, l_x: 6.5 * 100e-6, l_y: 0.0, t_win: 3.2e-12, n_z: 16 };
    let prop = Propagator::new(&c, &pump, &g, StepScheme::RotatingComoving).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| run_ensemble(&prop, 77, 0..12, |_, s| Ok(s.photon_sum(0) + 3.0 * s.photon_sum(1))).unwrap())
}

#[test]
fn ensemble_is_independent_of_pool_size() {
    let a = ensemble_checksum(1);
    let b = ensemble_checksum(3);
    assert_eq!(a, b);
    assert!(a.windows(2).all(|w| w[0] != w[1]));
}

#[test]
fn ensemble_collects_failures_with_indices() {
    let (c, g) = bbo_mode_grid(2);
    let prop = Propagator::new(&c, &plane_wave(&c, 1.0), &g, StepScheme::RotatingComoving).unwrap();
    let r: twinbeam::Result<Vec<()>> =
        run_ensemble(&prop, 1, 0..5, |i, _| if i % 2 == 1 { Err(twinbeam::Error::Numerical("boom".into())) } else { Ok(()) });
    let msg = r.unwrap_err().to_string();
    assert!(msg.contains("2 trajectories failed") && msg.contains("trajectory 3"), "{msg}");
}

#[test]
fn field_dump_round_trip() {
    let g = grid(GridDims::Xyt, 8, 4, 4, 1e-3, 1e-12, 1);
    let mut st = random_state(&g, 2, 8);
    st.plane_z = 1.25e-3;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.bin");
    write_field(&path, &st, Some((8, 0))).unwrap();
    assert_eq!(read_field(&path).unwrap(), st);
    std::fs::write(&path, b"garbage").unwrap();
    assert!(read_field(&path).is_err());
}

// --- optics ---

#[test]
fn free_space_is_unitary_and_composes() {
    let g = grid(GridDims::Xy, 32, 16, 1, 1e-3, 0.0, 1);
    let st = random_state(&g, 2, 3);
    let lam = [704e-9, 704e-9];
    let (mut a, mut b) = (st.clone(), st.clone());
    free_space(&mut a, 2e-3, &lam).unwrap();
    free_space(&mut a, 3e-3, &lam).unwrap();
    free_space(&mut b, 5e-3, &lam).unwrap();
    let norm = st.photon_sum(0).sqrt();
    for (x, y) in a.envelopes.iter().flatten().zip(b.envelopes.iter().flatten()) {
        assert!((x - y).norm() < 1e-12 * norm / st.shape().cell_volume().sqrt());
    }
    assert!(rel(a.photon_sum(0), st.photon_sum(0)) < 1e-12);
    free_space(&mut a, -5e-3, &lam).unwrap();
    for (x, y) in a.envelopes.iter().flatten().zip(st.envelopes.iter().flatten()) {
        assert!((x - y).norm() < 1e-12 * norm / st.shape().cell_volume().sqrt());
    }
}

#[test]
fn identity_imaging_leaves_the_field() {
    let c = crystal_preset("bbo").unwrap();
    let (_, g) = bbo_mode_grid(1);
    let st = random_state(&g, 2, 2);
    let path = OpticalPath::NearField { f: 0.1, delta_z: 0.0, delta_y: 0.0 };
    assert_eq!(image_near_field(&st, &path, &c).unwrap(), st);
    let far = OpticalPath::NearField { f: 0.1, delta_z: 2.0 * c.l_c, delta_y: 0.0 };
    assert!(image_near_field(&st, &far, &c).is_err());
}

#[test]
fn lens_maps_gaussian_waist_to_diffraction_limit() {
    let (lambda, f, w) = (1064e-9, 0.2, 80e-6);
    let g = grid(GridDims::Xy, 256, 256, 1, 16.0 * w, 0.0, 1);
    let shape = g.shape();
    let mut st = FieldState::zeros(&g, 1);
    for (i, a) in st.envelopes[0].iter_mut().enumerate() {
        let (x, y, _) = shape.real_coords(i);
        *a = Complex64::new((-(x * x + y * y) / (w * w)).exp(), 0.0);
    }
    let out = to_far_field_arm(&st, 0, f, lambda).unwrap();
    assert!(rel(out.photon_sum(0), st.photon_sum(0)) < 1e-12);
    let os = out.shape();
    // 1/e amplitude radius along x
    let row: Vec<(f64, f64)> = (0..os.x.n)
        .map(|ix| {
            let i = os.index(0, os.y.n / 2, ix);
            (os.real_coords(i).0, out.envelopes[0][i].norm())
        })
        .collect();
    let peak = row.iter().map(|r| r.1).fold(0.0, f64::max);
    assert_eq!(row[os.x.n / 2].1, peak);
    let m2: f64 = row.iter().map(|(x, a)| x * x * a * a).sum::<f64>() / row.iter().map(|(_, a)| a * a).sum::<f64>();
    // |a|² ∝ exp(−2x²/W²) has ⟨x²⟩ = W²/4
    let waist = 2.0 * m2.sqrt();
    assert!(rel(waist, lambda * f / (PI * w)) < 1e-3, "{waist} vs {}", lambda * f / (PI * w));
}

#[test]
fn far_field_cell_holds_its_fourier_mode() {
    let c = crystal_preset("lbo").unwrap();
    let g = grid(GridDims::Xt, 32, 1, 4, 2e-3, 1e-12, 1);
    let shape = g.shape();
    let f = 0.15;
    let mut st = FieldState::zeros(&g, 1);
    let iq = 5;
    let q = shape.y.freq(iq);
    for (i, a) in st.envelopes[0].iter_mut().enumerate() {
        let (_, y, _) = shape.real_coords(i);
        *a = Complex64::from_polar(1.0, q * y);
    }
    let out = to_far_field(&st, &OpticalPath::FarField { f }, &c).unwrap();
    let os = out.shape();
    let prof: Vec<f64> = (0..os.y.n).map(|iy| out.envelopes[0][os.index(0, iy, 0)].norm()).collect();
    let imax = (0..os.y.n).max_by(|&a, &b| prof[a].total_cmp(&prof[b])).unwrap();
    let x = os.real_coords(os.index(0, imax, 0)).1;
    assert!(rel(x, c.lambda[1] * f / (2.0 * PI) * q) < 1e-12);
    assert_eq!(imax, os.y.n / 2 + iq);
    assert_eq!(os.y.mirror(imax), os.y.n / 2 - iq);
}
