//! C ABI over the twinbeam library.
//!
//! Handles are opaque pointers created by `tb_*_new`/`tb_*_from_*` and released with the
//! matching `tb_*_free`. Every fallible call returns a [`TbStatus`]; the message of the
//! last failure on the calling thread is available from [`tb_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use twinbeam::experiment::{run_experiment, validate, ExperimentConfig, Task};
use twinbeam::model::{crystal_preset, CrystalParams};
use twinbeam::pwpa::{gain_uv, optimal_shifts};
use twinbeam::Error;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad parameter, grid, detector, optics or configuration.
    Config = 3,
    /// Quadrature or propagation failure.
    Numerical = 4,
    Io = 5,
    /// Output buffer too small; the required size has been written.
    BufferTooSmall = 6,
    Panic = 7,
}

/// Task selector for [`tb_experiment_run`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbTask {
    Pwpa = 0,
    Simulate = 1,
    Scan = 2,
}

/// Opaque crystal handle.
pub struct TbCrystal(CrystalParams);

/// Opaque experiment-configuration handle.
pub struct TbExperiment(ExperimentConfig);

/// Plane-wave-pump gains of one (q, Ω) mode pair, as real/imaginary parts.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TbGain {
    pub u1_re: f64,
    pub u1_im: f64,
    pub v1_re: f64,
    pub v1_im: f64,
    pub u2_re: f64,
    pub u2_im: f64,
    pub v2_re: f64,
    pub v2_im: f64,
    /// Phase mismatch Δ(q, Ω) in 1/m.
    pub delta: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TbStatus {
    match e {
        Error::Io(_) => TbStatus::Io,
        Error::Quadrature(_) | Error::Numerical(_) => TbStatus::Numerical,
        _ => TbStatus::Config,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (TbStatus, String)>) -> TbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TbStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            TbStatus::Panic
        }
    }
}

fn lib(e: Error) -> (TbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TbStatus, String) {
    (TbStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TbStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (TbStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (TbStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failure on this thread. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn tb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a shipped crystal preset ("lbo" or "bbo").
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_crystal_preset(name: *const c_char, out: *mut *mut TbCrystal) -> TbStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let c = crystal_preset(str_arg(name, "name")?).map_err(lib)?;
        *out = Box::into_raw(Box::new(TbCrystal(c)));
        Ok(())
    })
}

/// # Safety
/// `crystal` must come from `tb_crystal_preset` (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tb_crystal_free(crystal: *mut TbCrystal) {
    if !crystal.is_null() {
        drop(Box::from_raw(crystal));
    }
}

/// Crystal length l_c in metres.
///
/// # Safety
/// `crystal` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_crystal_length(crystal: *const TbCrystal, out: *mut f64) -> TbStatus {
    guard(|| {
        let c = crystal.as_ref().ok_or_else(|| null("crystal"))?;
        *out_ptr(out, "out")? = c.0.l_c;
        Ok(())
    })
}

/// Gains after the full crystal at transverse wave vector (qx, qy) (1/m) and frequency
/// offset Ω (rad/s), for peak gain σ_p l_c.
///
/// # Safety
/// `crystal` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_gain(
    crystal: *const TbCrystal,
    qx: f64,
    qy: f64,
    omega: f64,
    sigma_p_lc: f64,
    out: *mut TbGain,
) -> TbStatus {
    guard(|| {
        let c = &crystal.as_ref().ok_or_else(|| null("crystal"))?.0;
        let out = out_ptr(out, "out")?;
        if !(sigma_p_lc >= 0.0) || ![qx, qy, omega].iter().all(|v| v.is_finite()) {
            return Err((TbStatus::Config, "arguments must be finite and σ_p l_c non-negative".into()));
        }
        let g = gain_uv(qx, qy, omega, c, sigma_p_lc / c.l_c, c.l_c);
        *out = TbGain {
            u1_re: g.u1.re,
            u1_im: g.u1.im,
            v1_re: g.v1.re,
            v1_im: g.v1.im,
            u2_re: g.u2.re,
            u2_im: g.u2.im,
            v2_re: g.v2.re,
            v2_im: g.v2.im,
            delta: g.delta,
        };
        Ok(())
    })
}

/// Near-field imaging shifts (Δz, Δy) in metres that compensate diffraction and walk-off.
///
/// # Safety
/// `crystal` must be a live handle; `dz` and `dy` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tb_optimal_shifts(
    crystal: *const TbCrystal,
    sigma_p_lc: f64,
    dz: *mut f64,
    dy: *mut f64,
) -> TbStatus {
    guard(|| {
        let c = &crystal.as_ref().ok_or_else(|| null("crystal"))?.0;
        let (z, y) = optimal_shifts(c, sigma_p_lc / c.l_c).map_err(lib)?;
        *out_ptr(dz, "dz")? = z;
        *out_ptr(dy, "dy")? = y;
        Ok(())
    })
}

/// Parses an experiment configuration from TOML text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_experiment_from_toml(text: *const c_char, out: *mut *mut TbExperiment) -> TbStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let cfg = ExperimentConfig::from_toml(str_arg(text, "text")?).map_err(lib)?;
        *out = Box::into_raw(Box::new(TbExperiment(cfg)));
        Ok(())
    })
}

/// Loads a named experiment preset (see `twinbeam presets`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_experiment_preset(name: *const c_char, out: *mut *mut TbExperiment) -> TbStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let cfg = twinbeam::experiment::experiment_preset(str_arg(name, "name")?).map_err(lib)?;
        *out = Box::into_raw(Box::new(TbExperiment(cfg)));
        Ok(())
    })
}

/// # Safety
/// `exp` must come from a `tb_experiment_*` constructor (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tb_experiment_free(exp: *mut TbExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

/// Overrides the trajectory count and master seed.
///
/// # Safety
/// `exp` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_experiment_set_run(exp: *mut TbExperiment, n_traj: u64, master_seed: u64) -> TbStatus {
    guard(|| {
        let e = exp.as_mut().ok_or_else(|| null("exp"))?;
        e.0.run.n_traj = n_traj;
        e.0.run.master_seed = master_seed;
        Ok(())
    })
}

/// Checks every constraint; on failure the message lists all violations.
///
/// # Safety
/// `exp` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_experiment_validate(exp: *const TbExperiment) -> TbStatus {
    guard(|| {
        let e = exp.as_ref().ok_or_else(|| null("exp"))?;
        validate(&e.0).map(|_| ()).map_err(lib)
    })
}

/// Writes the configuration as TOML into `buf` (capacity `len`, NUL included). When the
/// buffer is too small, `needed` receives the required capacity and nothing is written.
///
/// # Safety
/// `exp` must be a live handle, `buf` writable for `len` bytes (or null with `len` = 0) and
/// `needed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_experiment_to_toml(
    exp: *const TbExperiment,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> TbStatus {
    guard(|| {
        let e = exp.as_ref().ok_or_else(|| null("exp"))?;
        let text = e.0.to_toml().map_err(lib)?;
        let need = text.len() + 1;
        *out_ptr(needed, "needed")? = need;
        if buf.is_null() || len < need {
            return Err((TbStatus::BufferTooSmall, format!("buffer needs {need} bytes")));
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// Runs a task and writes its tables under `out_dir`.
///
/// # Safety
/// `exp` must be a live handle and `out_dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tb_experiment_run(exp: *const TbExperiment, task: TbTask, out_dir: *const c_char) -> TbStatus {
    guard(|| {
        let e = exp.as_ref().ok_or_else(|| null("exp"))?;
        let dir = str_arg(out_dir, "out_dir")?;
        let task = match task {
            TbTask::Pwpa => Task::Pwpa,
            TbTask::Simulate => Task::Simulate,
            TbTask::Scan => Task::Scan,
        };
        run_experiment(&e.0, task, Path::new(dir)).map(|_| ()).map_err(lib)
    })
}
