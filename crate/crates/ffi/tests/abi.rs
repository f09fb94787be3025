use std::ffi::{CStr, CString};
use std::ptr;

use twinbeam_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(tb_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn crystal_handle_round_trip() {
    let name = CString::new("bbo").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { tb_crystal_preset(name.as_ptr(), &mut c) }, TbStatus::Ok);
    assert!(!c.is_null());
    let mut l = 0.0;
    assert_eq!(unsafe { tb_crystal_length(c, &mut l) }, TbStatus::Ok);
    assert_eq!(l, 4e-3);
    let (mut dz, mut dy) = (0.0, 0.0);
    assert_eq!(unsafe { tb_optimal_shifts(c, 3.0, &mut dz, &mut dy) }, TbStatus::Ok);
    assert!((dz * 1e6 - 407.0).abs() < 0.5 && (dy * 1e6 - 47.5).abs() < 0.05);
    unsafe { tb_crystal_free(c) };
}

#[test]
fn gain_matches_library_and_is_unitary() {
    let name = CString::new("lbo").unwrap();
    let mut c = ptr::null_mut();
    unsafe { tb_crystal_preset(name.as_ptr(), &mut c) };
    let mut g = TbGain::default();
    assert_eq!(unsafe { tb_gain(c, 0.0, 1.0e5, 2.0e13, 3.0, &mut g) }, TbStatus::Ok);
    let u = g.u1_re.powi(2) + g.u1_im.powi(2);
    let v = g.v1_re.powi(2) + g.v1_im.powi(2);
    assert!((u - v - 1.0).abs() < 1e-10);
    let crystal = twinbeam::model::crystal_preset("lbo").unwrap();
    let lib = twinbeam::pwpa::gain_uv(0.0, 1.0e5, 2.0e13, &crystal, 3.0 / crystal.l_c, crystal.l_c);
    assert_eq!((g.v1_re, g.v1_im, g.delta), (lib.v1.re, lib.v1.im, lib.delta));
    assert_eq!(unsafe { tb_gain(c, f64::NAN, 0.0, 0.0, 3.0, &mut g) }, TbStatus::Config);
    unsafe { tb_crystal_free(c) };
}

#[test]
fn errors_are_reported_with_codes() {
    let mut c = ptr::null_mut();
    let bad = CString::new("quartz").unwrap();
    assert_eq!(unsafe { tb_crystal_preset(bad.as_ptr(), &mut c) }, TbStatus::Config);
    assert!(c.is_null());
    assert!(last_error().contains("quartz"));
    assert_eq!(unsafe { tb_crystal_preset(ptr::null(), &mut c) }, TbStatus::NullPointer);
    let mut l = 0.0;
    assert_eq!(unsafe { tb_crystal_length(ptr::null(), &mut l) }, TbStatus::NullPointer);
    let junk = CString::new("schema_version = 1\n[crystal]\n").unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { tb_experiment_from_toml(junk.as_ptr(), &mut e) }, TbStatus::Config);
    assert!(last_error().contains("pump"), "{}", last_error());
    unsafe {
        tb_crystal_free(ptr::null_mut());
        tb_experiment_free(ptr::null_mut());
    }
}

#[test]
fn experiment_toml_round_trip_and_validate() {
    let name = CString::new("bbo-near-field").unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { tb_experiment_preset(name.as_ptr(), &mut e) }, TbStatus::Ok);
    assert_eq!(unsafe { tb_experiment_validate(e) }, TbStatus::Ok);
    let mut need = 0usize;
    assert_eq!(unsafe { tb_experiment_to_toml(e, ptr::null_mut(), 0, &mut need) }, TbStatus::BufferTooSmall);
    let mut buf = vec![0 as std::ffi::c_char; need];
    assert_eq!(unsafe { tb_experiment_to_toml(e, buf.as_mut_ptr(), need, &mut need) }, TbStatus::Ok);
    let mut e2 = ptr::null_mut();
    assert_eq!(unsafe { tb_experiment_from_toml(buf.as_ptr(), &mut e2) }, TbStatus::Ok);
    assert_eq!(unsafe { tb_experiment_set_run(e2, 1, 9) }, TbStatus::Ok);
    // a single trajectory cannot estimate variances
    assert_eq!(unsafe { tb_experiment_validate(e2) }, TbStatus::Config);
    unsafe {
        tb_experiment_free(e);
        tb_experiment_free(e2);
    }
}

#[test]
fn pwpa_task_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let name = CString::new("lbo-far-field").unwrap();
    let mut e = ptr::null_mut();
    unsafe { tb_experiment_preset(name.as_ptr(), &mut e) };
    assert_eq!(unsafe { tb_experiment_run(e, TbTask::Pwpa, out.as_ptr()) }, TbStatus::Ok, "{}", last_error());
    assert!(dir.path().join("pwpa_ratio_vs_d.tsv").exists());
    unsafe { tb_experiment_free(e) };
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(tb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/twinbeam.h")).unwrap();
    for sym in ["tb_crystal_preset", "tb_gain", "tb_experiment_run", "TB_STATUS_OK", "typedef struct TbExperiment"] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

/// Compiles a C program against the generated header and the shared library.
#[test]
fn c_program_links_and_runs() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    let so = lib_dir.join(format!("{}twinbeam_ffi{}", std::env::consts::DLL_PREFIX, std::env::consts::DLL_SUFFIX));
    if !so.exists() {
        eprintln!("skipping: {} not built", so.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let cc = std::process::Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .args(["-ltwinbeam_ffi", "-lm", "-o"])
        .arg(&bin)
        .status();
    match cc {
        Ok(s) if s.success() => {}
        Ok(s) => panic!("C compilation failed: {s}"),
        Err(e) => {
            eprintln!("skipping: no C compiler ({e})");
            return;
        }
    }
    let out = std::process::Command::new(&bin).env("LD_LIBRARY_PATH", &lib_dir).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "exit {:?}: {text}", out.status);
    assert!(text.contains(" 407.0 47.50 "), "{text}");
}
