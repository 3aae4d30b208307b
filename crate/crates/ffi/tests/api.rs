use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use iscc_ffi::*;

fn last_error() -> String {
    let p = iscc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn small_scenario() -> *mut IsccScenario {
    let overrides = CString::new("num_bs = 2\ntues_per_bs = 2\nnum_sues = 3").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { iscc_scenario_generate(overrides.as_ptr(), 1, &mut s) }, IsccStatus::Ok);
    assert!(!s.is_null());
    s
}

#[test]
fn generate_evaluate_and_read_back() {
    let s = small_scenario();
    let (mut nb, mut nt, mut ns) = (0, 0, 0);
    assert_eq!(unsafe { iscc_scenario_counts(s, &mut nb, &mut nt, &mut ns) }, IsccStatus::Ok);
    assert_eq!((nb, nt, ns), (2, 4, 3));

    let tau = [0.5, 0.25];
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { iscc_evaluate(s, tau.as_ptr(), 2, 0.3, 0.3, 0.5, &mut r) }, IsccStatus::Ok);
    assert!(iscc_last_error().is_null());
    let (mut mi, mut t, mut u) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { iscc_result_summary(r, &mut mi, &mut t, &mut u) }, IsccStatus::Ok);
    assert!(mi > 0.0 && t > 0.0);
    assert!((u - (mi.sqrt() / t.sqrt())).abs() <= 1e-9 * u);

    let mut back = [0.0; 2];
    let mut sat = [0.0; 3];
    assert_eq!(unsafe { iscc_result_allocation(r, back.as_mut_ptr(), 2, sat.as_mut_ptr()) }, IsccStatus::Ok);
    assert_eq!(back, tau);
    assert!((sat[2] - 0.4).abs() < 1e-12);
    // summary pointers are optional
    assert_eq!(unsafe { iscc_result_summary(r, ptr::null_mut(), &mut t, ptr::null_mut()) }, IsccStatus::Ok);
    unsafe {
        iscc_result_free(r);
        iscc_scenario_free(s);
    }
}

#[test]
fn pso_is_deterministic_across_calls() {
    let s = small_scenario();
    let mut cfg = iscc_pso_config_default();
    cfg.population = 8;
    cfg.max_iterations = 15;
    let run = || {
        let mut r = ptr::null_mut();
        assert_eq!(unsafe { iscc_pso_optimize(s, 0.5, &cfg, &mut r) }, IsccStatus::Ok);
        let mut u = 0.0;
        unsafe {
            iscc_result_summary(r, ptr::null_mut(), ptr::null_mut(), &mut u);
            iscc_result_free(r);
        }
        u
    };
    assert_eq!(run(), run());
    unsafe { iscc_scenario_free(s) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { iscc_scenario_generate(ptr::null(), 1, ptr::null_mut()) }, IsccStatus::NullPointer);
    assert!(last_error().contains("out"));

    let bad = CString::new("num_bs = \"ten\"").unwrap();
    assert_eq!(unsafe { iscc_scenario_generate(bad.as_ptr(), 1, &mut s) }, IsccStatus::Parse);
    let bad = CString::new("carrier_hz = -1.0").unwrap();
    assert_eq!(unsafe { iscc_scenario_generate(bad.as_ptr(), 1, &mut s) }, IsccStatus::InvalidScenario);
    assert!(s.is_null());

    let missing = CString::new("/nonexistent/scenario.toml").unwrap();
    assert_eq!(unsafe { iscc_scenario_load(missing.as_ptr(), &mut s) }, IsccStatus::Io);
    assert!(last_error().contains("nonexistent"));

    let s = small_scenario();
    let mut r = ptr::null_mut();
    let tau = [0.5, 0.5];
    // satellite shares exceed the frame
    assert_eq!(unsafe { iscc_evaluate(s, tau.as_ptr(), 2, 0.8, 0.8, 0.5, &mut r) }, IsccStatus::InvalidInput);
    assert!(last_error().contains("simplex"));
    assert_eq!(unsafe { iscc_evaluate(s, tau.as_ptr(), 1, 0.2, 0.2, 0.5, &mut r) }, IsccStatus::InvalidInput);
    assert_eq!(unsafe { iscc_evaluate(s, ptr::null(), 2, 0.2, 0.2, 0.5, &mut r) }, IsccStatus::NullPointer);
    let mut cfg = iscc_pso_config_default();
    cfg.population = 0;
    assert_eq!(unsafe { iscc_pso_optimize(s, 0.5, &cfg, &mut r) }, IsccStatus::InvalidInput);
    assert!(r.is_null());
    unsafe {
        iscc_scenario_free(s);
        iscc_scenario_free(ptr::null_mut());
        iscc_result_free(ptr::null_mut());
    }
}

#[test]
fn save_and_load_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let path = CString::new(d.path().join("s.toml").to_str().unwrap()).unwrap();
    let s = small_scenario();
    assert_eq!(unsafe { iscc_scenario_save(s, path.as_ptr()) }, IsccStatus::Ok);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { iscc_scenario_load(path.as_ptr(), &mut t) }, IsccStatus::Ok);
    let tau = [0.4, 0.6];
    let utility = |h| {
        let mut r = ptr::null_mut();
        let mut u = 0.0;
        unsafe {
            assert_eq!(iscc_evaluate(h, tau.as_ptr(), 2, 0.5, 0.25, 0.3, &mut r), IsccStatus::Ok);
            iscc_result_summary(r, ptr::null_mut(), ptr::null_mut(), &mut u);
            iscc_result_free(r);
        }
        u
    };
    assert_eq!(utility(s), utility(t));
    unsafe {
        iscc_scenario_free(s);
        iscc_scenario_free(t);
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/iscc.h")).unwrap();
    for sym in [
        "iscc_last_error",
        "iscc_version",
        "iscc_pso_config_default",
        "iscc_scenario_generate",
        "iscc_scenario_load",
        "iscc_scenario_save",
        "iscc_scenario_counts",
        "iscc_scenario_free",
        "iscc_evaluate",
        "iscc_pso_optimize",
        "iscc_result_summary",
        "iscc_result_allocation",
        "iscc_result_free",
        "typedef struct IsccScenario IsccScenario",
        "ISCC_STATUS_BUDGET_EXCEEDED = 5",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

fn static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/api-<hash> -> target/<profile>/libiscc_ffi.a
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libiscc_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(lib) = static_lib() else {
        eprintln!("libiscc_ffi.a not found next to the test binary; C link check skipped");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; C link check skipped");
        return;
    }
    let d = tempfile::tempdir().unwrap();
    let exe = d.path().join("smoke");
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(Path::new(&exe)).output().unwrap();
    assert!(run.status.success(), "exit {:?}: {}", run.status.code(), String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
