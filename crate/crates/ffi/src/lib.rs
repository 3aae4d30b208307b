//! C ABI over the `iscc` toolkit.
//!
//! Scenarios and evaluation results are opaque handles owned by the caller
//! and released with the matching `*_free` function. Every fallible call
//! returns an [`IsccStatus`]; on failure a message for the calling thread is
//! available from [`iscc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use iscc::generator::{generate_scenario, GeneratorParams};
use iscc::io::{load_scenario, save_scenario};
use iscc::optimizer::{evaluate, pso_optimize, PsoConfig};
use iscc::{Error, EvaluationResult, NetworkScenario, SubframeAllocation};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsccStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    InvalidScenario = 3,
    Infeasible = 4,
    BudgetExceeded = 5,
    Io = 6,
    Parse = 7,
    Panic = 8,
}

/// Opaque network scenario.
pub struct IsccScenario(NetworkScenario);

/// Opaque evaluation result with the allocation that produced it.
pub struct IsccResult {
    allocation: SubframeAllocation,
    result: EvaluationResult,
}

/// PSO settings passed by value. Start from [`iscc_pso_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IsccPsoConfig {
    pub population: usize,
    pub max_iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub velocity_clamp: f64,
    pub seed: u64,
}

impl From<IsccPsoConfig> for PsoConfig {
    fn from(c: IsccPsoConfig) -> Self {
        PsoConfig {
            population: c.population,
            max_iterations: c.max_iterations,
            inertia: c.inertia,
            cognitive: c.cognitive,
            social: c.social,
            velocity_clamp: c.velocity_clamp,
            seed: c.seed,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> IsccStatus {
    match e {
        Error::InvalidInput(_) | Error::RatioOutOfRange { .. } => IsccStatus::InvalidInput,
        Error::InvalidScenario(_) | Error::UnknownModelKind(_) | Error::MissingGain(_) => {
            IsccStatus::InvalidScenario
        }
        Error::InfeasibleAllocation(_) => IsccStatus::Infeasible,
        Error::BudgetExceeded { .. } => IsccStatus::BudgetExceeded,
        Error::Io { .. } | Error::EmptyResults(_) => IsccStatus::Io,
        Error::Parse(_) => IsccStatus::Parse,
    }
}

struct Fail(IsccStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(IsccStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, records any error or panic, and maps it to a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> IsccStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            IsccStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            IsccStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(IsccStatus::InvalidInput, format!("`{what}` is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn scenario_arg<'a>(p: *const IsccScenario) -> Result<&'a NetworkScenario, Fail> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("scenario"))
}

/// Message for the most recent call on this thread if it failed, otherwise
/// NULL. Valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn iscc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn iscc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn iscc_pso_config_default() -> IsccPsoConfig {
    let d = PsoConfig::default();
    IsccPsoConfig {
        population: d.population,
        max_iterations: d.max_iterations,
        inertia: d.inertia,
        cognitive: d.cognitive,
        social: d.social,
        velocity_clamp: d.velocity_clamp,
        seed: d.seed,
    }
}

/// Generates a scenario. `overrides_toml` may be NULL for the defaults or a
/// TOML fragment such as `"num_bs = 5\nnum_sues = 10"`.
///
/// # Safety
/// `overrides_toml` is NULL or a valid NUL-terminated string; `out` is a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iscc_scenario_generate(
    overrides_toml: *const c_char,
    seed: u64,
    out: *mut *mut IsccScenario,
) -> IsccStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let params = if overrides_toml.is_null() {
            GeneratorParams::default()
        } else {
            let text = str_arg(overrides_toml, "overrides_toml")?;
            toml::from_str::<GeneratorParams>(text).map_err(|e| Fail(IsccStatus::Parse, e.to_string()))?
        };
        let s = generate_scenario(&params, seed)?;
        *out = Box::into_raw(Box::new(IsccScenario(s)));
        Ok(())
    })
}

/// # Safety
/// `path` is a valid NUL-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iscc_scenario_load(path: *const c_char, out: *mut *mut IsccScenario) -> IsccStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let (s, _) = load_scenario(&PathBuf::from(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(IsccScenario(s)));
        Ok(())
    })
}

/// # Safety
/// `scenario` is a live handle; `path` is a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn iscc_scenario_save(scenario: *const IsccScenario, path: *const c_char) -> IsccStatus {
    guard(|| {
        let s = scenario_arg(scenario)?;
        save_scenario(&PathBuf::from(str_arg(path, "path")?), s, None)?;
        Ok(())
    })
}

/// # Safety
/// `scenario` is a live handle; the out pointers are valid.
#[no_mangle]
pub unsafe extern "C" fn iscc_scenario_counts(
    scenario: *const IsccScenario,
    num_bs: *mut usize,
    num_tues: *mut usize,
    num_sues: *mut usize,
) -> IsccStatus {
    guard(|| {
        let s = scenario_arg(scenario)?;
        *out_arg(num_bs, "num_bs")? = s.num_bs();
        *out_arg(num_tues, "num_tues")? = s.num_tues();
        *out_arg(num_sues, "num_sues")? = s.num_sues();
        Ok(())
    })
}

/// # Safety
/// `scenario` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iscc_scenario_free(scenario: *mut IsccScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Evaluates the allocation given by the communication fractions; sensing
/// takes the remainder of each frame.
///
/// # Safety
/// `scenario` is a live handle, `tau_ub` points to `num_bs` doubles (may be
/// NULL when `num_bs` is 0) and `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iscc_evaluate(
    scenario: *const IsccScenario,
    tau_ub: *const f64,
    num_bs: usize,
    tau_b: f64,
    tau_us: f64,
    eta: f64,
    out: *mut *mut IsccResult,
) -> IsccStatus {
    guard(|| {
        let s = scenario_arg(scenario)?;
        let out = out_arg(out, "out")?;
        let tau = if num_bs == 0 {
            Vec::new()
        } else if tau_ub.is_null() {
            return Err(null("tau_ub"));
        } else {
            std::slice::from_raw_parts(tau_ub, num_bs).to_vec()
        };
        let allocation = SubframeAllocation::from_comm(tau, tau_b, tau_us);
        let result = evaluate(s, &allocation, eta)?;
        *out = Box::into_raw(Box::new(IsccResult { allocation, result }));
        Ok(())
    })
}

/// Runs the PSO subframe allocation with optimal partitioning.
///
/// # Safety
/// `scenario` is a live handle, `config` is NULL (defaults) or valid, and
/// `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iscc_pso_optimize(
    scenario: *const IsccScenario,
    eta: f64,
    config: *const IsccPsoConfig,
    out: *mut *mut IsccResult,
) -> IsccStatus {
    guard(|| {
        let s = scenario_arg(scenario)?;
        let out = out_arg(out, "out")?;
        let cfg = config.as_ref().map_or_else(PsoConfig::default, |c| (*c).into());
        let (allocation, result, _) = pso_optimize(s, eta, &cfg)?;
        *out = Box::into_raw(Box::new(IsccResult { allocation, result }));
        Ok(())
    })
}

/// Total MI (bits), total delay (s) and utility. Any out pointer may be NULL.
///
/// # Safety
/// `result` is a live handle; non-NULL out pointers are valid.
#[no_mangle]
pub unsafe extern "C" fn iscc_result_summary(
    result: *const IsccResult,
    total_mi_bits: *mut f64,
    total_delay_s: *mut f64,
    utility: *mut f64,
) -> IsccStatus {
    guard(|| {
        let r = &result.as_ref().ok_or_else(|| null("result"))?.result;
        for (p, v) in [(total_mi_bits, r.total_mi_bits), (total_delay_s, r.total_delay_s), (utility, r.utility)] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Copies the allocation out. `tau_ub` must hold `num_bs` doubles, matching
/// the scenario; the satellite shares go to `sat` as `[tau_b, tau_us, theta_us]`.
///
/// # Safety
/// `result` is a live handle; `tau_ub` points to `num_bs` writable doubles
/// (may be NULL when `num_bs` is 0); `sat` points to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn iscc_result_allocation(
    result: *const IsccResult,
    tau_ub: *mut f64,
    num_bs: usize,
    sat: *mut f64,
) -> IsccStatus {
    guard(|| {
        let a = &result.as_ref().ok_or_else(|| null("result"))?.allocation;
        if num_bs != a.tau_ub.len() {
            return Err(Fail(
                IsccStatus::InvalidInput,
                format!("buffer holds {num_bs} BS entries, allocation has {}", a.tau_ub.len()),
            ));
        }
        if sat.is_null() {
            return Err(null("sat"));
        }
        if num_bs > 0 {
            if tau_ub.is_null() {
                return Err(null("tau_ub"));
            }
            std::slice::from_raw_parts_mut(tau_ub, num_bs).copy_from_slice(&a.tau_ub);
        }
        std::slice::from_raw_parts_mut(sat, 3).copy_from_slice(&[a.tau_b, a.tau_us, a.theta_us]);
        Ok(())
    })
}

/// # Safety
/// `result` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iscc_result_free(result: *mut IsccResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
