//! C ABI over `nslag-core`.
//!
//! A simulation is an opaque `NslagSim` handle created from configuration
//! text or a configuration file and released with `nslag_sim_free`. Every
//! function returns an `NslagStatus`; on failure a message is available from
//! `nslag_last_error_message` on the calling thread. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::time::Instant;

use nslag_core::diagnostics::entropy_roots;
use nslag_core::harness::{load_config, parse_config, Simulation, Thresholds};
use nslag_core::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NslagStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    DomainError = 4,
    StepFailure = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque simulation handle.
pub struct NslagSim {
    sim: Simulation,
    started: Instant,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NslagEnergy {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub cum_dissipation: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NslagBounds {
    pub t: f64,
    pub vmin: f64,
    pub vmax: f64,
    pub thmin: f64,
    pub thmax: f64,
    pub ninf_u: f64,
    pub n2_u: f64,
    pub gradient_l2: f64,
    pub farfield_dev: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> NslagStatus {
    match err {
        Error::Config(_) | Error::Parse { .. } => NslagStatus::InvalidConfig,
        Error::Domain(_) | Error::Diagnostic(_) => NslagStatus::DomainError,
        Error::Step(_) | Error::RunFailed { .. } => NslagStatus::StepFailure,
        Error::Io { .. } => NslagStatus::Io,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (NslagStatus, String)>) -> NslagStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NslagStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            NslagStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (NslagStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (NslagStatus, String) {
    (NslagStatus::NullArgument, format!("{name} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (NslagStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (NslagStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn sim_ref<'a>(sim: *const NslagSim) -> Result<&'a NslagSim, (NslagStatus, String)> {
    sim.as_ref().ok_or_else(|| null("sim"))
}

unsafe fn sim_mut<'a>(sim: *mut NslagSim) -> Result<&'a mut NslagSim, (NslagStatus, String)> {
    sim.as_mut().ok_or_else(|| null("sim"))
}

unsafe fn store_sim(out: *mut *mut NslagSim, sim: Simulation) {
    *out = Box::into_raw(Box::new(NslagSim {
        sim,
        started: Instant::now(),
    }));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nslag_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nslag_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a simulation from `key = value` configuration text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nslag_sim_from_config_str(
    text: *const c_char,
    out: *mut *mut NslagSim,
) -> NslagStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = read_str(text, "text")?;
        let cfg = parse_config(text, Path::new("<string>")).map_err(core_err)?;
        let sim = Simulation::new(cfg).map_err(core_err)?;
        store_sim(out, sim);
        Ok(())
    })
}

/// Creates a simulation from a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nslag_sim_from_config_file(
    path: *const c_char,
    out: *mut *mut NslagSim,
) -> NslagStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let path = read_str(path, "path")?;
        let cfg = load_config(path).map_err(core_err)?;
        let sim = Simulation::new(cfg).map_err(core_err)?;
        store_sim(out, sim);
        Ok(())
    })
}

/// Releases a handle; NULL is ignored.
///
/// # Safety
/// `sim` must come from a constructor of this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn nslag_sim_free(sim: *mut NslagSim) {
    if !sim.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(sim))));
    }
}

/// Advances to `min(t, t_final)`. On a step failure the handle keeps the last
/// accepted state.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nslag_sim_advance(sim: *mut NslagSim, t: f64) -> NslagStatus {
    guard(|| {
        let s = sim_mut(sim)?;
        if t.is_nan() {
            return Err((NslagStatus::DomainError, "target time is NaN".into()));
        }
        s.sim.advance_to(t).map_err(core_err)
    })
}

/// Advances to the configured final time.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nslag_sim_run_to_end(sim: *mut NslagSim) -> NslagStatus {
    guard(|| sim_mut(sim)?.sim.run_to_end().map_err(core_err))
}

/// # Safety
/// `sim` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nslag_sim_time(sim: *const NslagSim, out: *mut f64) -> NslagStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = s.sim.state().t;
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nslag_sim_num_cells(sim: *const NslagSim, out: *mut usize) -> NslagStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = s.sim.grid().n_cells;
        Ok(())
    })
}

/// Copies the fields into caller buffers. `v` and `theta` hold `n_cells`
/// values, `u` holds `n_cells + 1`; `n_cells` must match the grid.
///
/// # Safety
/// `sim` must be a live handle and each buffer valid for its length.
#[no_mangle]
pub unsafe extern "C" fn nslag_sim_copy_state(
    sim: *const NslagSim,
    v: *mut f64,
    theta: *mut f64,
    u: *mut f64,
    n_cells: usize,
) -> NslagStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        if v.is_null() || theta.is_null() || u.is_null() {
            return Err(null("field buffer"));
        }
        let st = s.sim.state();
        let n = st.v.len();
        if n_cells != n {
            return Err((
                NslagStatus::BufferTooSmall,
                format!("buffers sized for {n_cells} cells, grid has {n}"),
            ));
        }
        ptr::copy_nonoverlapping(st.v.as_ptr(), v, n);
        ptr::copy_nonoverlapping(st.theta.as_ptr(), theta, n);
        ptr::copy_nonoverlapping(st.u.as_ptr(), u, n + 1);
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nslag_sim_energy(
    sim: *const NslagSim,
    out: *mut NslagEnergy,
) -> NslagStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let e = s.sim.energy();
        *out = NslagEnergy {
            t: e.t,
            energy: e.energy,
            dissipation: e.dissipation,
            cum_dissipation: e.cum_dissipation,
        };
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nslag_sim_bounds(
    sim: *const NslagSim,
    out: *mut NslagBounds,
) -> NslagStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let b = s.sim.bounds();
        *out = NslagBounds {
            t: b.t,
            vmin: b.vmin,
            vmax: b.vmax,
            thmin: b.thmin,
            thmax: b.thmax,
            ninf_u: b.ninf_u,
            n2_u: b.n2_u,
            gradient_l2: b.gradient_norm(),
            farfield_dev: b.farfield_dev,
        };
        Ok(())
    })
}

/// Writes the run report as JSON into a new string released with
/// `nslag_string_free`. The run must have reached its final time.
///
/// # Safety
/// `sim` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nslag_sim_report_json(
    sim: *const NslagSim,
    out: *mut *mut c_char,
) -> NslagStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if !s.sim.is_finished() {
            return Err((
                NslagStatus::DomainError,
                "report requested before t_final".into(),
            ));
        }
        let report = s
            .sim
            .report(&Thresholds::default(), s.started.elapsed().as_secs_f64())
            .map_err(core_err)?;
        let text = serde_json::to_string(&report)
            .map_err(|e| (NslagStatus::DomainError, e.to_string()))?;
        let c = CString::new(text).map_err(|e| (NslagStatus::DomainError, e.to_string()))?;
        *out = c.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn nslag_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Both roots of `y - ln y - 1 = e0`.
///
/// # Safety
/// `alpha1` and `alpha2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nslag_entropy_roots(
    e0: f64,
    alpha1: *mut f64,
    alpha2: *mut f64,
) -> NslagStatus {
    guard(|| {
        if alpha1.is_null() || alpha2.is_null() {
            return Err(null("root output"));
        }
        let band = entropy_roots(e0).map_err(core_err)?;
        *alpha1 = band.alpha1;
        *alpha2 = band.alpha2;
        Ok(())
    })
}
