//! C ABI over the rlattice solvers.
//!
//! Every fallible call returns an [`RlStatus`] and writes its result through
//! an out pointer. On failure the message is available from
//! [`rl_last_error`] on the same thread. Strings returned by the library
//! must be released with [`rl_string_free`], handles with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rlattice::pca::Band;
use rlattice::{cli, lattice, Error, ErrorKind, LatticeModel, ModeSolution};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    /// Input does not parse or is not a valid model.
    Schema = 1,
    /// A solver failed on valid input.
    Solver = 2,
    Io = 3,
    Internal = 4,
    /// A required pointer argument was null.
    NullArgument = 5,
    /// The library panicked; the handle arguments should be considered lost.
    Panic = 6,
}

/// Parsed and validated lattice.
pub struct RlLattice {
    model: LatticeModel,
}

/// Eigenmodes of a lattice, ascending in frequency.
pub struct RlModes {
    solution: ModeSolution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> RlStatus {
    set_error(&e.message);
    match e.kind {
        ErrorKind::Schema => RlStatus::Schema,
        ErrorKind::Solver => RlStatus::Solver,
        ErrorKind::Io => RlStatus::Io,
        ErrorKind::Internal => RlStatus::Internal,
    }
}

fn null(name: &str) -> RlStatus {
    set_error(&format!("{name} is null"));
    RlStatus::NullArgument
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), RlStatus>) -> RlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RlStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&msg);
            RlStatus::Panic
        }
    }
}

unsafe fn input<'a>(p: *const c_char, name: &str) -> Result<&'a str, RlStatus> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(Error::schema(format!("{name} is not UTF-8"))))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), RlStatus> {
    let c = CString::new(s).map_err(|_| fail(Error::new(ErrorKind::Internal, "output contains a nul byte")))?;
    *out = c.into_raw();
    Ok(())
}

fn check_out<T>(out: *mut T, name: &str) -> Result<(), RlStatus> {
    if out.is_null() {
        Err(null(name))
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next library call on this thread.
#[no_mangle]
pub extern "C" fn rl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates lattice JSON.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_lattice_from_json(json: *const c_char, out: *mut *mut RlLattice) -> RlStatus {
    guard(|| {
        check_out(out, "out")?;
        let text = input(json, "json")?;
        let model = LatticeModel::from_json(text).map_err(|e| fail(e.into()))?;
        model.validate().map_err(|e| fail(e.into()))?;
        *out = Box::into_raw(Box::new(RlLattice { model }));
        Ok(())
    })
}

/// # Safety
/// `l` must come from [`rl_lattice_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rl_lattice_free(l: *mut RlLattice) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Number of resonating posts; 0 for a null handle.
///
/// # Safety
/// `l` must be null or a live lattice handle.
#[no_mangle]
pub unsafe extern "C" fn rl_lattice_active_count(l: *const RlLattice) -> usize {
    l.as_ref().map_or(0, |l| l.model.active_count())
}

/// Solves the eigenmodes of a lattice.
///
/// # Safety
/// `l` must be a live lattice handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_modes_solve(l: *const RlLattice, out: *mut *mut RlModes) -> RlStatus {
    guard(|| {
        check_out(out, "out")?;
        let l = l.as_ref().ok_or_else(|| null("lattice"))?;
        let solution = lattice::solve_modes(&l.model).map_err(|e| fail(e.into()))?;
        *out = Box::into_raw(Box::new(RlModes { solution }));
        Ok(())
    })
}

/// # Safety
/// `m` must come from [`rl_modes_solve`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rl_modes_free(m: *mut RlModes) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be null or a live modes handle.
#[no_mangle]
pub unsafe extern "C" fn rl_modes_count(m: *const RlModes) -> usize {
    m.as_ref().map_or(0, |m| m.solution.len())
}

/// Frequency of mode `index` in Hz.
///
/// # Safety
/// `m` must be a live modes handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_modes_frequency(m: *const RlModes, index: usize, out: *mut f64) -> RlStatus {
    guard(|| {
        check_out(out, "out")?;
        let m = m.as_ref().ok_or_else(|| null("modes"))?;
        let f = m.solution.frequencies.get(index).ok_or_else(|| {
            fail(Error::schema(format!("mode {index} out of range 0..{}", m.solution.len())))
        })?;
        *out = *f;
        Ok(())
    })
}

/// Unit-norm current amplitude of `post_id` in mode `index`.
///
/// # Safety
/// `m` must be a live modes handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_modes_amplitude(m: *const RlModes, index: usize, post_id: u32, out: *mut f64) -> RlStatus {
    guard(|| {
        check_out(out, "out")?;
        let m = m.as_ref().ok_or_else(|| null("modes"))?;
        if index >= m.solution.len() {
            return Err(fail(Error::schema(format!("mode {index} out of range 0..{}", m.solution.len()))));
        }
        let slot = m
            .solution
            .slot_of(post_id)
            .ok_or_else(|| fail(Error::schema(format!("post {post_id} is not an active post"))))?;
        *out = m.solution.unit_vector(index)[slot];
        Ok(())
    })
}

/// Mode classification report JSON, as written by `rlattice modes`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_modes_report(json: *const c_char, out: *mut *mut c_char) -> RlStatus {
    guard(|| {
        check_out(out, "out")?;
        let report = cli::modes_report(input(json, "json")?, &Default::default()).map_err(fail)?;
        put_string(out, report)
    })
}

/// Gap sweep: CSV into `out_csv`, sidecar JSON into `out_sidecar`.
///
/// # Safety
/// Inputs must be nul-terminated strings; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_sweep(
    lattice_json: *const c_char,
    spec_json: *const c_char,
    out_csv: *mut *mut c_char,
    out_sidecar: *mut *mut c_char,
) -> RlStatus {
    guard(|| {
        check_out(out_csv, "out_csv")?;
        check_out(out_sidecar, "out_sidecar")?;
        let (csv, sidecar) = cli::sweep_outputs(
            input(lattice_json, "lattice_json")?,
            input(spec_json, "spec_json")?,
            None,
            rlattice::tuning::DEFAULT_CROSSING_TOL,
        )
        .map_err(fail)?;
        put_string(out_csv, csv)?;
        put_string(out_sidecar, sidecar)
    })
}

/// Phonon occupation CSV for a cooling request.
///
/// # Safety
/// `request_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_cool(request_json: *const c_char, out: *mut *mut c_char) -> RlStatus {
    guard(|| {
        check_out(out, "out")?;
        let csv = cli::cool_csv(input(request_json, "request_json")?).map_err(fail)?;
        put_string(out, csv)
    })
}

/// Transmission spectrum CSV of a grid over `count` points in `[lo_hz, hi_hz]`.
///
/// # Safety
/// `grid_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_pca_spectrum(
    grid_json: *const c_char,
    lo_hz: f64,
    hi_hz: f64,
    count: usize,
    out: *mut *mut c_char,
) -> RlStatus {
    guard(|| {
        check_out(out, "out")?;
        let band = Band::new(lo_hz, hi_hz, count).map_err(|e| fail(e.into()))?;
        let csv = cli::pca_spectrum_csv(input(grid_json, "grid_json")?, &band).map_err(fail)?;
        put_string(out, csv)
    })
}

/// Field map JSON at `f_hz`; a non-positive `f_hz` selects the bare post
/// resonance.
///
/// # Safety
/// `grid_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_pca_field(grid_json: *const c_char, f_hz: f64, out: *mut *mut c_char) -> RlStatus {
    guard(|| {
        check_out(out, "out")?;
        let f = (f_hz > 0.0).then_some(f_hz);
        let json = cli::pca_field_json(input(grid_json, "grid_json")?, f).map_err(fail)?;
        put_string(out, json)
    })
}
