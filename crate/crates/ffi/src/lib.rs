//! C ABI over the driftspec toolkit.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `*_free` function. Every fallible call returns a [`DsStatus`];
//! the message of the most recent failure on the calling thread is available
//! from [`ds_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use driftspec::bounds::{evaluate, CheckContext, CheckId, CheckStatus, GeometricConstants, Tolerance};
use driftspec::config::Config;
use driftspec::scenario::{bundled, run_scenario, Scenario};
use driftspec::spectra::{IndexBase, Spectrum};
use driftspec::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    SpectrumTooShort = 4,
    IndexBase = 5,
    UnknownCheck = 6,
    MissingConstant = 7,
    Config = 8,
    Parse = 9,
    Io = 10,
    Geometry = 11,
    Numerical = 12,
    BufferTooSmall = 13,
    Panic = 99,
}

/// Verdict of one inequality.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsCheckStatus {
    Holds = 0,
    Fails = 1,
    NotApplicable = 2,
}

/// Eigenvalue numbering convention.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsIndexBase {
    /// `Λ₁ ≤ Λ₂ ≤ …`, all positive.
    Dirichlet = 0,
    /// `0 = Λ̄₀ < Λ̄₁ ≤ …`.
    Closed = 1,
}

/// Numbers of one evaluated check.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsCheckResult {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    /// Negative margin tolerated before the check fails.
    pub allowance: f64,
    pub status: DsCheckStatus,
}

/// Opaque eigenvalue list.
pub struct DsSpectrum(Spectrum);

/// Opaque geometric constants.
pub struct DsConstants(GeometricConstants);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DsStatus {
    match err {
        Error::InvalidArgument(_) => DsStatus::InvalidArgument,
        Error::SpectrumTooShort { .. } => DsStatus::SpectrumTooShort,
        Error::IndexBase { .. } => DsStatus::IndexBase,
        Error::UnknownCheck(_) => DsStatus::UnknownCheck,
        Error::MissingConstant { .. } => DsStatus::MissingConstant,
        Error::Config(_) => DsStatus::Config,
        Error::Parse(_) => DsStatus::Parse,
        Error::Io(_) => DsStatus::Io,
        Error::DegenerateImmersion { .. } | Error::IntegrationFailure(_) | Error::DegenerateCell { .. } => {
            DsStatus::Geometry
        }
        Error::Definiteness(_) | Error::Convergence { .. } => DsStatus::Numerical,
        Error::Stage { source, .. } => status_of(source),
    }
}

/// Failure with its message, raised inside a guarded body.
struct Failure(DsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Run `body`, converting errors and panics into a status plus a stored message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            DsStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(DsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn into_c_string(text: String) -> Result<*mut c_char, Failure> {
    CString::new(text)
        .map(CString::into_raw)
        .map_err(|_| Failure(DsStatus::InvalidArgument, "output contains a nul byte".into()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn ds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null if none occurred.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ds_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Build a spectrum from `len` multiplicity-expanded values in any order.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_spectrum_new(
    values: *const f64,
    len: usize,
    base: DsIndexBase,
    out: *mut *mut DsSpectrum,
) -> DsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        if values.is_null() {
            return Err(null("values"));
        }
        let values = std::slice::from_raw_parts(values, len).to_vec();
        let base = match base {
            DsIndexBase::Dirichlet => IndexBase::DirichletFromOne,
            DsIndexBase::Closed => IndexBase::ClosedFromZero,
        };
        let s = Spectrum::from_expanded(values, base, "ffi")?;
        *out = Box::into_raw(Box::new(DsSpectrum(s)));
        Ok(())
    })
}

/// Parse a spectrum from its JSON form.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_spectrum_from_json(json: *const c_char, out: *mut *mut DsSpectrum) -> DsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let s = Spectrum::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(DsSpectrum(s)));
        Ok(())
    })
}

/// Number of eigenvalues counted with multiplicity.
///
/// # Safety
/// `spectrum` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn ds_spectrum_len(spectrum: *const DsSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.0.expanded().len())
}

/// Copy the expanded values into `buffer`. `written` receives the full length
/// even when the buffer is too small.
///
/// # Safety
/// `buffer` must hold `capacity` doubles; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_spectrum_values(
    spectrum: *const DsSpectrum,
    buffer: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> DsStatus {
    guard(|| {
        let s = handle(spectrum, "spectrum")?;
        let written = out_arg(written, "written")?;
        let values = s.0.expanded();
        *written = values.len();
        if values.len() > capacity {
            return Err(Failure(
                DsStatus::BufferTooSmall,
                format!("{} values do not fit in {capacity}", values.len()),
            ));
        }
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        std::ptr::copy_nonoverlapping(values.as_ptr(), buffer, values.len());
        Ok(())
    })
}

/// Release a spectrum handle. Null is ignored.
///
/// # Safety
/// `spectrum` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ds_spectrum_free(spectrum: *mut DsSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Constants of an `n`-dimensional problem with curvature term `c1` and drift bound `d1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_constants_new(n: usize, c1: f64, d1: f64, out: *mut *mut DsConstants) -> DsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let gc = GeometricConstants::new(n, c1, d1);
        gc.validate()?;
        *out = Box::into_raw(Box::new(DsConstants(gc)));
        Ok(())
    })
}

/// Parse constants from a TOML table, including the optional fields.
///
/// # Safety
/// `toml` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_constants_from_toml(toml: *const c_char, out: *mut *mut DsConstants) -> DsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let gc = GeometricConstants::from_toml_str(str_arg(toml, "toml")?)?;
        *out = Box::into_raw(Box::new(DsConstants(gc)));
        Ok(())
    })
}

/// Release a constants handle. Null is ignored.
///
/// # Safety
/// `constants` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ds_constants_free(constants: *mut DsConstants) {
    if !constants.is_null() {
        drop(Box::from_raw(constants));
    }
}

/// Evaluate check `id` at `index` (`k` or `j`); pass a negative index for
/// checks without one.
///
/// # Safety
/// Handles must be live, `id` nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_check(
    spectrum: *const DsSpectrum,
    constants: *const DsConstants,
    id: *const c_char,
    index: i64,
    out: *mut DsCheckResult,
) -> DsStatus {
    guard(|| {
        let s = handle(spectrum, "spectrum")?;
        let gc = handle(constants, "constants")?;
        let out = out_arg(out, "out")?;
        let id: CheckId = str_arg(id, "id")?.parse()?;
        let index = usize::try_from(index).ok();
        let r = evaluate(
            id,
            &s.0,
            &gc.0,
            index,
            &CheckContext {
                tolerance: Tolerance::analytic(),
                ..CheckContext::default()
            },
        )?;
        *out = DsCheckResult {
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            allowance: r.allowance,
            status: match r.status {
                CheckStatus::Holds => DsCheckStatus::Holds,
                CheckStatus::Fails => DsCheckStatus::Fails,
                CheckStatus::NotApplicable => DsCheckStatus::NotApplicable,
            },
        };
        Ok(())
    })
}

unsafe fn run_to_json(scenario: Scenario, config: *const c_char, out: *mut *mut c_char) -> Result<(), Failure> {
    let config = if config.is_null() {
        Config::default()
    } else {
        Config::from_toml_str(str_arg(config, "config")?)?
    };
    let json = run_scenario(&scenario, &config)?.to_json()?;
    *out = into_c_string(json)?;
    Ok(())
}

/// Run a bundled scenario and return its JSON report. `config` is optional TOML.
/// Release the report with [`ds_string_free`].
///
/// # Safety
/// Strings must be nul-terminated (or null for `config`); `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_run_bundled(name: *const c_char, config: *const c_char, out: *mut *mut c_char) -> DsStatus {
    guard(|| {
        let slot = out_arg(out, "out")?;
        *slot = ptr::null_mut();
        let scenario = bundled(str_arg(name, "name")?)?;
        run_to_json(scenario, config, out)
    })
}

/// Run a scenario given as TOML text and return its JSON report.
///
/// # Safety
/// Strings must be nul-terminated (or null for `config`); `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_run_scenario(
    scenario_toml: *const c_char,
    config: *const c_char,
    out: *mut *mut c_char,
) -> DsStatus {
    guard(|| {
        let slot = out_arg(out, "out")?;
        *slot = ptr::null_mut();
        let scenario = Scenario::from_toml_str(str_arg(scenario_toml, "scenario")?)?;
        run_to_json(scenario, config, out)
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ds_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
