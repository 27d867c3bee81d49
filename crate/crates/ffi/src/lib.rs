//! C ABI for `diffusion-entropy`.
//!
//! Models and spectra are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns a
//! [`DeStatus`]; on failure `de_last_error_message` describes the error
//! raised on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use diffusion_entropy::config::{Model, ModelConfig};
use diffusion_entropy::measures::{power_divergence, renyi_divergence, MeasureReport, Method};
use diffusion_entropy::quadrature::Tolerance;
use diffusion_entropy::spectrum::{compute_spectrum, RenyiSource, RowFlag, SpectrumTable};
use diffusion_entropy::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Domain = 4,
    Divergent = 5,
    NonConvergence = 6,
    SupportMismatch = 7,
    Unsupported = 8,
    NotErgodic = 9,
    Io = 10,
    Numeric = 11,
    OutOfRange = 12,
    Panic = 13,
}

/// How a value was obtained.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeMethod {
    Closed = 0,
    Quadrature = 1,
    FiniteDifference = 2,
}

/// Why a spectrum row has no value.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeRowFlag {
    None = 0,
    Divergent = 1,
    Error = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeMeasure {
    pub value: f64,
    pub abs_err_est: f64,
    pub method: DeMethod,
}

/// Opaque model handle.
pub struct DeModel {
    model: Model,
    tol: Tolerance,
}

/// Opaque spectrum handle.
pub struct DeSpectrum {
    table: SpectrumTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DeStatus {
    match e {
        Error::Domain(_) => DeStatus::Domain,
        Error::Divergent(_) => DeStatus::Divergent,
        Error::NonConvergence { .. } => DeStatus::NonConvergence,
        Error::NanIntegrand(_) | Error::Overflow(_) => DeStatus::Numeric,
        Error::SupportMismatch(_) => DeStatus::SupportMismatch,
        Error::Unsupported(_) => DeStatus::Unsupported,
        Error::NotErgodic(_) => DeStatus::NotErgodic,
        Error::Config(_) => DeStatus::Config,
        Error::Io(_) => DeStatus::Io,
    }
}

fn fail(status: DeStatus, msg: impl Into<String>) -> DeStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), DeStatus>) -> DeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DeStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(DeStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: diffusion_entropy::Result<T>) -> Result<T, DeStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, DeStatus> {
    if s.is_null() {
        return Err(fail(DeStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(DeStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, DeStatus> {
    p.as_ref().ok_or_else(|| fail(DeStatus::NullPointer, "handle is null"))
}

fn check_out<T>(p: *mut T) -> Result<(), DeStatus> {
    if p.is_null() {
        Err(fail(DeStatus::NullPointer, "output pointer is null"))
    } else {
        Ok(())
    }
}

fn measure(r: MeasureReport) -> DeMeasure {
    let method = match r.method {
        Method::Closed => DeMethod::Closed,
        Method::Quadrature => DeMethod::Quadrature,
        Method::FiniteDifference => DeMethod::FiniteDifference,
    };
    DeMeasure { value: r.value, abs_err_est: r.abs_err_est, method }
}

fn default_tol() -> Tolerance {
    Tolerance::new(1e-13, 1e-11)
}

fn new_model(cfg: ModelConfig, out: *mut *mut DeModel) -> Result<(), DeStatus> {
    let tol = default_tol();
    let model = lift(cfg.build(tol))?;
    // SAFETY: `out` was checked non-null by the caller.
    unsafe { *out = Box::into_raw(Box::new(DeModel { model, tol })) };
    Ok(())
}

/// Builds a model from a TOML configuration document.
///
/// # Safety
/// `toml` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn de_model_from_toml(toml: *const c_char, out: *mut *mut DeModel) -> DeStatus {
    guard(|| {
        check_out(out)?;
        let cfg = lift(ModelConfig::from_toml(read_str(toml)?))?;
        new_model(cfg, out)
    })
}

/// Builds a model from a TOML configuration file.
///
/// # Safety
/// `path` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn de_model_from_file(path: *const c_char, out: *mut *mut DeModel) -> DeStatus {
    guard(|| {
        check_out(out)?;
        let cfg = lift(ModelConfig::from_file(Path::new(read_str(path)?)))?;
        new_model(cfg, out)
    })
}

/// Builds a named family from parallel arrays of parameter names and
/// values; unspecified parameters take their defaults.
///
/// # Safety
/// `family` must be a valid string, `names` and `values` arrays of length
/// `n` (either may be null when `n` is 0), and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn de_model_from_params(
    family: *const c_char,
    names: *const *const c_char,
    values: *const f64,
    n: usize,
    out: *mut *mut DeModel,
) -> DeStatus {
    guard(|| {
        check_out(out)?;
        let mut cfg = ModelConfig::new(lift(read_str(family)?.parse())?);
        if n > 0 {
            if names.is_null() || values.is_null() {
                return Err(fail(DeStatus::NullPointer, "parameter arrays are null"));
            }
            for i in 0..n {
                let name = read_str(*names.add(i))?;
                cfg = cfg.with_param(name, *values.add(i));
            }
        }
        new_model(cfg, out)
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from a `de_model_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn de_model_free(model: *mut DeModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Sets the relative quadrature tolerance used by later calls on `model`.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn de_model_set_tolerance(model: *mut DeModel, rel: f64) -> DeStatus {
    guard(|| {
        let m = model.as_mut().ok_or_else(|| fail(DeStatus::NullPointer, "handle is null"))?;
        if !(rel > 0.0 && rel < 1.0) {
            return Err(fail(DeStatus::Domain, format!("tolerance must lie in (0, 1), got {rel}")));
        }
        m.tol = Tolerance::new(rel * 1e-2, rel);
        Ok(())
    })
}

/// `log f(x)` of the model's invariant density.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn de_model_log_density(model: *const DeModel, x: f64, out: *mut f64) -> DeStatus {
    guard(|| {
        check_out(out)?;
        let m = borrow(model)?;
        let f = lift(m.model.density())?;
        *out = f.log_density(x);
        Ok(())
    })
}

/// Rényi information of order `alpha` (`alpha = 1` gives the Shannon entropy).
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn de_model_renyi(model: *const DeModel, alpha: f64, out: *mut DeMeasure) -> DeStatus {
    guard(|| {
        check_out(out)?;
        let m = borrow(model)?;
        *out = measure(lift(m.model.spectrum_value(alpha, m.tol))?);
        Ok(())
    })
}

/// Shannon entropy.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn de_model_shannon(model: *const DeModel, out: *mut DeMeasure) -> DeStatus {
    guard(|| {
        check_out(out)?;
        let m = borrow(model)?;
        *out = measure(lift(m.model.shannon(m.tol))?);
        Ok(())
    })
}

/// Song measure `Var(log f(X))`.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn de_model_song(model: *const DeModel, out: *mut DeMeasure) -> DeStatus {
    guard(|| {
        check_out(out)?;
        let m = borrow(model)?;
        *out = measure(lift(m.model.song(m.tol))?);
        Ok(())
    })
}

/// Rényi divergence `D_α(f, g)` and power divergence `Ψ_α(f, g)`.
/// Either output may be null.
///
/// # Safety
/// `f` and `g` must be live handles; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn de_divergence(
    f: *const DeModel,
    g: *const DeModel,
    alpha: f64,
    renyi_out: *mut f64,
    power_out: *mut f64,
) -> DeStatus {
    guard(|| {
        let (f, g) = (borrow(f)?, borrow(g)?);
        let (df, dg) = (lift(f.model.density())?, lift(g.model.density())?);
        if !renyi_out.is_null() {
            *renyi_out = lift(renyi_divergence(&df, &dg, alpha, f.tol))?.value;
        }
        if !power_out.is_null() {
            *power_out = lift(power_divergence(&df, &dg, alpha, f.tol))?.value;
        }
        Ok(())
    })
}

/// Rényi spectrum at `n` strictly increasing orders plus the Shannon row.
///
/// # Safety
/// `model` must be a live handle, `alphas` an array of length `n` and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn de_spectrum_compute(
    model: *const DeModel,
    alphas: *const f64,
    n: usize,
    out: *mut *mut DeSpectrum,
) -> DeStatus {
    guard(|| {
        check_out(out)?;
        let m = borrow(model)?;
        let grid: &[f64] = if n == 0 {
            &[]
        } else if alphas.is_null() {
            return Err(fail(DeStatus::NullPointer, "alphas is null"));
        } else {
            std::slice::from_raw_parts(alphas, n)
        };
        let table = lift(compute_spectrum(&m.model, grid, m.tol))?;
        *out = Box::into_raw(Box::new(DeSpectrum { table }));
        Ok(())
    })
}

/// Number of rows; 0 for null.
///
/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn de_spectrum_len(spectrum: *const DeSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.table.rows.len())
}

/// Row `i`: its order, and either its value (`flag` = none) or the reason
/// it has none, in which case `value` is NaN.
///
/// # Safety
/// `spectrum` must be a live handle and the outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn de_spectrum_row(
    spectrum: *const DeSpectrum,
    i: usize,
    alpha: *mut f64,
    value: *mut DeMeasure,
    flag: *mut DeRowFlag,
) -> DeStatus {
    guard(|| {
        check_out(alpha)?;
        check_out(value)?;
        check_out(flag)?;
        let s = borrow(spectrum)?;
        let row = s
            .table
            .rows
            .get(i)
            .ok_or_else(|| fail(DeStatus::OutOfRange, format!("row {i} of {}", s.table.rows.len())))?;
        *alpha = row.alpha;
        *flag = match row.flag {
            None => DeRowFlag::None,
            Some(RowFlag::Divergent) => DeRowFlag::Divergent,
            Some(RowFlag::Error) => DeRowFlag::Error,
        };
        *value = match (row.renyi, row.method) {
            (Some(v), Some(m)) => measure(MeasureReport { alpha: Some(row.alpha), value: v, method: m, abs_err_est: row.err.unwrap_or(0.0) }),
            _ => DeMeasure { value: f64::NAN, abs_err_est: f64::NAN, method: DeMethod::Quadrature },
        };
        Ok(())
    })
}

/// Releases a spectrum. Null is ignored.
///
/// # Safety
/// `spectrum` must come from `de_spectrum_compute` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn de_spectrum_free(spectrum: *mut DeSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Message for the last failed call on this thread, or null if the last
/// call succeeded. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn de_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn de_status_name(status: DeStatus) -> *const c_char {
    let s: &'static CStr = match status {
        DeStatus::Ok => c"ok",
        DeStatus::NullPointer => c"null_pointer",
        DeStatus::InvalidUtf8 => c"invalid_utf8",
        DeStatus::Config => c"config",
        DeStatus::Domain => c"domain",
        DeStatus::Divergent => c"divergent",
        DeStatus::NonConvergence => c"non_convergence",
        DeStatus::SupportMismatch => c"support_mismatch",
        DeStatus::Unsupported => c"unsupported",
        DeStatus::NotErgodic => c"not_ergodic",
        DeStatus::Io => c"io",
        DeStatus::Numeric => c"numeric",
        DeStatus::OutOfRange => c"out_of_range",
        DeStatus::Panic => c"panic",
    };
    s.as_ptr()
}
