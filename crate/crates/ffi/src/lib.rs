//! C ABI for `rotkit`.
//!
//! Maps live behind an opaque [`RotkitMap`] handle. Every fallible call
//! returns a [`RotkitStatus`] and writes results through out-pointers; on
//! failure [`rotkit_last_error_message`] describes what went wrong on the
//! calling thread. Strings returned by the library must be released with
//! [`rotkit_string_free`], maps with [`rotkit_map_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use rotkit::fixed_point::{self, Method};
use rotkit::json::to_stable_json;
use rotkit::maps::Point;
use rotkit::{cli, rotativity, Error, MapSpec};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotkitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    NotFound = 5,
    NoConvergence = 6,
    WrongPointKind = 7,
    InvalidArgument = 8,
    NotApplicable = 9,
    Internal = 10,
    Panic = 11,
}

impl From<&Error> for RotkitStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) => RotkitStatus::Parse,
            e if e.is_validation() => RotkitStatus::Validation,
            Error::NotFound | Error::NoSignChange { .. } => RotkitStatus::NotFound,
            Error::NoConvergence { .. } => RotkitStatus::NoConvergence,
            Error::WrongPointKind => RotkitStatus::WrongPointKind,
            Error::InvalidRate(_) | Error::NotMonotone { .. } => RotkitStatus::InvalidArgument,
            Error::NotApplicable(_) => RotkitStatus::NotApplicable,
            _ => RotkitStatus::Internal,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotkitMethod {
    Picard = 0,
    Bisection = 1,
    Hybrid = 2,
}

impl From<Method> for RotkitMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Picard => RotkitMethod::Picard,
            Method::Bisection => RotkitMethod::Bisection,
            Method::Hybrid => RotkitMethod::Hybrid,
        }
    }
}

/// A located fixed point. The certificate fields are meaningful only when
/// `has_certificate` is true.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotkitFixedPoint {
    pub x_star: f64,
    pub residual: f64,
    pub iterations: u64,
    pub method: RotkitMethod,
    pub has_certificate: bool,
    pub rate: f64,
    pub tail_bound: f64,
}

/// Opaque map handle.
pub struct RotkitMap(MapSpec);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), RotkitStatus>) -> RotkitStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RotkitStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            RotkitStatus::Panic
        }
    }
}

fn fail(e: Error) -> RotkitStatus {
    set_last_error(e.to_string());
    RotkitStatus::from(&e)
}

fn null(what: &str) -> RotkitStatus {
    set_last_error(format!("{what} is null"));
    RotkitStatus::NullPointer
}

unsafe fn map_ref<'a>(map: *const RotkitMap) -> Result<&'a MapSpec, RotkitStatus> {
    // SAFETY: the caller passes a live handle from `rotkit_map_from_json` or null.
    unsafe { map.as_ref() }.map(|m| &m.0).ok_or_else(|| null("map"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), RotkitStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: non-null and, per the API contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

fn to_c_string(s: String) -> Result<*mut c_char, RotkitStatus> {
    CString::new(s).map(CString::into_raw).map_err(|e| {
        set_last_error(e.to_string());
        RotkitStatus::Internal
    })
}

/// Parses and validates a JSON map file held in `json`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rotkit_map_from_json(json: *const c_char, out: *mut *mut RotkitMap) -> RotkitStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        // SAFETY: non-null and NUL-terminated per the contract.
        let text = unsafe { CStr::from_ptr(json) }.to_str().map_err(|e| {
            set_last_error(e.to_string());
            RotkitStatus::InvalidUtf8
        })?;
        let m = cli::parse_map_str(text).map_err(fail)?;
        unsafe { write(out, Box::into_raw(Box::new(RotkitMap(m)))) }
    })
}

/// Releases a map. Null is ignored.
///
/// # Safety
/// `map` must come from `rotkit_map_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rotkit_map_free(map: *mut RotkitMap) {
    if !map.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(map) });
    }
}

/// The map's canonical JSON form.
///
/// # Safety
/// `map` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rotkit_map_to_json(map: *const RotkitMap, out: *mut *mut c_char) -> RotkitStatus {
    guard(|| {
        let m = unsafe { map_ref(map) }?;
        let s = to_c_string(to_stable_json(m, false))?;
        unsafe { write(out, s) }
    })
}

/// `f(x)` for a real-valued map.
///
/// # Safety
/// `map` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rotkit_map_eval(map: *const RotkitMap, x: f64, out: *mut f64) -> RotkitStatus {
    guard(|| {
        let m = unsafe { map_ref(map) }?;
        let y = m.eval(x).map_err(fail)?;
        unsafe { write(out, y) }
    })
}

/// Locates a fixed point to within `tol`.
///
/// # Safety
/// `map` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rotkit_solve(map: *const RotkitMap, tol: f64, out: *mut RotkitFixedPoint) -> RotkitStatus {
    guard(|| {
        let m = unsafe { map_ref(map) }?;
        let r = fixed_point::solve(m, tol).map_err(fail)?;
        let (has_certificate, rate, tail_bound) = match r.certificate {
            Some(c) => (true, c.a, c.tail_bound),
            None => (false, f64::NAN, f64::NAN),
        };
        let fp = RotkitFixedPoint {
            x_star: r.x_star,
            residual: r.residual,
            iterations: r.iterations as u64,
            method: r.method.into(),
            has_certificate,
            rate,
            tail_bound,
        };
        unsafe { write(out, fp) }
    })
}

/// `|f^n(x) - x| / |f(x) - x|` at a real point. `*defined` is false at fixed points.
///
/// # Safety
/// `map` must be a live handle; `ratio` and `defined` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rotkit_rotativity_ratio(
    map: *const RotkitMap,
    x: f64,
    n: u32,
    ratio: *mut f64,
    defined: *mut bool,
) -> RotkitStatus {
    guard(|| {
        let m = unsafe { map_ref(map) }?;
        let r = rotativity::rotativity_ratio(m, Point::Real(x), n as usize).map_err(fail)?;
        unsafe { write(ratio, r.unwrap_or(f64::NAN)) }?;
        unsafe { write(defined, r.is_some()) }
    })
}

/// Rotativity and Lipschitz reports as JSON, in the CLI `analyze` shape.
///
/// # Safety
/// `map` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rotkit_analyze_json(map: *const RotkitMap, n: u32, out: *mut *mut c_char) -> RotkitStatus {
    guard(|| {
        let m = unsafe { map_ref(map) }?;
        let report = cli::analyze(m.clone(), n as usize).map_err(fail)?;
        let s = to_c_string(to_stable_json(&report, false))?;
        unsafe { write(out, s) }
    })
}

/// Closed-form rotativity test for `x -> c x + x0` with complex `c`.
///
/// # Safety
/// `rotative` and `sup` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rotkit_affine_criterion(
    c_re: f64,
    c_im: f64,
    x0: f64,
    n: u32,
    rotative: *mut bool,
    sup: *mut f64,
) -> RotkitStatus {
    guard(|| {
        let r = rotativity::affine_rotativity_criterion(Complex64::new(c_re, c_im), x0, n as usize).map_err(fail)?;
        unsafe { write(rotative, r.rotative) }?;
        unsafe { write(sup, r.sup) }
    })
}

/// Sufficient test `b1 > (n c2 - c1) / (n - 1)` for a three-segment map.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rotkit_pwl_criterion(
    c1: f64,
    c2: f64,
    b1: f64,
    b2: f64,
    n: u32,
    out: *mut bool,
) -> RotkitStatus {
    guard(|| {
        let ok = rotativity::pwl_rotativity_criterion(c1, c2, b1, b2, n as usize).map_err(fail)?;
        unsafe { write(out, ok) }
    })
}

/// The b1-side bound `1 + (c2 - c1) / (b1 - c2)` on the three-segment ratio.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rotkit_pwl_sup_ratio(c1: f64, c2: f64, b1: f64, b2: f64, out: *mut f64) -> RotkitStatus {
    guard(|| {
        let r = rotativity::pwl_exact_sup_ratio(c1, c2, b1, b2).map_err(fail)?;
        unsafe { write(out, r) }
    })
}

/// `a^n d1 / (1 - a)`, the Picard error bound after `n` steps.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rotkit_tail_bound(a: f64, n: u32, d1: f64, out: *mut f64) -> RotkitStatus {
    guard(|| {
        let t = fixed_point::tail_bound(a, n as usize, d1).map_err(fail)?;
        unsafe { write(out, t) }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rotkit_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the pointer came from `CString::into_raw`.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// The last error on this thread, or null. Valid until the next failing call
/// on the same thread; do not free.
#[no_mangle]
pub extern "C" fn rotkit_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(RotkitStatus::from(&Error::Parse("x".into())), RotkitStatus::Parse);
        assert_eq!(RotkitStatus::from(&Error::EmptyDomain), RotkitStatus::Internal);
        assert_eq!(RotkitStatus::from(&Error::NotFound), RotkitStatus::NotFound);
        assert_eq!(RotkitStatus::from(&Error::InvalidParameters("n".into())), RotkitStatus::Validation);
    }

    #[test]
    fn guard_catches_panics() {
        let prev = panic::take_hook();
        panic::set_hook(Box::new(|_| {}));
        let status = guard(|| panic!("boom"));
        panic::set_hook(prev);
        assert_eq!(status, RotkitStatus::Panic);
        let msg = unsafe { CStr::from_ptr(rotkit_last_error_message()) }.to_str().unwrap();
        assert_eq!(msg, "panic: boom");
    }
}
