//! C ABI over `kacfusion`. Handles are opaque and owned by the caller, who
//! releases them with the matching `*_free`. Strings returned through
//! out-pointers are released with `kf_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kacfusion::admissible::LevelData;
use kacfusion::rootsys::FiniteRootSystem;
use kacfusion::smatrix::{build_smatrix, SMatrix};
use kacfusion::walg::{integrable_fusion, w_fusion, w_smatrix, FusionTensor};
use kacfusion::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    ComputationError = 4,
    HypothesisViolated = 5,
    Panic = 6,
}

pub struct KfRootSystem(FiniteRootSystem);

pub struct KfSMatrix(SMatrix);

pub struct KfFusion(FusionTensor);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KfStatus {
    match e {
        Error::InvalidType(_) | Error::InvalidLevel(_) | Error::Parse(_) | Error::DimensionMismatch { .. } => {
            KfStatus::InvalidArgument
        }
        Error::Hypothesis { .. } => KfStatus::HypothesisViolated,
        _ => KfStatus::ComputationError,
    }
}

/// Runs `f`, recording the message of any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (KfStatus, String)>) -> KfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KfStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside kacfusion");
            KfStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (KfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (KfStatus, String) {
    (KfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn href<'a, T>(h: *const T, what: &str) -> Result<&'a T, (KfStatus, String)> {
    h.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), (KfStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (KfStatus, String)> {
    let c = CString::new(s).map_err(|_| (KfStatus::ComputationError, "string contains NUL".to_string()))?;
    put(out, c.into_raw())
}

fn level(rs: &FiniteRootSystem, p: i64, q: i64) -> Result<LevelData, (KfStatus, String)> {
    LevelData::new(rs, p as i128, q as i128).map_err(lib_err)
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn kf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `type_name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kf_rootsys_new(type_name: *const c_char, out: *mut *mut KfRootSystem) -> KfStatus {
    guard(|| {
        if type_name.is_null() {
            return Err(null("type_name"));
        }
        let s = CStr::from_ptr(type_name)
            .to_str()
            .map_err(|_| (KfStatus::InvalidArgument, "type_name is not UTF-8".to_string()))?;
        let rs = FiniteRootSystem::from_str_spec(s).map_err(lib_err)?;
        put(out, Box::into_raw(Box::new(KfRootSystem(rs))))
    })
}

/// # Safety
/// `h` must be null or a live handle from `kf_rootsys_new`.
#[no_mangle]
pub unsafe extern "C" fn kf_rootsys_free(h: *mut KfRootSystem) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Rank, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kf_rootsys_dim(h: *const KfRootSystem) -> usize {
    h.as_ref().map_or(0, |r| r.0.rank())
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kf_rootsys_dual_coxeter(h: *const KfRootSystem, out: *mut i64) -> KfStatus {
    guard(|| put(out, href(h, "root system")?.0.hvee as i64))
}

/// # Safety
/// `h` must be a live handle; `out` receives a string for `kf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn kf_rootsys_to_json(h: *const KfRootSystem, out: *mut *mut c_char) -> KfStatus {
    guard(|| {
        let v = kacfusion::cli::rootsys_json(&href(h, "root system")?.0).map_err(lib_err)?;
        put_string(out, v.to_string())
    })
}

/// Admissible S-matrix at `k + h∨ = p/q`.
///
/// # Safety
/// `rs` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kf_smatrix_new(rs: *const KfRootSystem, p: i64, q: i64, out: *mut *mut KfSMatrix) -> KfStatus {
    guard(|| {
        let ld = level(&href(rs, "root system")?.0, p, q)?;
        let s = build_smatrix(&ld).map_err(lib_err)?;
        put(out, Box::into_raw(Box::new(KfSMatrix(s))))
    })
}

/// W-algebra S-matrix on `I_{p,q}`.
///
/// # Safety
/// `rs` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kf_wsmatrix_new(
    rs: *const KfRootSystem,
    p: i64,
    q: i64,
    out: *mut *mut KfSMatrix,
) -> KfStatus {
    guard(|| {
        let ld = level(&href(rs, "root system")?.0, p, q)?;
        let (_, s) = w_smatrix(&ld).map_err(lib_err)?;
        put(out, Box::into_raw(Box::new(KfSMatrix(s))))
    })
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kf_smatrix_free(h: *mut KfSMatrix) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of labels, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kf_smatrix_dim(h: *const KfSMatrix) -> usize {
    h.as_ref().map_or(0, |s| s.0.dim())
}

/// # Safety
/// `h` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kf_smatrix_entry(
    h: *const KfSMatrix,
    i: usize,
    j: usize,
    re: *mut f64,
    im: *mut f64,
) -> KfStatus {
    guard(|| {
        let s = &href(h, "S-matrix")?.0;
        let n = s.dim();
        if i >= n || j >= n {
            return Err((KfStatus::OutOfRange, format!("({i}, {j}) outside {n}×{n}")));
        }
        let z = s.entries[(i, j)];
        put(re, z.re)?;
        put(im, z.im)
    })
}

/// # Safety
/// `h` must be a live handle; `out` receives a string for `kf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn kf_smatrix_label(h: *const KfSMatrix, i: usize, out: *mut *mut c_char) -> KfStatus {
    guard(|| {
        let s = &href(h, "S-matrix")?.0;
        let l = s.labels.get(i).ok_or_else(|| (KfStatus::OutOfRange, format!("label {i} of {}", s.dim())))?;
        put_string(out, l.clone())
    })
}

/// # Safety
/// `h` must be a live handle; `out` receives a string for `kf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn kf_smatrix_to_json(h: *const KfSMatrix, out: *mut *mut c_char) -> KfStatus {
    guard(|| put_string(out, href(h, "S-matrix")?.0.to_json().to_string()))
}

/// Verlinde fusion of the W-algebra at `k + h∨ = p/q`.
///
/// # Safety
/// `rs` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kf_fusion_new(rs: *const KfRootSystem, p: i64, q: i64, out: *mut *mut KfFusion) -> KfStatus {
    guard(|| {
        let ld = level(&href(rs, "root system")?.0, p, q)?;
        let (_, f) = w_fusion(&ld).map_err(lib_err)?;
        put(out, Box::into_raw(Box::new(KfFusion(f))))
    })
}

/// Verlinde fusion at a nonnegative integrable level.
///
/// # Safety
/// `rs` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kf_fusion_integrable_new(
    rs: *const KfRootSystem,
    level: i64,
    out: *mut *mut KfFusion,
) -> KfStatus {
    guard(|| {
        if level < 0 {
            return Err((KfStatus::InvalidArgument, format!("level {level} is negative")));
        }
        let (_, f) = integrable_fusion(&href(rs, "root system")?.0, level as i128).map_err(lib_err)?;
        put(out, Box::into_raw(Box::new(KfFusion(f))))
    })
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kf_fusion_free(h: *mut KfFusion) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of labels, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kf_fusion_dim(h: *const KfFusion) -> usize {
    h.as_ref().map_or(0, |f| f.0.dim())
}

/// `N_{a,b}^c`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kf_fusion_entry(h: *const KfFusion, a: usize, b: usize, c: usize, out: *mut i64) -> KfStatus {
    guard(|| {
        let f = &href(h, "fusion tensor")?.0;
        let n = f.dim();
        if a >= n || b >= n || c >= n {
            return Err((KfStatus::OutOfRange, format!("({a}, {b}, {c}) outside rank {n}")));
        }
        put(out, f.get(a, b, c))
    })
}

/// # Safety
/// `h` must be a live handle; `out` receives a string for `kf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn kf_fusion_to_json(h: *const KfFusion, out: *mut *mut c_char) -> KfStatus {
    guard(|| put_string(out, href(h, "fusion tensor")?.0.to_json().to_string()))
}
