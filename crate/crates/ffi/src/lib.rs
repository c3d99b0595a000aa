//! C ABI over `eisgor`. Every entry point returns an [`EisgorStatus`]; on
//! failure the message is available from [`eisgor_last_error`] on the same
//! thread. Handles are opaque and released with their `_free` function.
//! Strings returned by `_to_json` are released with [`eisgor_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use eisgor::arith::Prime;
use eisgor::bernoulli::bernoulli_mod;
use eisgor::forms::{miller_basis, FormSpace};
use eisgor::qseries::Modulus;
use eisgor::scan::{scan_range, ScanReport};
use eisgor::structure::{verify_with_override, StructureReport};
use eisgor::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EisgorStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfScope = 3,
    Arithmetic = 4,
    Io = 5,
    Panic = 6,
}

impl From<&Error> for EisgorStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidPrime(_) | Error::WrongResidue { .. } | Error::ZeroInput(_) => EisgorStatus::InvalidArgument,
            Error::InvalidWeight { .. } | Error::OutOfRange { .. } | Error::InsufficientPrecision { .. } => {
                EisgorStatus::OutOfScope
            }
            Error::Io(_) | Error::CorruptCheckpoint { .. } => EisgorStatus::Io,
            _ => EisgorStatus::Arithmetic,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), EisgorStatus>) -> EisgorStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EisgorStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".to_string());
            EisgorStatus::Panic
        }
    }
}

fn fail(e: Error) -> EisgorStatus {
    let s = EisgorStatus::from(&e);
    set_error(e.to_string());
    s
}

fn null() -> EisgorStatus {
    set_error("null pointer argument".to_string());
    EisgorStatus::NullPointer
}

fn json_string(v: &serde_json::Value) -> *mut c_char {
    CString::new(v.to_string()).expect("json has no nul").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn eisgor_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer returned by a `_to_json` function.
#[no_mangle]
pub unsafe extern "C" fn eisgor_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `B_k mod p` for even `0 <= k <= p - 3`.
///
/// # Safety
/// `out` must be a valid pointer to a `u64`.
#[no_mangle]
pub unsafe extern "C" fn eisgor_bernoulli_mod(p: u64, k: u32, out: *mut u64) -> EisgorStatus {
    if out.is_null() {
        return null();
    }
    guard(|| {
        let p = Prime::new(p).map_err(fail)?;
        let b = bernoulli_mod(p, k as usize).map_err(fail)?;
        *out = b.residue();
        Ok(())
    })
}

/// Echelon basis of `M_k` over `Z/p^digits` to `precision` coefficients.
pub struct EisgorFormSpace(FormSpace);

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eisgor_form_space_new(
    p: u64,
    digits: u32,
    k: u64,
    precision: usize,
    out: *mut *mut EisgorFormSpace,
) -> EisgorStatus {
    if out.is_null() {
        return null();
    }
    guard(|| {
        let p = Prime::new(p).map_err(fail)?;
        let m = Modulus::new(p, digits).map_err(fail)?;
        let space = miller_basis(k, precision, m).map_err(fail)?;
        *out = Box::into_raw(Box::new(EisgorFormSpace(space)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eisgor_form_space_dim(h: *const EisgorFormSpace) -> usize {
    h.as_ref().map_or(0, |h| h.0.dim())
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eisgor_form_space_precision(h: *const EisgorFormSpace) -> usize {
    h.as_ref().map_or(0, |h| h.0.precision())
}

/// Coefficient `a_n` of basis element `row`.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eisgor_form_space_coeff(
    h: *const EisgorFormSpace,
    row: usize,
    n: usize,
    out: *mut u64,
) -> EisgorStatus {
    let (Some(h), false) = (h.as_ref(), out.is_null()) else {
        return null();
    };
    if row >= h.0.dim() || n >= h.0.precision() {
        set_error(format!("index ({row}, {n}) out of bounds"));
        return EisgorStatus::InvalidArgument;
    }
    *out = h.0.rows()[row].coeff(n);
    EisgorStatus::Ok
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eisgor_form_space_to_json(h: *const EisgorFormSpace) -> *mut c_char {
    h.as_ref().map_or(ptr::null_mut(), |h| json_string(&h.0.to_json()))
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eisgor_form_space_free(h: *mut EisgorFormSpace) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Merged result of a Bernoulli pair scan.
pub struct EisgorScanReport(ScanReport);

/// Scans primes in `[p_min, p_max]`. `checkpoint` may be null.
///
/// # Safety
/// `checkpoint` must be null or a nul-terminated UTF-8 path; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn eisgor_scan(
    p_min: u64,
    p_max: u64,
    shards: usize,
    checkpoint: *const c_char,
    out: *mut *mut EisgorScanReport,
) -> EisgorStatus {
    if out.is_null() {
        return null();
    }
    guard(|| {
        let path = match checkpoint.as_ref() {
            None => None,
            Some(_) => match CStr::from_ptr(checkpoint).to_str() {
                Ok(s) => Some(PathBuf::from(s)),
                Err(_) => {
                    set_error("checkpoint path is not UTF-8".to_string());
                    return Err(EisgorStatus::InvalidArgument);
                }
            },
        };
        let r = scan_range(p_min, p_max, shards, path.as_deref()).map_err(fail)?;
        *out = Box::into_raw(Box::new(EisgorScanReport(r)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eisgor_scan_primes_processed(h: *const EisgorScanReport) -> usize {
    h.as_ref().map_or(0, |h| h.0.primes_processed)
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eisgor_scan_pair_hits(h: *const EisgorScanReport) -> usize {
    h.as_ref().map_or(0, |h| h.0.total_pair_hits)
}

/// Number of primes in the report with at least one irregular index.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eisgor_scan_irregular_count(h: *const EisgorScanReport) -> usize {
    h.as_ref().map_or(0, |h| {
        h.0.records.iter().filter(|r| !r.irregular_indices.is_empty()).count()
    })
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eisgor_scan_to_json(h: *const EisgorScanReport) -> *mut c_char {
    h.as_ref().map_or(ptr::null_mut(), |h| {
        json_string(&serde_json::to_value(&h.0).expect("serializable"))
    })
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eisgor_scan_free(h: *mut EisgorScanReport) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Gorenstein and principality checks at `(p, k)`.
pub struct EisgorStructureReport(StructureReport);

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eisgor_structure_verify(p: u64, k: u64, out: *mut *mut EisgorStructureReport) -> EisgorStatus {
    if out.is_null() {
        return null();
    }
    guard(|| {
        let p = Prime::new(p).map_err(fail)?;
        let r = verify_with_override(p, k, None).map_err(fail)?;
        *out = Box::into_raw(Box::new(EisgorStructureReport(r)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eisgor_structure_assertions_hold(h: *const EisgorStructureReport) -> bool {
    h.as_ref().is_some_and(|h| h.0.assertions_hold())
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eisgor_structure_gorenstein(h: *const EisgorStructureReport) -> bool {
    h.as_ref().is_some_and(|h| h.0.gorenstein_full)
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eisgor_structure_min_gens(h: *const EisgorStructureReport) -> usize {
    h.as_ref().map_or(0, |h| h.0.eis_ideal_min_gens)
}

/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eisgor_structure_to_json(h: *const EisgorStructureReport) -> *mut c_char {
    h.as_ref().map_or(ptr::null_mut(), |h| {
        json_string(&serde_json::to_value(&h.0).expect("serializable"))
    })
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eisgor_structure_free(h: *mut EisgorStructureReport) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}
