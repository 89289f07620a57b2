//! C ABI for the twinmat compact entry oracle.
//!
//! Every fallible function returns a `TwmStatus`; on failure a message is
//! kept per thread and can be read with `twm_last_error`. Handles are
//! opaque and must be released with `twm_oracle_free`; byte buffers
//! returned by the library are released with `twm_bytes_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twinmat::compact::{Accounting, CompactOracle};
use twinmat::matrix::io::parse_decomposition;
use twinmat::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Format = 5,
    OutOfBounds = 6,
    Internal = 7,
}

/// Bit accounting for `twm_oracle_total_bits`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwmAccounting {
    Packed = 0,
    Paper = 1,
}

/// Immutable compact oracle; safe to query from several threads.
pub struct TwmOracle {
    inner: CompactOracle,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: TwmStatus, msg: impl Into<String>) -> TwmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
    status
}

fn status_of(e: &Error) -> TwmStatus {
    match e {
        Error::Parse { .. } | Error::Overlap(..) => TwmStatus::Parse,
        Error::Format(_) => TwmStatus::Format,
        Error::Bounds(_) => TwmStatus::OutOfBounds,
        Error::InvalidN(_) | Error::InvalidParameter(_) | Error::MalformedSequence(_) => TwmStatus::InvalidArgument,
        Error::Empty | Error::ContractViolation(_) | Error::ConstructionInvariant(_) => TwmStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> TwmStatus) -> TwmStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(TwmStatus::Internal, "panic inside twinmat"))
}

fn lib_err(e: Error) -> TwmStatus {
    fail(status_of(&e), e.to_string())
}

fn publish(oracle: CompactOracle, out: *mut *mut TwmOracle) -> TwmStatus {
    let handle = Box::into_raw(Box::new(TwmOracle { inner: oracle }));
    // SAFETY: caller checked `out` for null.
    unsafe { *out = handle };
    TwmStatus::Ok
}

/// Builds an oracle from decomposition text (`n k` header, then `k` lines
/// `r1 r2 c1 c2`, 1-based inclusive).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn twm_oracle_build(text: *const c_char, beta: f64, out: *mut *mut TwmOracle) -> TwmStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(TwmStatus::NullPointer, "null argument");
        }
        let text = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(t) => t,
            Err(e) => return fail(TwmStatus::InvalidUtf8, e.to_string()),
        };
        match parse_decomposition(text).and_then(|dec| CompactOracle::build(&dec, beta)) {
            Ok(o) => publish(o, out),
            Err(e) => lib_err(e),
        }
    })
}

/// Loads a serialized oracle.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn twm_oracle_from_bytes(data: *const u8, len: usize, out: *mut *mut TwmOracle) -> TwmStatus {
    guard(|| {
        if data.is_null() || out.is_null() {
            return fail(TwmStatus::NullPointer, "null argument");
        }
        let bytes = unsafe { std::slice::from_raw_parts(data, len) };
        match CompactOracle::from_bytes(bytes) {
            Ok(o) => publish(o, out),
            Err(e) => lib_err(e),
        }
    })
}

/// Serializes an oracle into a library-owned buffer; free it with
/// `twm_bytes_free(*data, *len)`.
///
/// # Safety
/// `oracle` must be a live handle; `data` and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn twm_oracle_to_bytes(oracle: *const TwmOracle, data: *mut *mut u8, len: *mut usize) -> TwmStatus {
    guard(|| {
        if oracle.is_null() || data.is_null() || len.is_null() {
            return fail(TwmStatus::NullPointer, "null argument");
        }
        let bytes = unsafe { &(*oracle).inner }.to_bytes().into_boxed_slice();
        let n = bytes.len();
        let p = Box::into_raw(bytes) as *mut u8;
        unsafe {
            *data = p;
            *len = n;
        }
        TwmStatus::Ok
    })
}

/// Releases a buffer returned by `twm_oracle_to_bytes`.
///
/// # Safety
/// `data` and `len` must come from one `twm_oracle_to_bytes` call, or
/// `data` must be null.
#[no_mangle]
pub unsafe extern "C" fn twm_bytes_free(data: *mut u8, len: usize) {
    if !data.is_null() {
        drop(unsafe { Box::from_raw(ptr::slice_from_raw_parts_mut(data, len)) });
    }
}

/// Entry `(i, j)`, 1-based. `hops` (optional) receives the number of
/// child ids followed.
///
/// # Safety
/// `oracle` must be a live handle; `bit` must be writable; `hops` may be
/// null.
#[no_mangle]
pub unsafe extern "C" fn twm_oracle_query(oracle: *const TwmOracle, i: usize, j: usize, bit: *mut u8, hops: *mut usize) -> TwmStatus {
    guard(|| {
        if oracle.is_null() || bit.is_null() {
            return fail(TwmStatus::NullPointer, "null argument");
        }
        match unsafe { &(*oracle).inner }.query_with_hops(i, j) {
            Ok((b, h)) => {
                unsafe {
                    *bit = u8::from(b);
                    if !hops.is_null() {
                        *hops = h;
                    }
                }
                TwmStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// Matrix order, or 0 for a null handle.
///
/// # Safety
/// `oracle` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn twm_oracle_n(oracle: *const TwmOracle) -> usize {
    if oracle.is_null() {
        0
    } else {
        unsafe { &(*oracle).inner }.n()
    }
}

/// Number of layers below the root (hops per query), or 0 for a null
/// handle.
///
/// # Safety
/// `oracle` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn twm_oracle_depth(oracle: *const TwmOracle) -> usize {
    if oracle.is_null() {
        0
    } else {
        unsafe { &(*oracle).inner }.depth()
    }
}

/// Total size in bits under the given accounting (a `TwmAccounting`
/// value).
///
/// # Safety
/// `oracle` must be a live handle; `bits` must be writable.
#[no_mangle]
pub unsafe extern "C" fn twm_oracle_total_bits(oracle: *const TwmOracle, accounting: u32, bits: *mut u64) -> TwmStatus {
    guard(|| {
        if oracle.is_null() || bits.is_null() {
            return fail(TwmStatus::NullPointer, "null argument");
        }
        let acc = match accounting {
            a if a == TwmAccounting::Packed as u32 => Accounting::Packed,
            a if a == TwmAccounting::Paper as u32 => Accounting::Paper,
            a => return fail(TwmStatus::InvalidArgument, format!("unknown accounting {a}")),
        };
        unsafe { *bits = (*oracle).inner.bitsize(acc).total_bits };
        TwmStatus::Ok
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `oracle` must be a handle from this library, not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn twm_oracle_free(oracle: *mut TwmOracle) {
    if !oracle.is_null() {
        drop(unsafe { Box::from_raw(oracle) });
    }
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `cap > 0`) and returns its full length in
/// bytes.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null with `cap == 0`.
#[no_mangle]
pub unsafe extern "C" fn twm_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let k = msg.len().min(cap - 1);
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, k);
                *buf.add(k) = 0;
            }
        }
        msg.len()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::Format("x".into())), TwmStatus::Format);
        assert_eq!(status_of(&Error::Parse { line: 1, msg: "x".into() }), TwmStatus::Parse);
        assert_eq!(status_of(&Error::InvalidN(3)), TwmStatus::InvalidArgument);
        assert_eq!(status_of(&Error::Bounds("x".into())), TwmStatus::OutOfBounds);
    }

    #[test]
    fn panics_become_internal() {
        assert_eq!(guard(|| panic!("boom")), TwmStatus::Internal);
        let mut buf = [0 as c_char; 64];
        let len = unsafe { twm_last_error(buf.as_mut_ptr(), buf.len()) };
        assert_eq!(len, "panic inside twinmat".len());
    }
}
