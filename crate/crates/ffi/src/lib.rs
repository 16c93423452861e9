//! C ABI over the minimerlin request handler.
//!
//! Requests and responses are the same JSON objects the daemon exchanges.
//! Strings returned through `response` are owned by the library and must
//! be released with [`mm_string_free`].

use minimerlin::server::{handle_json, SessionCache};
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Opaque server handle holding per-file sessions.
pub struct MmServer {
    cache: SessionCache,
}

/// Outcome of an FFI call. Protocol-level failures are reported inside the
/// response JSON with `MM_STATUS_OK`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InteriorNul = 3,
    Panic = 4,
}

fn deliver(json: String, response: *mut *mut c_char) -> MmStatus {
    match CString::new(json) {
        Ok(s) => {
            // SAFETY: caller checked `response` is non-null.
            unsafe { *response = s.into_raw() };
            MmStatus::Ok
        }
        Err(_) => MmStatus::InteriorNul,
    }
}

/// # Safety
/// `request` must be null or a valid NUL-terminated string.
unsafe fn request_bytes<'a>(request: *const c_char) -> Result<&'a [u8], MmStatus> {
    if request.is_null() {
        return Err(MmStatus::NullArgument);
    }
    let s = CStr::from_ptr(request);
    s.to_str().map(str::as_bytes).map_err(|_| MmStatus::InvalidUtf8)
}

fn guarded(f: impl FnOnce() -> MmStatus) -> MmStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(MmStatus::Panic)
}

/// Creates a server with an empty session cache.
#[no_mangle]
pub extern "C" fn mm_server_new() -> *mut MmServer {
    Box::into_raw(Box::new(MmServer { cache: SessionCache::new() }))
}

/// Releases a server created by [`mm_server_new`]. Null is ignored.
///
/// # Safety
/// `server` must come from [`mm_server_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mm_server_free(server: *mut MmServer) {
    if !server.is_null() {
        drop(Box::from_raw(server));
    }
}

/// Answers `request` using the session cache of `server`.
///
/// # Safety
/// `server` must be a live handle, `request` a NUL-terminated string and
/// `response` a writable pointer. On `MM_STATUS_OK`, `*response` holds a
/// string to release with [`mm_string_free`]; otherwise it is set to null.
#[no_mangle]
pub unsafe extern "C" fn mm_server_request(
    server: *mut MmServer,
    request: *const c_char,
    response: *mut *mut c_char,
) -> MmStatus {
    if server.is_null() || response.is_null() {
        return MmStatus::NullArgument;
    }
    *response = ptr::null_mut();
    let body = match request_bytes(request) {
        Ok(b) => b,
        Err(s) => return s,
    };
    let server = &*server;
    guarded(|| deliver(server.cache.answer(body).to_json(), response))
}

/// Answers `request` without any cache.
///
/// # Safety
/// Same contract as [`mm_server_request`] without the server handle.
#[no_mangle]
pub unsafe extern "C" fn mm_single_request(request: *const c_char, response: *mut *mut c_char) -> MmStatus {
    if response.is_null() {
        return MmStatus::NullArgument;
    }
    *response = ptr::null_mut();
    let body = match request_bytes(request) {
        Ok(b) => b,
        Err(s) => return s,
    };
    guarded(|| deliver(handle_json(body, None).0.to_json(), response))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
