//! C ABI for the framed-formal-curves kernel.
//!
//! The surface is deliberately small: create an evaluation context over a
//! chosen Artin ring, feed it DSL programs, get JSON back. Handles are
//! opaque; every returned string is owned by the caller and must be
//! released with [`ffc_string_free`].

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use ffc_core::artin::ArtinSpec;
use ffc_core::dsl::Env;
use ffc_core::suites;
use ffc_core::Error;

/// Status of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfcStatus {
    /// Success; the output pointer holds a JSON document.
    Ok = 0,
    /// A domain error (non-unit inverse, unstable curve, ...); the output
    /// pointer holds a JSON error object.
    DomainError = 1,
    /// A parse or type error in the program text.
    ParseError = 2,
    /// Null pointer, non-UTF8 text, or an invalid ring description.
    InvalidArgument = 3,
    /// A property suite reported failures.
    SuiteFailed = 4,
}

/// Opaque evaluation context: a coefficient ring choice.
pub struct FfcContext {
    env: Env,
}

/// Create a context over `Q[e1..e_vars]/m^(order+1)` with `generics`
/// invertible parameters adjoined. Returns null when `order` is zero.
#[no_mangle]
pub extern "C" fn ffc_context_new(vars: u32, order: u32, generics: u32) -> *mut FfcContext {
    if order == 0 {
        return ptr::null_mut();
    }
    let spec = ArtinSpec::with_generics(vars, order, generics);
    Box::into_raw(Box::new(FfcContext {
        env: Env::new(spec),
    }))
}

/// Release a context created by [`ffc_context_new`].
///
/// # Safety
/// `ctx` must be a pointer previously returned by [`ffc_context_new`] and
/// not yet freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ffc_context_free(ctx: *mut FfcContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn status_of(err: &Error) -> FfcStatus {
    match err {
        Error::Parse { .. } | Error::Type(_) => FfcStatus::ParseError,
        _ => FfcStatus::DomainError,
    }
}

/// Evaluate a DSL program. On success `*out_json` receives the result
/// document; on failure it receives a JSON object with an `error` field.
/// The caller owns the string either way.
///
/// # Safety
/// `ctx` must be a live context, `source` a NUL-terminated UTF-8 string,
/// and `out_json` a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ffc_eval(
    ctx: *const FfcContext,
    source: *const c_char,
    out_json: *mut *mut c_char,
) -> FfcStatus {
    if ctx.is_null() || source.is_null() || out_json.is_null() {
        return FfcStatus::InvalidArgument;
    }
    *out_json = ptr::null_mut();
    let Ok(text) = CStr::from_ptr(source).to_str() else {
        return FfcStatus::InvalidArgument;
    };
    match (*ctx).env.run(text) {
        Ok(v) => {
            *out_json = to_c_string(serde_json::to_string(&v).unwrap());
            FfcStatus::Ok
        }
        Err(e) => {
            let payload = serde_json::json!({ "error": e.to_string() });
            *out_json = to_c_string(payload.to_string());
            status_of(&e)
        }
    }
}

/// Run a named property suite (`artin`, `witt`, `annuli`, `corolla`,
/// `fld`) in the context's ring. `*out_json` receives a summary document.
///
/// # Safety
/// Same contract as [`ffc_eval`].
#[no_mangle]
pub unsafe extern "C" fn ffc_check(
    ctx: *const FfcContext,
    suite: *const c_char,
    seed: u64,
    iterations: usize,
    out_json: *mut *mut c_char,
) -> FfcStatus {
    if ctx.is_null() || suite.is_null() || out_json.is_null() {
        return FfcStatus::InvalidArgument;
    }
    *out_json = ptr::null_mut();
    let Ok(name) = CStr::from_ptr(suite).to_str() else {
        return FfcStatus::InvalidArgument;
    };
    let spec = (*ctx).env.spec;
    match suites::run_suite(name, spec, seed, iterations) {
        Some(rep) => {
            let payload = serde_json::json!({
                "suite": rep.name,
                "passed": rep.passed,
                "failed": rep.failed,
                "detail": rep.detail,
            });
            *out_json = to_c_string(payload.to_string());
            if rep.ok() {
                FfcStatus::Ok
            } else {
                FfcStatus::SuiteFailed
            }
        }
        None => FfcStatus::InvalidArgument,
    }
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must originate from this library and not have been freed; null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn ffc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
