//! Drive the C surface exactly as a foreign binding would.

use std::ffi::{CStr, CString};
use std::ptr;

use ffc_capi::{
    ffc_check, ffc_context_free, ffc_context_new, ffc_eval, ffc_string_free, FfcStatus,
};

fn eval(ctx: *const ffc_capi::FfcContext, src: &str) -> (FfcStatus, String) {
    let c = CString::new(src).unwrap();
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { ffc_eval(ctx, c.as_ptr(), &mut out) };
    let text = if out.is_null() {
        String::new()
    } else {
        let s = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
        unsafe { ffc_string_free(out) };
        s
    };
    (status, text)
}

#[test]
fn eval_round_trip_through_the_abi() {
    let ctx = ffc_context_new(1, 3, 0);
    assert!(!ctx.is_null());
    let (status, json) = eval(ctx, "(rinv (radd 1 e1))");
    assert_eq!(status, FfcStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["kind"], "ring");
    assert_eq!(v["spec"]["vars"], 1);
    unsafe { ffc_context_free(ctx) };
}

#[test]
fn error_codes_cross_the_boundary() {
    let ctx = ffc_context_new(1, 2, 0);
    let (status, json) = eval(ctx, "(rinv e1)");
    assert_eq!(status, FfcStatus::DomainError);
    assert!(json.contains("not a unit"));
    let (status, _) = eval(ctx, "(rinv e1");
    assert_eq!(status, FfcStatus::ParseError);
    let (status, _) = eval(ctx, "(frobnicate)");
    assert_eq!(status, FfcStatus::ParseError);
    unsafe { ffc_context_free(ctx) };
}

#[test]
fn invalid_arguments_are_rejected() {
    assert!(ffc_context_new(1, 0, 0).is_null());
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { ffc_eval(ptr::null(), ptr::null(), &mut out) };
    assert_eq!(status, FfcStatus::InvalidArgument);
}

#[test]
fn suites_run_through_the_abi() {
    let ctx = ffc_context_new(2, 2, 0);
    let name = CString::new("witt").unwrap();
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { ffc_check(ctx, name.as_ptr(), 7, 5, &mut out) };
    assert_eq!(status, FfcStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { ffc_string_free(out) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["failed"], 0);
    unsafe { ffc_context_free(ctx) };
}

#[test]
fn header_is_generated() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ffc.h");
    let text = std::fs::read_to_string(header).expect("cbindgen header present");
    for symbol in [
        "ffc_context_new",
        "ffc_context_free",
        "ffc_eval",
        "ffc_check",
        "ffc_string_free",
        "FfcStatus",
    ] {
        assert!(text.contains(symbol), "header misses {}", symbol);
    }
}
