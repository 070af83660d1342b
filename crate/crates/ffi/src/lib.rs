//! C ABI over `compocheck`.
//!
//! A model is loaded once into an opaque [`CcModel`] handle, then checked or
//! simulated any number of times. Results come back as NUL-terminated JSON
//! strings owned by the caller and released with [`cc_string_free`].
//! Every function returns a [`CcStatus`]; on failure a human-readable
//! message for the calling thread is available from [`cc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use compocheck::ingest::{self, Format};
use compocheck::integrity::{synthesize_deleg_associations, validate_integrity};
use compocheck::rules::{check_model_with, CheckOptions};
use compocheck::sim::{self, SimError};
use compocheck::{Code, Model};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    IntegrityError = 4,
    InvalidArgument = 5,
    SimulationError = 6,
    Panic = 7,
}

/// Input syntax for [`cc_model_load`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcFormat {
    Dsl = 0,
    Json = 1,
}

/// Opaque handle to a parsed, integrity-checked model.
pub struct CcModel {
    model: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: CcStatus, message: &str) -> CcStatus {
    set_error(message);
    status
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, CcStatus> {
    if p.is_null() {
        return Err(fail(CcStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CcStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("NUL bytes removed")
        .into_raw()
}

fn guard(f: impl FnOnce() -> CcStatus) -> CcStatus {
    std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|_| fail(CcStatus::Panic, "internal panic"))
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `text`, validates integrity and synthesizes default delegation
/// associations. On success `*out` receives a handle to free with
/// [`cc_model_free`].
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_model_load(
    text: *const c_char,
    format: CcFormat,
    out: *mut *mut CcModel,
) -> CcStatus {
    guard(|| {
        if out.is_null() {
            return fail(CcStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let format = match format {
            CcFormat::Dsl => Format::Dsl,
            CcFormat::Json => Format::Json,
        };
        let model = match ingest::parse_str(text, "<input>", format) {
            Ok(m) => m,
            Err(errors) => {
                let msg: Vec<String> = errors.iter().map(ToString::to_string).collect();
                return fail(CcStatus::ParseError, &msg.join("\n"));
            }
        };
        let integrity = validate_integrity(&model);
        let model = if integrity.is_empty() {
            synthesize_deleg_associations(&model)
        } else {
            Err(integrity)
        };
        match model {
            Ok(model) => {
                *out = Box::into_raw(Box::new(CcModel { model }));
                CcStatus::Ok
            }
            Err(diags) => {
                let msg: Vec<String> = diags.iter().map(ToString::to_string).collect();
                fail(CcStatus::IntegrityError, &msg.join("\n"))
            }
        }
    })
}

/// Releases a handle from [`cc_model_load`]. Null is ignored.
///
/// # Safety
/// `model` must come from [`cc_model_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cc_model_free(model: *mut CcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Runs the rules. `downgrade` is a comma-separated list of codes reported
/// as warnings, or null. `*out_json` receives the report; `*out_passed` is
/// set when no error remains.
///
/// # Safety
/// `model` must be a live handle; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cc_check(
    model: *const CcModel,
    downgrade: *const c_char,
    out_json: *mut *mut c_char,
    out_passed: *mut bool,
) -> CcStatus {
    guard(|| {
        if model.is_null() || out_json.is_null() || out_passed.is_null() {
            return fail(CcStatus::NullPointer, "null argument");
        }
        *out_json = ptr::null_mut();
        let mut options = CheckOptions::default();
        if !downgrade.is_null() {
            let list = match read_str(downgrade) {
                Ok(s) => s,
                Err(s) => return s,
            };
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match item.parse::<Code>() {
                    Ok(c) => {
                        options.downgrade.insert(c);
                    }
                    Err(e) => return fail(CcStatus::InvalidArgument, &e.to_string()),
                }
            }
        }
        let report = check_model_with(&(*model).model, &options);
        *out_passed = report.passed;
        *out_json = to_c(report.to_json());
        CcStatus::Ok
    })
}

/// Instantiates `root` (or the model's declared root when null), injects the
/// default request suite and runs to quiescence. `*out_trace` receives the
/// trace as JSON lines; `*out_safe` is set when every request was delivered
/// to a receiver providing its interface.
///
/// # Safety
/// `model` must be a live handle; `root` null or NUL-terminated; the output
/// pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cc_simulate(
    model: *const CcModel,
    root: *const c_char,
    out_trace: *mut *mut c_char,
    out_safe: *mut bool,
) -> CcStatus {
    guard(|| {
        if model.is_null() || out_trace.is_null() || out_safe.is_null() {
            return fail(CcStatus::NullPointer, "null argument");
        }
        *out_trace = ptr::null_mut();
        let model = &(*model).model;
        let root = if root.is_null() {
            match &model.root {
                Some(r) => r.clone(),
                None => return fail(CcStatus::InvalidArgument, "model declares no root"),
            }
        } else {
            match read_str(root) {
                Ok(r) => r.to_string(),
                Err(s) => return s,
            }
        };
        match sim::simulate(model, &root, None) {
            Ok((_, trace, safety)) => {
                *out_safe = safety.safe;
                *out_trace = to_c(trace.to_json_lines());
                CcStatus::Ok
            }
            Err(e @ SimError::UnknownRoot(_)) => fail(CcStatus::InvalidArgument, &e.to_string()),
            Err(e) => fail(CcStatus::SimulationError, &e.to_string()),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
