use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use compocheck::fixtures;
use compocheck_ffi::*;

fn load(text: &str, format: CcFormat) -> (CcStatus, *mut CcModel) {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { cc_model_load(c.as_ptr(), format, &mut out) };
    (status, out)
}

fn take(s: *mut std::ffi::c_char) -> String {
    let owned = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { cc_string_free(s) };
    owned
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cc_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn check(model: *const CcModel, downgrade: Option<&str>) -> (CcStatus, String, bool) {
    let d = downgrade.map(|s| CString::new(s).unwrap());
    let mut json = ptr::null_mut();
    let mut passed = false;
    let status = unsafe {
        cc_check(
            model,
            d.as_ref().map_or(ptr::null(), |c| c.as_ptr()),
            &mut json,
            &mut passed,
        )
    };
    let text = if json.is_null() { String::new() } else { take(json) };
    (status, text, passed)
}

#[test]
fn delegation_checks_and_simulates() {
    let (status, model) = load(fixtures::DELEGATION, CcFormat::Dsl);
    assert_eq!(status, CcStatus::Ok);
    let (status, json, passed) = check(model, None);
    assert_eq!(status, CcStatus::Ok);
    assert!(passed);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["passed"], true);

    let mut trace = ptr::null_mut();
    let mut safe = false;
    let status = unsafe { cc_simulate(model, ptr::null(), &mut trace, &mut safe) };
    assert_eq!(status, CcStatus::Ok);
    assert!(safe);
    let trace = take(trace);
    let summary: serde_json::Value = serde_json::from_str(trace.lines().last().unwrap()).unwrap();
    assert_eq!(summary["summary"]["delivered"], 3);
    unsafe { cc_model_free(model) };
}

#[test]
fn mixed_activity_fails_and_downgrade_passes() {
    let (_, model) = load(fixtures::MIXED_ACTIVITY, CcFormat::Dsl);
    let (_, json, passed) = check(model, None);
    assert!(!passed);
    assert!(json.contains("W010"));
    let (_, _, passed) = check(model, Some("W010"));
    assert!(passed);
    let (status, _, _) = check(model, Some("W999"));
    assert_eq!(status, CcStatus::InvalidArgument);
    assert!(last_error().contains("W999"));
    unsafe { cc_model_free(model) };
}

#[test]
fn json_input() {
    let json = compocheck::ingest::serialize_json(&fixtures::atm());
    let (status, model) = load(&json, CcFormat::Json);
    assert_eq!(status, CcStatus::Ok);
    assert!(check(model, None).2);
    unsafe { cc_model_free(model) };
}

#[test]
fn error_codes() {
    let (status, model) = load("class A { part x: }", CcFormat::Dsl);
    assert_eq!(status, CcStatus::ParseError);
    assert!(model.is_null());
    assert!(last_error().contains("part type"));

    let (status, model) = load("class A { part x: Nope; }", CcFormat::Dsl);
    assert_eq!(status, CcStatus::IntegrityError);
    assert!(model.is_null());
    assert!(last_error().contains("E001"));

    let status = unsafe { cc_model_load(ptr::null(), CcFormat::Dsl, &mut ptr::null_mut()) };
    assert_eq!(status, CcStatus::NullPointer);

    let bad = [0xffu8, 0];
    let mut out = ptr::null_mut();
    let status = unsafe { cc_model_load(bad.as_ptr().cast(), CcFormat::Dsl, &mut out) };
    assert_eq!(status, CcStatus::InvalidUtf8);

    let (status, _, _) = check(ptr::null(), None);
    assert_eq!(status, CcStatus::NullPointer);
}

#[test]
fn simulate_unknown_root() {
    let (_, model) = load(fixtures::LEAF, CcFormat::Dsl);
    let root = CString::new("Nope").unwrap();
    let mut trace = ptr::null_mut();
    let mut safe = false;
    let status = unsafe { cc_simulate(model, root.as_ptr(), &mut trace, &mut safe) };
    assert_eq!(status, CcStatus::InvalidArgument);
    assert!(trace.is_null());
    unsafe { cc_model_free(model) };
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        cc_model_free(ptr::null_mut());
        cc_string_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(cc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/compocheck.h")).unwrap();
    for name in [
        "cc_model_load",
        "cc_model_free",
        "cc_check",
        "cc_simulate",
        "cc_string_free",
        "cc_last_error",
        "cc_version",
        "CC_STATUS_PARSE_ERROR",
        "typedef struct CcModel CcModel",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// `target/<profile>` holding the static library built alongside this test.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = artifact_dir().join("libcompocheck_ffi.a");
    let have_cc = Command::new("cc").arg("--version").output().is_ok();
    if !have_cc || !lib.exists() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let out = tempfile_path("smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains(r#""delivered":1"#), "{stdout}");
    let _ = std::fs::remove_file(out);
}

fn tempfile_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("compocheck-{stem}-{}", std::process::id()))
}
