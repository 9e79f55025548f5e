use std::ffi::{CStr, CString};
use std::ptr;

use canonframe_ffi::*;

fn parse(text: &str) -> (CfStatus, *mut CfProblem) {
    let c = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    let s = unsafe { cf_problem_parse(c.as_ptr(), &mut p) };
    (s, p)
}

fn last_error() -> String {
    let e = cf_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_str().unwrap().to_string()
}

#[test]
fn analyze_round_trip() {
    let (s, p) = parse("k = 3\nrhs = x0^2\nsamples = 2\n");
    assert_eq!(s, CfStatus::Ok);
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { cf_analyze(p, &mut a) }, CfStatus::Ok);
    let mut v = CfVerdicts::default();
    assert_eq!(unsafe { cf_analysis_verdicts(a, &mut v) }, CfStatus::Ok);
    assert_eq!(v, CfVerdicts { wunschmann: 0, equation_type: 1, flat: 0 });
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { cf_analysis_report(a, &mut text) }, CfStatus::Ok);
    let report = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_string();
    assert!(report.starts_with("format = canonframe-report/1"));
    assert!(report.contains("verdict = not flat"));
    unsafe {
        cf_string_free(text);
        cf_analysis_free(a);
        cf_problem_free(p);
    }
}

#[test]
fn verify_flat() {
    let (_, p) = parse("k = 4\nrhs = 0\n");
    let mut passed = 0;
    assert_eq!(unsafe { cf_verify(p, &mut passed) }, CfStatus::Ok);
    assert_eq!(passed, 1);
    unsafe { cf_problem_free(p) };
}

#[test]
fn error_codes() {
    let (s, p) = parse("k = 2\nrhs = 0\n");
    assert_eq!(s, CfStatus::Input);
    assert!(p.is_null());
    assert!(last_error().contains("k must exceed 2"));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cf_problem_parse(ptr::null(), &mut out) }, CfStatus::NullPointer);
    assert_eq!(unsafe { cf_analyze(ptr::null(), ptr::null_mut()) }, CfStatus::NullPointer);

    let bad = [0xffu8, 0];
    assert_eq!(unsafe { cf_problem_parse(bad.as_ptr().cast(), &mut out) }, CfStatus::InvalidUtf8);

    let (s, _) = parse("k = 3\nrhs = 0\n");
    assert_eq!(s, CfStatus::Ok);
    assert!(cf_last_error().is_null());

    // freeing null is a no-op
    unsafe {
        cf_problem_free(ptr::null_mut());
        cf_analysis_free(ptr::null_mut());
        cf_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_exports() {
    let h = include_str!("../include/canonframe.h");
    for f in [
        "cf_last_error",
        "cf_problem_parse",
        "cf_problem_free",
        "cf_analyze",
        "cf_analysis_free",
        "cf_analysis_verdicts",
        "cf_analysis_report",
        "cf_string_free",
        "cf_verify",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct CfProblem CfProblem;"));
    assert!(h.contains("CF_STATUS_CONSISTENCY = 3"));
}
