//! C interface. Problems and analyses are opaque handles owned by the
//! caller and released with the matching `*_free`. Every fallible call
//! returns a `CfStatus`; on failure `cf_last_error` describes it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use canonframe::analysis::{analyze, verify, Analysis};
use canonframe::problem::Problem;
use canonframe::report::{render, ReportOptions};
use canonframe::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed problem or unusable input (CLI exit code 2).
    Input = 2,
    /// An identity that must hold failed (CLI exit code 3).
    Consistency = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

/// Opaque parsed problem.
pub struct CfProblem(Problem);

/// Opaque analysis result.
pub struct CfAnalysis(Analysis);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(e: Error) -> CfStatus {
    let status = match e.exit_code() {
        3 => CfStatus::Consistency,
        _ => CfStatus::Input,
    };
    set_error(e.to_string());
    status
}

fn guard(f: impl FnOnce() -> CfStatus) -> CfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            CfStatus::Panic
        }
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn cf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses problem text (`key = value` lines).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_problem_parse(text: *const c_char, out: *mut *mut CfProblem) -> CfStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return CfStatus::NullPointer;
        }
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            set_error("problem text is not UTF-8");
            return CfStatus::InvalidUtf8;
        };
        match Problem::parse(s) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(CfProblem(p)));
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `p` must come from `cf_problem_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cf_problem_free(p: *mut CfProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs the full pipeline.
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_analyze(p: *const CfProblem, out: *mut *mut CfAnalysis) -> CfStatus {
    guard(|| {
        if p.is_null() || out.is_null() {
            return CfStatus::NullPointer;
        }
        match analyze(&(*p).0) {
            Ok(a) => {
                *out = Box::into_raw(Box::new(CfAnalysis(a)));
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `a` must come from `cf_analyze` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cf_analysis_free(a: *mut CfAnalysis) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Verdicts of an analysis, as 0/1.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CfVerdicts {
    pub wunschmann: i32,
    pub equation_type: i32,
    pub flat: i32,
}

/// # Safety
/// `a` must be a live analysis handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_analysis_verdicts(a: *const CfAnalysis, out: *mut CfVerdicts) -> CfStatus {
    guard(|| {
        if a.is_null() || out.is_null() {
            return CfStatus::NullPointer;
        }
        let f = (*a).0.fingerprint();
        *out = CfVerdicts {
            wunschmann: f.wunschmann as i32,
            equation_type: f.equation_type as i32,
            flat: f.flat as i32,
        };
        CfStatus::Ok
    })
}

/// The text report; free it with `cf_string_free`.
///
/// # Safety
/// `a` must be a live analysis handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_analysis_report(a: *const CfAnalysis, out: *mut *mut c_char) -> CfStatus {
    guard(|| {
        if a.is_null() || out.is_null() {
            return CfStatus::NullPointer;
        }
        match render(&(*a).0, ReportOptions::default()) {
            Ok(s) => {
                *out = CString::new(s).unwrap_or_default().into_raw();
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs every identity check. `passed` receives 1 if all hold; failing
/// checks do not make the call itself fail.
///
/// # Safety
/// `p` must be a live problem handle and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_verify(p: *const CfProblem, passed: *mut i32) -> CfStatus {
    guard(|| {
        if p.is_null() || passed.is_null() {
            return CfStatus::NullPointer;
        }
        match verify(&(*p).0, None) {
            Ok(v) => {
                *passed = v.passed() as i32;
                if !v.passed() {
                    let names: Vec<&str> = v.failures().map(|c| c.name.as_str()).collect();
                    set_error(format!("failed: {}", names.join("; ")));
                }
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
