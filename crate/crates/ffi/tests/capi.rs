use std::ffi::{CStr, CString};
use std::ptr;

use ppcem_ffi::*;

fn parse(src: &str) -> *mut PpcemTerm {
    let src = CString::new(src).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ppcem_parse(src.as_ptr(), &mut out) }, PpcemStatus::Ok);
    out
}

fn print(t: *const PpcemTerm) -> String {
    unsafe {
        let s = ppcem_term_print(t);
        let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
        ppcem_string_free(s);
        out
    }
}

#[test]
fn parse_print_free() {
    let t = parse("([x] ^c ^x -> x) (^c t)");
    assert_eq!(print(t), "([x] ^c ^x -> x) (^c t)");
    unsafe { ppcem_term_free(t) };
}

#[test]
fn parse_error_sets_message() {
    let src = CString::new("([x] ^c").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { ppcem_parse(src.as_ptr(), &mut out) };
    assert_eq!(status, PpcemStatus::ParseError);
    assert!(out.is_null());
    let msg = unsafe { CStr::from_ptr(ppcem_last_error()) };
    assert!(!msg.to_bytes().is_empty());
}

#[test]
fn reduce_matches_golden_result() {
    let t = parse("([x] ^c ^x -> x) (^c ^y)");
    let strategy = CString::new("df-lr").unwrap();
    let mut out = ptr::null_mut();
    let mut steps = 0;
    let status = unsafe { ppcem_reduce(t, strategy.as_ptr(), 100, &mut out, &mut steps) };
    assert_eq!(status, PpcemStatus::Ok);
    assert_eq!(steps, 7);
    let expected = parse("^y");
    let mut eq = false;
    assert_eq!(unsafe { ppcem_alpha_equiv(out, expected, &mut eq) }, PpcemStatus::Ok);
    assert!(eq);
    unsafe {
        ppcem_term_free(t);
        ppcem_term_free(out);
        ppcem_term_free(expected);
    }
}

#[test]
fn budget_and_unknown_strategy() {
    let t = parse("([x] ^x -> x x) ([x] ^x -> x x)");
    let full = CString::new("full").unwrap();
    let mut out = ptr::null_mut();
    let mut steps = 0;
    let status = unsafe { ppcem_reduce(t, full.as_ptr(), 20, &mut out, &mut steps) };
    assert_eq!(status, PpcemStatus::BudgetExhausted);
    assert_eq!(steps, 20);
    assert!(!out.is_null());
    unsafe { ppcem_term_free(out) };

    let bogus = CString::new("eager").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { ppcem_reduce(t, bogus.as_ptr(), 20, &mut out, ptr::null_mut()) };
    assert_eq!(status, PpcemStatus::UnknownStrategy);
    assert!(out.is_null());
    unsafe { ppcem_term_free(t) };
}

#[test]
fn trace_json_lists_steps() {
    let t = parse("([x] ^c ^x -> x) (^c ^y)");
    let strategy = CString::new("df-lr").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ppcem_trace_json(t, strategy.as_ptr(), 100, &mut s) }, PpcemStatus::Ok);
    let json = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    assert!(json.starts_with('['));
    assert_eq!(json.matches("\"rule\"").count(), 7);
    assert!(json.contains("ResolveSubst"));
    unsafe {
        ppcem_string_free(s);
        ppcem_term_free(t);
    }
}

#[test]
fn purify_pending_matching() {
    let t = parse("x[x; {}; (^c ^d ~ ^c ^x)]");
    let mut out = ptr::null_mut();
    let mut pure = false;
    assert_eq!(unsafe { ppcem_purify(t, &mut out, &mut pure) }, PpcemStatus::Ok);
    assert!(pure);
    assert_eq!(print(out), "^d");
    unsafe {
        ppcem_term_free(t);
        ppcem_term_free(out);
    }
}

#[test]
fn null_handles_are_rejected() {
    let mut eq = false;
    let status = unsafe { ppcem_alpha_equiv(ptr::null(), ptr::null(), &mut eq) };
    assert_eq!(status, PpcemStatus::NullPointer);
    assert!(unsafe { ppcem_term_print(ptr::null()) }.is_null());
    unsafe {
        ppcem_term_free(ptr::null_mut());
        ppcem_string_free(ptr::null_mut());
    }
}

#[test]
fn header_is_generated() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ppcem.h")).unwrap();
    for sym in ["ppcem_parse", "ppcem_reduce", "ppcem_last_error", "typedef struct PpcemTerm PpcemTerm", "PPCEM_STATUS_BUDGET_EXHAUSTED"] {
        assert!(header.contains(sym), "missing {sym}");
    }
}
