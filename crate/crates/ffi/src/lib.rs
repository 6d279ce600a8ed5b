//! C ABI over `ppcem`.
//!
//! Terms cross the boundary as opaque `PpcemTerm` handles owned by the
//! caller and released with [`ppcem_term_free`]. Strings returned by the
//! library are released with [`ppcem_string_free`]. Every fallible call
//! returns a [`PpcemStatus`]; on failure a message is kept per thread and
//! read back with [`ppcem_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ppcem::em::purify;
use ppcem::strategy::{run, strategy_by_name, Verdict};
use ppcem::subst::alpha_equiv;
use ppcem::{parse, Bottom, Term};

/// Opaque term handle.
pub struct PpcemTerm(Term);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpcemStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnknownStrategy = 4,
    /// The step budget ran out; the partial result is still written.
    BudgetExhausted = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> PpcemStatus) -> PpcemStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            PpcemStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, PpcemStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(PpcemStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        PpcemStatus::InvalidUtf8
    })
}

unsafe fn term_arg<'a>(t: *const PpcemTerm) -> Result<&'a Term, PpcemStatus> {
    match t.as_ref() {
        Some(t) => Ok(&t.0),
        None => {
            set_error("null term handle");
            Err(PpcemStatus::NullPointer)
        }
    }
}

fn into_handle(t: Term) -> *mut PpcemTerm {
    Box::into_raw(Box::new(PpcemTerm(t)))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Parse `src` into a new term written to `*out`.
///
/// # Safety
/// `src` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ppcem_parse(src: *const c_char, out: *mut *mut PpcemTerm) -> PpcemStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return PpcemStatus::NullPointer;
        }
        let src = tri!(str_arg(src));
        match parse(src) {
            Ok(t) => {
                *out = into_handle(t);
                PpcemStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                PpcemStatus::ParseError
            }
        }
    })
}

/// Release a term. Null is ignored.
///
/// # Safety
/// `t` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ppcem_term_free(t: *mut PpcemTerm) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ppcem_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Print a term in source syntax; null on a null handle.
///
/// # Safety
/// `t` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ppcem_term_print(t: *const PpcemTerm) -> *mut c_char {
    match term_arg(t) {
        Ok(t) => into_c_string(t.to_string()),
        Err(_) => ptr::null_mut(),
    }
}

/// Write whether `a` and `b` are equal up to renaming of bound names.
///
/// # Safety
/// `a`, `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ppcem_alpha_equiv(a: *const PpcemTerm, b: *const PpcemTerm, out: *mut bool) -> PpcemStatus {
    guard(|| {
        let (a, b) = (tri!(term_arg(a)), tri!(term_arg(b)));
        if out.is_null() {
            set_error("null output pointer");
            return PpcemStatus::NullPointer;
        }
        *out = alpha_equiv(a, b);
        PpcemStatus::Ok
    })
}

/// Reduce with the named strategy (`full`, `df-lr`, `df-reordered`,
/// `matching-driven`) for at most `max_steps` steps. The result is written
/// to `*out` and the number of steps to `*steps` (if non-null), also when
/// the budget runs out.
///
/// # Safety
/// `t` must be a live handle, `strategy` a nul-terminated string, `out` a
/// valid pointer and `steps` valid or null.
#[no_mangle]
pub unsafe extern "C" fn ppcem_reduce(
    t: *const PpcemTerm,
    strategy: *const c_char,
    max_steps: usize,
    out: *mut *mut PpcemTerm,
    steps: *mut usize,
) -> PpcemStatus {
    guard(|| {
        let t = tri!(term_arg(t));
        let name = tri!(str_arg(strategy));
        if out.is_null() {
            set_error("null output pointer");
            return PpcemStatus::NullPointer;
        }
        let Some(s) = strategy_by_name(name) else {
            set_error(format!("unknown strategy {name:?}"));
            return PpcemStatus::UnknownStrategy;
        };
        let r = run(t, s, max_steps, &Bottom::default());
        if !steps.is_null() {
            *steps = r.trace.len();
        }
        *out = into_handle(r.result);
        match r.verdict {
            Verdict::NormalForm => PpcemStatus::Ok,
            Verdict::BudgetExhausted => {
                set_error(format!("no normal form within {max_steps} steps"));
                PpcemStatus::BudgetExhausted
            }
        }
    })
}

/// Like [`ppcem_reduce`], but writes the trace as a JSON array of
/// `{step, path, rule, term}` objects to `*out`.
///
/// # Safety
/// As for [`ppcem_reduce`]; `*out` must be freed with [`ppcem_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ppcem_trace_json(
    t: *const PpcemTerm,
    strategy: *const c_char,
    max_steps: usize,
    out: *mut *mut c_char,
) -> PpcemStatus {
    guard(|| {
        let t = tri!(term_arg(t));
        let name = tri!(str_arg(strategy));
        if out.is_null() {
            set_error("null output pointer");
            return PpcemStatus::NullPointer;
        }
        let Some(s) = strategy_by_name(name) else {
            set_error(format!("unknown strategy {name:?}"));
            return PpcemStatus::UnknownStrategy;
        };
        let r = run(t, s, max_steps, &Bottom::default());
        *out = into_c_string(r.trace_json().to_string());
        match r.verdict {
            Verdict::NormalForm => PpcemStatus::Ok,
            Verdict::BudgetExhausted => PpcemStatus::BudgetExhausted,
        }
    })
}

/// Purification: `→p` normal form, then forget. `*pure` tells whether the
/// result has no matchings left.
///
/// # Safety
/// `t` must be a live handle, `out` and `pure` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ppcem_purify(t: *const PpcemTerm, out: *mut *mut PpcemTerm, pure: *mut bool) -> PpcemStatus {
    guard(|| {
        let t = tri!(term_arg(t));
        if out.is_null() || pure.is_null() {
            set_error("null output pointer");
            return PpcemStatus::NullPointer;
        }
        let (p, is_pure) = purify(t, &Bottom::default());
        *out = into_handle(p);
        *pure = is_pure;
        PpcemStatus::Ok
    })
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ppcem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn ppcem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
