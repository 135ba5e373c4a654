//! C ABI over the defekt library.
//!
//! Conventions:
//! - Every function returns a [`DefektStatus`]; results come back through out
//!   pointers.
//! - Values live behind the opaque handle [`DefektValue`]; free with
//!   [`defekt_value_free`].
//! - Strings returned through out pointers are NUL-terminated, allocated by
//!   this library, and must be released with [`defekt_string_free`].
//! - On a non-Ok status, [`defekt_last_error_message`] returns a description of the
//!   failure for the current thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::ptr;

use libc::c_char;

use defekt::catalog::{self, RunParams};
use defekt::cli::{self, Config};
use defekt::cuts::{classify_as_defect, Cut, CutKind, DenseGroup};
use defekt::error::Error;
use defekt::scalars::{Prime, Rational};

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefektStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed input: parse error, unknown example id, parameter range.
    UsageError = 3,
    /// A mathematical precondition failed (division by zero, indeterminate
    /// valuation, hypothesis violation, ...).
    MathError = 4,
    /// The requested catalog example ran but at least one check failed.
    CheckFailed = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DefektStatus {
    if err.is_usage() {
        DefektStatus::UsageError
    } else {
        DefektStatus::MathError
    }
}

fn fail(err: &Error) -> DefektStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Last error message for the current thread, or NULL when the previous call
/// succeeded. The caller owns the returned string.
#[no_mangle]
pub extern "C" fn defekt_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string allocated by this library.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned by a defekt function
/// that hands ownership to the caller, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn defekt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, DefektStatus> {
    if ptr.is_null() {
        set_error("NULL string argument");
        return Err(DefektStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        DefektStatus::InvalidUtf8
    })
}

fn out_string(s: String, out: *mut *mut c_char) -> DefektStatus {
    let c = match CString::new(s) {
        Ok(c) => c,
        Err(_) => {
            set_error("output contained an interior NUL byte");
            return DefektStatus::MathError;
        }
    };
    unsafe { *out = c.into_raw() };
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    DefektStatus::Ok
}

fn config(prime: u64, prec: Option<&str>) -> Result<Config, DefektStatus> {
    let prime = Prime::new(prime).map_err(|e| fail(&e))?;
    let precision = match prec {
        Some(s) => s.parse::<Rational>().map_err(|e| fail(&e))?,
        None => Rational::integer(8),
    };
    Ok(Config {
        prime,
        precision,
        depth: 5,
        json: true,
        seed: 0,
    })
}

enum Inner {
    Series(defekt::HahnSeries),
    Padic(defekt::RamifiedPadic),
}

/// Opaque handle to an evaluated value in one of the two domains.
pub struct DefektValue {
    inner: Inner,
}

/// Evaluate an expression (series or p-adic domain) into a value handle.
///
/// `prec` is a rational string such as "8" or "-1/64"; pass NULL for the
/// default of 8. Valuation queries `v(...)` are not values; use
/// [`defekt_value_valuation`] instead.
///
/// # Safety
/// `expr` and (when non-NULL) `prec` must point to NUL-terminated strings;
/// `out` must be a valid pointer to a pointer slot.
#[no_mangle]
pub unsafe extern "C" fn defekt_value_eval(
    expr: *const c_char,
    prime: u64,
    prec: *const c_char,
    out: *mut *mut DefektValue,
) -> DefektStatus {
    if out.is_null() {
        set_error("NULL out pointer");
        return DefektStatus::NullPointer;
    }
    let expr = match read_str(expr) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let prec = if prec.is_null() {
        None
    } else {
        match read_str(prec) {
            Ok(s) => Some(s),
            Err(st) => return st,
        }
    };
    let cfg = match config(prime, prec) {
        Ok(c) => c,
        Err(st) => return st,
    };
    match cli::eval_value(&cfg, expr) {
        Ok(cli::DomainValue::Series(s)) => {
            *out = Box::into_raw(Box::new(DefektValue {
                inner: Inner::Series(s),
            }));
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DefektStatus::Ok
        }
        Ok(cli::DomainValue::Padic(x)) => {
            *out = Box::into_raw(Box::new(DefektValue {
                inner: Inner::Padic(x),
            }));
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DefektStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Canonical text form of a value.
///
/// # Safety
/// `value` must be a live handle from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn defekt_value_format(
    value: *const DefektValue,
    out: *mut *mut c_char,
) -> DefektStatus {
    if value.is_null() || out.is_null() {
        set_error("NULL argument");
        return DefektStatus::NullPointer;
    }
    let rendered = match &(*value).inner {
        Inner::Series(s) => s.to_string(),
        Inner::Padic(x) => x.to_string(),
    };
    out_string(rendered, out)
}

/// Valuation of a value, rendered as "q", ">= q" or "infinite".
///
/// # Safety
/// `value` must be a live handle from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn defekt_value_valuation(
    value: *const DefektValue,
    out: *mut *mut c_char,
) -> DefektStatus {
    if value.is_null() || out.is_null() {
        set_error("NULL argument");
        return DefektStatus::NullPointer;
    }
    let v = match &(*value).inner {
        Inner::Series(s) => s.valuation(),
        Inner::Padic(x) => x.valuation(),
    };
    out_string(v.to_string(), out)
}

unsafe fn binop(
    a: *const DefektValue,
    b: *const DefektValue,
    out: *mut *mut DefektValue,
    f_series: impl Fn(
        &defekt::HahnSeries,
        &defekt::HahnSeries,
    ) -> Result<defekt::HahnSeries, Error>,
    f_padic: impl Fn(
        &defekt::RamifiedPadic,
        &defekt::RamifiedPadic,
    ) -> Result<defekt::RamifiedPadic, Error>,
) -> DefektStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        set_error("NULL argument");
        return DefektStatus::NullPointer;
    }
    let result = match (&(*a).inner, &(*b).inner) {
        (Inner::Series(x), Inner::Series(y)) => f_series(x, y).map(Inner::Series),
        (Inner::Padic(x), Inner::Padic(y)) => f_padic(x, y).map(Inner::Padic),
        _ => Err(Error::DomainMismatch(
            "operands live in different domains".into(),
        )),
    };
    match result {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(DefektValue { inner }));
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DefektStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Sum of two values from the same domain.
///
/// # Safety
/// All handles must be live handles from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn defekt_value_add(
    a: *const DefektValue,
    b: *const DefektValue,
    out: *mut *mut DefektValue,
) -> DefektStatus {
    binop(a, b, out, |x, y| x.add(y), |x, y| x.add(y))
}

/// Product of two values from the same domain.
///
/// # Safety
/// All handles must be live handles from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn defekt_value_mul(
    a: *const DefektValue,
    b: *const DefektValue,
    out: *mut *mut DefektValue,
) -> DefektStatus {
    binop(a, b, out, |x, y| x.mul(y), |x, y| x.mul(y))
}

/// Release a value handle.
///
/// # Safety
/// `value` must be NULL or a live handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn defekt_value_free(value: *mut DefektValue) {
    if !value.is_null() {
        drop(Box::from_raw(value));
    }
}

/// Run a catalog example; `out_json` receives the full report (sorted keys).
/// Returns `CheckFailed` when the report ran but did not pass.
///
/// # Safety
/// `id` must be a NUL-terminated string, `prec` NULL or the same, and
/// `out_json` a valid pointer slot.
#[no_mangle]
pub unsafe extern "C" fn defekt_example_run_json(
    id: *const c_char,
    prime: u64,
    depth: u32,
    prec: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
) -> DefektStatus {
    if out_json.is_null() {
        set_error("NULL out pointer");
        return DefektStatus::NullPointer;
    }
    let id = match read_str(id) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let precision = if prec.is_null() {
        None
    } else {
        match read_str(prec) {
            Ok(s) => match s.parse::<Rational>() {
                Ok(q) => Some(q),
                Err(e) => return fail(&e),
            },
            Err(st) => return st,
        }
    };
    let params = RunParams {
        prime,
        depth,
        precision,
        seed,
    };
    match catalog::run_example(id, &params) {
        Ok(report) => {
            let passed = report.passed;
            let st = out_string(report.to_json(), out_json);
            if st != DefektStatus::Ok {
                return st;
            }
            if passed {
                DefektStatus::Ok
            } else {
                set_error("example report contains failed checks");
                DefektStatus::CheckFailed
            }
        }
        Err(e) => fail(&e),
    }
}

/// JSON array describing the example registry.
///
/// # Safety
/// `out_json` must be a valid pointer slot.
#[no_mangle]
pub unsafe extern "C" fn defekt_example_list_json(out_json: *mut *mut c_char) -> DefektStatus {
    if out_json.is_null() {
        set_error("NULL out pointer");
        return DefektStatus::NullPointer;
    }
    let infos = catalog::list_examples();
    let v = serde_json_value(&infos);
    out_string(v, out_json)
}

fn serde_json_value<T: serde::Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("renders");
    s.push('\n');
    s
}

/// Classify a cut literal ("empty" | "lt:q" | "le:q" | "all") over the dense
/// group Z[1/p]; the verdict string is "Independent" or "Dependent".
///
/// # Safety
/// `literal` must be a NUL-terminated string and `out_verdict` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn defekt_classify(
    literal: *const c_char,
    prime: u64,
    out_verdict: *mut *mut c_char,
) -> DefektStatus {
    if out_verdict.is_null() {
        set_error("NULL out pointer");
        return DefektStatus::NullPointer;
    }
    let literal = match read_str(literal) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let prime = match Prime::new(prime) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let kind = match literal.parse::<CutKind>() {
        Ok(k) => k,
        Err(e) => return fail(&e),
    };
    let group = match DenseGroup::p_fractions(prime, Rational::one()) {
        Ok(g) => g,
        Err(e) => return fail(&e),
    };
    match classify_as_defect(&Cut::new(kind, group)) {
        Ok(verdict) => out_string(verdict.to_string(), out_verdict),
        Err(e) => fail(&e),
    }
}

/// Newton polygon of a polynomial source (see the CLI grammar); the result
/// is the same JSON the `defekt np --json` command prints.
///
/// # Safety
/// `poly` must be a NUL-terminated string, `prec` NULL or the same, and
/// `out_json` a valid pointer slot.
#[no_mangle]
pub unsafe extern "C" fn defekt_newton_polygon_json(
    poly: *const c_char,
    prime: u64,
    prec: *const c_char,
    out_json: *mut *mut c_char,
) -> DefektStatus {
    if out_json.is_null() {
        set_error("NULL out pointer");
        return DefektStatus::NullPointer;
    }
    let poly = match read_str(poly) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let prec = if prec.is_null() {
        None
    } else {
        match read_str(prec) {
            Ok(s) => Some(s),
            Err(st) => return st,
        }
    };
    let cfg = match config(prime, prec) {
        Ok(c) => c,
        Err(st) => return st,
    };
    match cli::np_cmd(&cfg, poly) {
        Ok(outcome) => out_string(outcome.text, out_json),
        Err(e) => fail(&e),
    }
}
