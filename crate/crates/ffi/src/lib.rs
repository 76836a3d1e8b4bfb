//! C ABI over the core library.
//!
//! Conventions: every entry point returns a `TbStatus`; results come back
//! through out-pointers.  Slopes and representations are opaque handles freed
//! by their matching `_free`.  Strings returned through `char**` are owned by
//! the caller and freed with `tb_string_free`.  On any non-OK status a
//! human-readable message is kept per thread and retrieved with
//! `tb_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fmt::Display;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use twobridge::farey::Slope;
use twobridge::riley::{self, Representation};
use twobridge::words::u_word;
use twobridge::{decide, orbit, Error};

/// Result of every C entry point.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum TbStatus {
    /// Success.
    Ok = 0,
    /// The text or pair did not describe a slope.
    InvalidSlope = 1,
    /// A precondition of the question was violated.
    Precondition = 2,
    /// Root finding or series evaluation failed numerically.
    Numerical = 3,
    /// A required pointer argument was NULL.
    NullPointer = 4,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 5,
    /// Unexpected internal failure.
    Internal = 6,
}

/// Opaque rational slope handle.
pub struct TbSlope(Slope);

/// Opaque parabolic-representation handle.
pub struct TbRep(Representation);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Display) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).ok();
    });
}

fn fail(status: TbStatus, msg: impl Display) -> TbStatus {
    set_error(msg);
    status
}

fn fail_err(err: Error) -> TbStatus {
    let status = match &err {
        Error::InvalidSlope(_) => TbStatus::InvalidSlope,
        Error::Precondition(_) => TbStatus::Precondition,
        Error::IterationLimit(_)
        | Error::RootFinding(_)
        | Error::RootSelection(_)
        | Error::Numerical(_) => TbStatus::Numerical,
        _ => TbStatus::Internal,
    };
    fail(status, err)
}

fn guard(f: impl FnOnce() -> TbStatus) -> TbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(TbStatus::Internal, "internal panic"),
    }
}

unsafe fn slope_ref<'a>(p: *const TbSlope) -> Option<&'a Slope> {
    p.as_ref().map(|s| &s.0)
}

unsafe fn rep_ref<'a>(p: *const TbRep) -> Option<&'a Representation> {
    p.as_ref().map(|r| &r.0)
}

fn give_string(text: String, out: *mut *mut c_char) -> TbStatus {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(_) => return fail(TbStatus::Internal, "string contained NUL"),
    };
    unsafe { *out = c.into_raw() };
    TbStatus::Ok
}

macro_rules! need {
    ($ptr:expr) => {
        match $ptr {
            Some(v) => v,
            None => return fail(TbStatus::NullPointer, "NULL argument"),
        }
    };
}

// ---------------------------------------------------------------------------
// Strings and errors
// ---------------------------------------------------------------------------

/// Frees a string returned by this library.  NULL is allowed.
#[no_mangle]
pub extern "C" fn tb_string_free(s: *mut c_char) {
    if !s.is_null() {
        unsafe { drop(CString::from_raw(s)) };
    }
}

/// Copies the message of the last error on this thread into `*out`, or sets
/// `*out` to NULL when no error has occurred.  Caller frees the string.
#[no_mangle]
pub extern "C" fn tb_last_error(out: *mut *mut c_char) -> TbStatus {
    if out.is_null() {
        return TbStatus::NullPointer;
    }
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => give_string(msg.to_string_lossy().into_owned(), out),
        None => {
            unsafe { *out = std::ptr::null_mut() };
            TbStatus::Ok
        }
    })
}

// ---------------------------------------------------------------------------
// Slopes
// ---------------------------------------------------------------------------

/// Parses `text` as "q/p", an integer, or "inf" into a new slope handle.
#[no_mangle]
pub extern "C" fn tb_slope_parse(text: *const c_char, out: *mut *mut TbSlope) -> TbStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let text = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(t) => t,
            Err(_) => return fail(TbStatus::InvalidUtf8, "slope text is not UTF-8"),
        };
        match text.parse::<Slope>() {
            Ok(s) => {
                unsafe { *out = Box::into_raw(Box::new(TbSlope(s))) };
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

/// Builds the slope `num/den`; `den` may be 0 for the point at infinity.
#[no_mangle]
pub extern "C" fn tb_slope_from_fraction(
    num: i64,
    den: i64,
    out: *mut *mut TbSlope,
) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        match Slope::new_int(num, den) {
            Ok(s) => {
                unsafe { *out = Box::into_raw(Box::new(TbSlope(s))) };
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

/// Frees a slope handle.  NULL is allowed.
#[no_mangle]
pub extern "C" fn tb_slope_free(s: *mut TbSlope) {
    if !s.is_null() {
        unsafe { drop(Box::from_raw(s)) };
    }
}

/// Writes the canonical "q/p" form of a slope.  Caller frees the string.
#[no_mangle]
pub extern "C" fn tb_slope_to_string(s: *const TbSlope, out: *mut *mut c_char) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let s = need!(unsafe { slope_ref(s) });
        give_string(s.to_string(), out)
    })
}

// ---------------------------------------------------------------------------
// Words and normalization
// ---------------------------------------------------------------------------

/// Writes the relator word of `r` in the letters a, a', b, b'.  Caller frees
/// the string.
#[no_mangle]
pub extern "C" fn tb_relator_word(r: *const TbSlope, out: *mut *mut c_char) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let r = need!(unsafe { slope_ref(r) });
        match u_word(r) {
            Ok(w) => give_string(w.to_string(), out),
            Err(e) => fail_err(e),
        }
    })
}

/// Normalizes `s` under the reflection group of `r` into a new handle.
#[no_mangle]
pub extern "C" fn tb_normalize(
    r: *const TbSlope,
    s: *const TbSlope,
    out: *mut *mut TbSlope,
) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let r = need!(unsafe { slope_ref(r) });
        let s = need!(unsafe { slope_ref(s) });
        match orbit::orbit_normalize(r, s) {
            Ok((nf, _)) => {
                unsafe { *out = Box::into_raw(Box::new(TbSlope(nf))) };
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

// ---------------------------------------------------------------------------
// Decision procedures
// ---------------------------------------------------------------------------

/// Is the loop of slope `s` null-homotopic in the link group of `r`?
#[no_mangle]
pub extern "C" fn tb_is_null_homotopic(
    r: *const TbSlope,
    s: *const TbSlope,
    out: *mut bool,
) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let r = need!(unsafe { slope_ref(r) });
        let s = need!(unsafe { slope_ref(s) });
        match decide::is_null_homotopic(r, s) {
            Ok(v) => {
                unsafe { *out = v.null_homotopic };
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

/// Are the loops of slopes `s` and `t` freely homotopic in the link group of
/// `r`?  `allow_mirror` permits deciding `r > 1/2` through the mirror.
#[no_mangle]
pub extern "C" fn tb_are_homotopic(
    r: *const TbSlope,
    s: *const TbSlope,
    t: *const TbSlope,
    allow_mirror: bool,
    out: *mut bool,
) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let r = need!(unsafe { slope_ref(r) });
        let s = need!(unsafe { slope_ref(s) });
        let t = need!(unsafe { slope_ref(t) });
        match decide::are_homotopic(r, s, t, allow_mirror) {
            Ok(v) => {
                unsafe { *out = v.outcome != decide::HomotopyOutcome::NotHomotopic };
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

/// Is the loop of slope `s` peripheral in the link group of `r`?
#[no_mangle]
pub extern "C" fn tb_is_peripheral(
    r: *const TbSlope,
    s: *const TbSlope,
    allow_mirror: bool,
    out: *mut bool,
) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let r = need!(unsafe { slope_ref(r) });
        let s = need!(unsafe { slope_ref(s) });
        match decide::peripheral_status(r, s, allow_mirror) {
            Ok(v) => {
                unsafe { *out = v.peripheral };
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

/// Writes 1 when the loop of slope `s` is primitive, otherwise the exponent
/// k for which it is the k-th power of a primitive element.
#[no_mangle]
pub extern "C" fn tb_primitive_power(
    r: *const TbSlope,
    s: *const TbSlope,
    allow_mirror: bool,
    out: *mut u8,
) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let r = need!(unsafe { slope_ref(r) });
        let s = need!(unsafe { slope_ref(s) });
        match decide::primitivity(r, s, allow_mirror) {
            Ok(v) => {
                let power = match v.primitivity {
                    decide::Primitivity::Primitive => 1,
                    decide::Primitivity::PowerOfPrimitive(k) => k,
                };
                unsafe { *out = power };
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

/// Does `s` or `s+1` witness the standard epimorphism for `r`?
#[no_mangle]
pub extern "C" fn tb_has_epimorphism(
    r: *const TbSlope,
    s: *const TbSlope,
    out: *mut bool,
) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let r = need!(unsafe { slope_ref(r) });
        let s = need!(unsafe { slope_ref(s) });
        match decide::has_epimorphism(r, s) {
            Ok(v) => {
                unsafe { *out = v.epimorphism };
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

// ---------------------------------------------------------------------------
// Representations and series
// ---------------------------------------------------------------------------

/// Builds the geometric parabolic representation for `r`.
#[no_mangle]
pub extern "C" fn tb_rep_geometric(r: *const TbSlope, out: *mut *mut TbRep) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let r = need!(unsafe { slope_ref(r) });
        match riley::geometric_representation(r) {
            Ok(rep) => {
                unsafe { *out = Box::into_raw(Box::new(TbRep(rep))) };
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

/// Builds the representation for `r` at the defining-polynomial root nearest
/// to `re + im*i`.
#[no_mangle]
pub extern "C" fn tb_rep_with_omega(
    r: *const TbSlope,
    re: f64,
    im: f64,
    out: *mut *mut TbRep,
) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let r = need!(unsafe { slope_ref(r) });
        match riley::representation_with_omega(r, Complex64::new(re, im)) {
            Ok(rep) => {
                unsafe { *out = Box::into_raw(Box::new(TbRep(rep))) };
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

/// Frees a representation handle.  NULL is allowed.
#[no_mangle]
pub extern "C" fn tb_rep_free(rep: *mut TbRep) {
    if !rep.is_null() {
        unsafe { drop(Box::from_raw(rep)) };
    }
}

/// Writes the representation parameter.
#[no_mangle]
pub extern "C" fn tb_rep_omega(rep: *const TbRep, re: *mut f64, im: *mut f64) -> TbStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let rep = need!(unsafe { rep_ref(rep) });
        let omega = rep.omega();
        unsafe {
            *re = omega.re;
            *im = omega.im;
        }
        TbStatus::Ok
    })
}

/// Writes the trace of the image of the loop of slope `s`.
#[no_mangle]
pub extern "C" fn tb_trace(
    rep: *const TbRep,
    s: *const TbSlope,
    re: *mut f64,
    im: *mut f64,
) -> TbStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let rep = need!(unsafe { rep_ref(rep) });
        let s = need!(unsafe { slope_ref(s) });
        match riley::trace_of_slope(rep, s) {
            Ok(t) => {
                unsafe {
                    *re = t.re;
                    *im = t.im;
                }
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

/// Evaluates the boundary weight series up to denominator `max_den`, pruning
/// subtrees whose weight bound falls below `prune_eps`.  Writes the partial
/// sum and the accumulated tail bound.
#[no_mangle]
pub extern "C" fn tb_mcshane_sum(
    rep: *const TbRep,
    prune_eps: f64,
    max_den: u64,
    sum_re: *mut f64,
    sum_im: *mut f64,
    tail: *mut f64,
) -> TbStatus {
    guard(|| {
        if sum_re.is_null() || sum_im.is_null() || tail.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let rep = need!(unsafe { rep_ref(rep) });
        match riley::mcshane_sum(rep, prune_eps, max_den) {
            Ok(report) => {
                unsafe {
                    *sum_re = report.partial_sum.re;
                    *sum_im = report.partial_sum.im;
                    *tail = report.tail_estimate;
                }
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}

/// Evaluates the cusp modulus over the lower interval up to denominator
/// `max_den`.  Writes the complex modulus.
#[no_mangle]
pub extern "C" fn tb_cusp_modulus(
    rep: *const TbRep,
    prune_eps: f64,
    max_den: u64,
    lambda_re: *mut f64,
    lambda_im: *mut f64,
) -> TbStatus {
    guard(|| {
        if lambda_re.is_null() || lambda_im.is_null() {
            return fail(TbStatus::NullPointer, "NULL argument");
        }
        let rep = need!(unsafe { rep_ref(rep) });
        match riley::cusp_modulus(rep, prune_eps, max_den) {
            Ok(report) => {
                unsafe {
                    *lambda_re = report.lambda.re;
                    *lambda_im = report.lambda.im;
                }
                TbStatus::Ok
            }
            Err(e) => fail_err(e),
        }
    })
}
