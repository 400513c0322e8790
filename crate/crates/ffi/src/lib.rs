//! C ABI over the thetalift library.
//!
//! Objects are opaque handles created by `tl_*_new`/`tl_*_from_*` and released with the
//! matching `tl_*_free`. Every fallible call returns a [`TlStatus`]; on failure the message
//! is available from [`tl_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use thetalift::bessel::k_scaled;
use thetalift::bounds::{sup_exponent, y0_exponent};
use thetalift::lattice::{count_shells, Lattice};
use thetalift::lift::{Lift, LiftOptions};
use thetalift::maass::{FormOptions, MaassForm};
use thetalift::petersson::norm_ratio;
use thetalift::Error;

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidLattice = 3,
    InvalidForm = 4,
    InsufficientHecke = 5,
    OutOfRange = 6,
    Domain = 7,
    Quadrature = 8,
    MissingNorm = 9,
    Budget = 10,
    Config = 11,
    Parse = 12,
    Io = 13,
    Panic = 14,
}

impl From<&Error> for TlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidLattice(_) => TlStatus::InvalidLattice,
            Error::InvalidForm(_) => TlStatus::InvalidForm,
            Error::InsufficientHecke(_) => TlStatus::InsufficientHecke,
            Error::OutOfRange { .. } => TlStatus::OutOfRange,
            Error::Domain(_) => TlStatus::Domain,
            Error::Quadrature { .. } => TlStatus::Quadrature,
            Error::MissingNorm => TlStatus::MissingNorm,
            Error::Budget { .. } => TlStatus::Budget,
            Error::Config(_) => TlStatus::Config,
            Error::Parse(_) => TlStatus::Parse,
            Error::Io(_) => TlStatus::Io,
        }
    }
}

/// Opaque lattice handle.
pub struct TlLattice(Lattice);

/// Opaque Maass form handle.
pub struct TlForm(MaassForm);

/// Opaque lift handle: a lattice and a form ready for evaluation.
pub struct TlLift(Lift);

/// Result of [`tl_lift_evaluate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TlLiftValue {
    pub value_re: f64,
    pub value_im: f64,
    /// ln of the scale e^{−πr/2}y^{N/2}; value = e^{ln_scale}·mantissa.
    pub ln_scale: f64,
    pub mantissa_re: f64,
    pub mantissa_im: f64,
    pub truncation_m: u64,
    pub tail_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), TlStatus>) -> TlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            TlStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            TlStatus::Panic
        }
    }
}

fn lib<T>(r: thetalift::Result<T>) -> Result<T, TlStatus> {
    r.map_err(|e| {
        let s = TlStatus::from(&e);
        set_error(e.to_string());
        s
    })
}

fn fail(status: TlStatus, msg: &str) -> TlStatus {
    set_error(msg.into());
    status
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, TlStatus> {
    if p.is_null() {
        return Err(fail(TlStatus::NullPointer, &format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TlStatus::InvalidArgument, &format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, TlStatus> {
    p.as_mut().ok_or_else(|| fail(TlStatus::NullPointer, &format!("{what} is null")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, TlStatus> {
    p.as_ref().ok_or_else(|| fail(TlStatus::NullPointer, &format!("{what} is null")))
}

/// Message for the last failed call on this thread; empty after a success. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn tl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Built-in lattice by name: "E8", "E8xE8" or "D16plus".
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_lattice_builtin(name: *const c_char, out: *mut *mut TlLattice) -> TlStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let l = lib(Lattice::builtin(str_arg(name, "name")?))?;
        *out = Box::into_raw(Box::new(TlLattice(l)));
        Ok(())
    })
}

/// Lattice from JSON text `{"rank": N, "gram": [[...]]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_lattice_from_json(json: *const c_char, out: *mut *mut TlLattice) -> TlStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let l = lib(Lattice::from_json_str(str_arg(json, "json")?))?;
        *out = Box::into_raw(Box::new(TlLattice(l)));
        Ok(())
    })
}

/// # Safety
/// `lat` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tl_lattice_free(lat: *mut TlLattice) {
    if !lat.is_null() {
        drop(Box::from_raw(lat));
    }
}

/// Rank of the lattice, or 0 for a null handle.
///
/// # Safety
/// `lat` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_lattice_rank(lat: *const TlLattice) -> usize {
    lat.as_ref().map_or(0, |l| l.0.rank())
}

/// Writes r(1), ..., r(max_norm) to `counts`, which must hold `max_norm` entries.
///
/// # Safety
/// `lat` must be a live handle and `counts` valid for `max_norm` writes.
#[no_mangle]
pub unsafe extern "C" fn tl_lattice_shell_counts(lat: *const TlLattice, max_norm: u64, counts: *mut u64) -> TlStatus {
    guard(|| {
        let l = handle(lat, "lattice")?;
        if counts.is_null() {
            return Err(fail(TlStatus::NullPointer, "counts is null"));
        }
        if max_norm == 0 {
            return Err(fail(TlStatus::InvalidArgument, "max_norm must be at least 1"));
        }
        let c = count_shells(&l.0, max_norm);
        let dst = std::slice::from_raw_parts_mut(counts, max_norm as usize);
        dst.copy_from_slice(&c[1..]);
        Ok(())
    })
}

/// Form from JSON text with fields r, parity, c1, norm_sq and hecke.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_form_from_json(json: *const c_char, out: *mut *mut TlForm) -> TlStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let f = lib(MaassForm::from_json_str(str_arg(json, "json")?, &FormOptions::default()))?;
        *out = Box::into_raw(Box::new(TlForm(f)));
        Ok(())
    })
}

/// Shipped sample form: "sample-even" or "sample-odd".
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_form_sample(name: *const c_char, out: *mut *mut TlForm) -> TlStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let f = lib(MaassForm::sample(str_arg(name, "name")?, &FormOptions::default()))?;
        *out = Box::into_raw(Box::new(TlForm(f)));
        Ok(())
    })
}

/// # Safety
/// `form` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tl_form_free(form: *mut TlForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Spectral parameter r, or NaN for a null handle.
///
/// # Safety
/// `form` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_form_r(form: *const TlForm) -> f64 {
    form.as_ref().map_or(f64::NAN, |f| f.0.r())
}

/// e^{πr/2}K_{ir}(y).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_k_scaled(r: f64, y: f64, out: *mut f64) -> TlStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = lib(k_scaled(r, y))?;
        Ok(())
    })
}

/// Lift of `form` to `lat` with default options. Both inputs are copied.
///
/// # Safety
/// `lat` and `form` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_lift_new(lat: *const TlLattice, form: *const TlForm, out: *mut *mut TlLift) -> TlStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let (l, f) = (handle(lat, "lattice")?, handle(form, "form")?);
        let lift = lib(Lift::new(l.0.clone(), f.0.clone(), LiftOptions::default()))?;
        *out = Box::into_raw(Box::new(TlLift(lift)));
        Ok(())
    })
}

/// # Safety
/// `lift` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tl_lift_free(lift: *mut TlLift) {
    if !lift.is_null() {
        drop(Box::from_raw(lift));
    }
}

/// F(n(x)a_y) with tail bound ≤ tol·e^{−πr/2}y^{N/2}. `x` holds `n` = rank coordinates.
///
/// # Safety
/// `lift` must be a live handle, `x` valid for `n` reads and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_lift_evaluate(
    lift: *const TlLift,
    x: *const f64,
    n: usize,
    y: f64,
    tol: f64,
    out: *mut TlLiftValue,
) -> TlStatus {
    guard(|| {
        let lift = handle(lift, "lift")?;
        let out = out_arg(out, "out")?;
        if x.is_null() {
            return Err(fail(TlStatus::NullPointer, "x is null"));
        }
        if !(tol > 0.0) {
            return Err(fail(TlStatus::InvalidArgument, "tol must be positive"));
        }
        let xs = std::slice::from_raw_parts(x, n);
        let e = lib(lift.0.evaluate(xs, y, tol))?;
        *out = TlLiftValue {
            value_re: e.value.re,
            value_im: e.value.im,
            ln_scale: e.ln_scale,
            mantissa_re: e.mantissa.re,
            mantissa_im: e.mantissa.im,
            truncation_m: e.truncation_m,
            tail_bound: e.tail_bound,
        };
        Ok(())
    })
}

/// ‖F‖²/‖f‖² for rank `rank` with the Euler product over p ≤ primes.
///
/// # Safety
/// `form` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_norm_ratio(form: *const TlForm, rank: usize, primes: u64, out: *mut f64) -> TlStatus {
    guard(|| {
        let f = handle(form, "form")?;
        let out = out_arg(out, "out")?;
        *out = lib(norm_ratio(&f.0, rank, primes))?.ratio;
        Ok(())
    })
}

/// Exponents of y₀ in r and of the sup-norm bound in Λ for θ = theta_num/theta_den, as
/// reduced fractions.
///
/// # Safety
/// All output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tl_bound_exponents(
    rank: usize,
    theta_num: i64,
    theta_den: i64,
    y0_num: *mut i64,
    y0_den: *mut i64,
    sup_num: *mut i64,
    sup_den: *mut i64,
) -> TlStatus {
    guard(|| {
        let outs = [y0_num, y0_den, sup_num, sup_den];
        if outs.iter().any(|p| p.is_null()) {
            return Err(fail(TlStatus::NullPointer, "output pointer is null"));
        }
        if theta_den <= 0 || theta_num < 0 || 4 * theta_num >= theta_den {
            return Err(fail(TlStatus::InvalidArgument, "theta must lie in [0, 1/4) with positive denominator"));
        }
        if rank == 0 || rank % 8 != 0 {
            return Err(fail(TlStatus::InvalidArgument, "rank must be a positive multiple of 8"));
        }
        let th = thetalift::bounds::Q::new(theta_num, theta_den);
        let (e, s) = (y0_exponent(rank, th), sup_exponent(rank, th));
        *y0_num = *e.numer();
        *y0_den = *e.denom();
        *sup_num = *s.numer();
        *sup_den = *s.denom();
        Ok(())
    })
}
