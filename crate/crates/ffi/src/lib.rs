//! C ABI over `gauss_reliability`.
//!
//! Every fallible call returns a [`GrStatus`] and writes its result through
//! an out-pointer. After a non-zero status, `gr_last_error_message` returns
//! the message for the calling thread. Objects are opaque: create with
//! `gr_*_new`, release with `gr_*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gauss_reliability::bounds::{rate_grid, BoundCurve, BoundKind, Bounds};
use gauss_reliability::codes::{gen_code, ml_decode_error_mc, CodeKind, SphericalCode};
use gauss_reliability::functions::{self, ChannelParams};
use gauss_reliability::geometry;
use gauss_reliability::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    NoBracket = 3,
    NoConvergence = 4,
    AccuracyRegime = 5,
    Vacuous = 6,
    Overflow = 7,
    EmptySupport = 8,
    InvalidCode = 9,
    OutOfRange = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrBoundKind {
    UpperT1 = 0,
    UpperT2 = 1,
    Lower = 2,
    SpherePacking = 3,
    StraightLine = 4,
    Exact = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrCodeKind {
    Random = 0,
    Simplex = 1,
    Biorthogonal = 2,
    Pair = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GrThresholds {
    pub a: f64,
    pub capacity: f64,
    pub r_crit: f64,
    pub r_bar1: f64,
    pub r_bar2: f64,
    pub r_bar3: f64,
    pub r_low: f64,
    pub tau_bar1: f64,
    pub t_bar1: f64,
    pub t_bar2: f64,
    pub tau_bar2: f64,
    pub a_const: f64,
    pub a0: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GrDecodingEstimate {
    pub p_e_hat: f64,
    pub half_width: f64,
    pub errors: u64,
    pub trials: u64,
}

/// Opaque spherical code.
pub struct GrCode(SphericalCode);

/// Opaque sampled bound curve.
pub struct GrCurve(BoundCurve);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GrStatus {
    match e {
        Error::Domain { .. } => GrStatus::Domain,
        Error::NoBracket { .. } => GrStatus::NoBracket,
        Error::NoConvergence { .. } => GrStatus::NoConvergence,
        Error::AccuracyRegime { .. } => GrStatus::AccuracyRegime,
        Error::Vacuous { .. } => GrStatus::Vacuous,
        Error::Overflow { .. } => GrStatus::Overflow,
        Error::EmptySupport => GrStatus::EmptySupport,
        Error::InvalidCode(_) => GrStatus::InvalidCode,
    }
}

fn guard<F: FnOnce() -> Result<(), GrStatus>>(f: F) -> GrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GrStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside gauss_reliability");
            GrStatus::Panic
        }
    }
}

fn lift<T>(r: Result<T, Error>) -> Result<T, GrStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn null(what: &str) -> GrStatus {
    set_error(&format!("{what} is null"));
    GrStatus::NullPointer
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), GrStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for a write of one `GrThresholds`.
#[no_mangle]
pub unsafe extern "C" fn gr_thresholds(a: f64, out: *mut GrThresholds) -> GrStatus {
    guard(|| {
        let th = lift(ChannelParams::new(a).and_then(functions::thresholds))?;
        let v = GrThresholds {
            a: th.a,
            capacity: th.capacity,
            r_crit: th.r_crit,
            r_bar1: th.r_bar1,
            r_bar2: th.r_bar2,
            r_bar3: th.r_bar3,
            r_low: th.r_low,
            tau_bar1: th.tau_bar1,
            t_bar1: th.t_bar1,
            t_bar2: th.t_bar2,
            tau_bar2: th.tau_bar2,
            a_const: th.a_const,
            a0: th.a0,
        };
        write(out, v, "out")
    })
}

unsafe fn scalar<F>(out: *mut f64, f: F) -> GrStatus
where
    F: FnOnce() -> Result<f64, Error>,
{
    guard(|| {
        let v = lift(f())?;
        write(out, v, "out")
    })
}

/// Sphere-packing exponent at rate `r`.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn gr_e_sp(a: f64, r: f64, out: *mut f64) -> GrStatus {
    scalar(out, || functions::e_sp(r, ChannelParams::new(a)?))
}

/// Parametric rate `(1+t)ln(1+t) − t ln t`.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn gr_rate_of_t(t: f64, out: *mut f64) -> GrStatus {
    scalar(out, || functions::rate_of_t(t))
}

/// Inverse of `gr_rate_of_t`.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn gr_t_of_rate(r: f64, out: *mut f64) -> GrStatus {
    scalar(out, || functions::t_of_rate(r))
}

/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn gr_j_spectrum(t: f64, rho: f64, out: *mut f64) -> GrStatus {
    scalar(out, || functions::j_spectrum(t, rho))
}

/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn gr_upper_bound_t1(a: f64, r: f64, out: *mut f64) -> GrStatus {
    scalar(out, || gauss_reliability::bounds::upper_bound_t1(r, ChannelParams::new(a)?))
}

/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn gr_upper_bound_t2(a: f64, r: f64, out: *mut f64) -> GrStatus {
    scalar(out, || gauss_reliability::bounds::upper_bound_t2(r, ChannelParams::new(a)?))
}

/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn gr_lower_bound(a: f64, r: f64, out: *mut f64) -> GrStatus {
    scalar(out, || gauss_reliability::bounds::lower_bound(r, ChannelParams::new(a)?))
}

/// Direct numeric solution of the min-max problem.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn gr_minmax_numeric(a: f64, r: f64, out: *mut f64) -> GrStatus {
    scalar(out, || Ok(gauss_reliability::bounds::theorem2_numeric(r, ChannelParams::new(a)?)?.value))
}

/// Natural log of the area of a cap of half-angle `theta` on the unit sphere in `R^n`.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn gr_cap_area_log(n: usize, theta: f64, out: *mut f64) -> GrStatus {
    scalar(out, || geometry::cap_area_log(geometry::CapSpec::new(n, theta)?))
}

/// Rankin bound on the size of a code with minimum angle `2 phi`.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn gr_rankin_bound(n: usize, phi: f64, out: *mut f64) -> GrStatus {
    scalar(out, || geometry::rankin_bound(n, phi))
}

/// Log of the cardinality bound for codes with maximum correlation `mu`.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn gr_cardinality_bound_log(n: usize, mu: f64, out: *mut f64) -> GrStatus {
    scalar(out, || geometry::lemma4_bound_log(n, mu))
}

/// Generates a code; `rho` is used only by `Pair`.
///
/// # Safety
/// `out` must be valid for a write of one pointer. The result must be
/// released with `gr_code_free`.
#[no_mangle]
pub unsafe extern "C" fn gr_code_new(
    kind: GrCodeKind,
    n: usize,
    m: usize,
    a: f64,
    rho: f64,
    seed: u64,
    out: *mut *mut GrCode,
) -> GrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match kind {
            GrCodeKind::Random => CodeKind::RandomUniform,
            GrCodeKind::Simplex => CodeKind::Simplex,
            GrCodeKind::Biorthogonal => CodeKind::Biorthogonal,
            GrCodeKind::Pair => CodeKind::Pair { rho },
        };
        let code = lift(ChannelParams::new(a).and_then(|p| gen_code(kind, n, m, p, seed)))?;
        out.write(Box::into_raw(Box::new(GrCode(code))));
        Ok(())
    })
}

/// # Safety
/// `code` must come from `gr_code_new` and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gr_code_free(code: *mut GrCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// # Safety
/// `code` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn gr_code_size(code: *const GrCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.m())
}

/// # Safety
/// `code` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn gr_code_dim(code: *const GrCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.n())
}

/// Copies codeword `index` (length `gr_code_dim`) into `buf`.
///
/// # Safety
/// `code` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gr_code_codeword(code: *const GrCode, index: usize, buf: *mut f64, len: usize) -> GrStatus {
    guard(|| {
        let c = code.as_ref().ok_or_else(|| null("code"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let w = c.0.codewords().get(index).ok_or_else(|| {
            set_error(&format!("codeword index {index} out of range (M = {})", c.0.m()));
            GrStatus::OutOfRange
        })?;
        if len < w.len() {
            set_error(&format!("buffer holds {len} values, codeword has {}", w.len()));
            return Err(GrStatus::OutOfRange);
        }
        ptr::copy_nonoverlapping(w.as_ptr(), buf, w.len());
        Ok(())
    })
}

/// Monte Carlo estimate of the ML decoding error probability.
///
/// # Safety
/// `code` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gr_code_decode_mc(
    code: *const GrCode,
    trials: u64,
    seed: u64,
    out: *mut GrDecodingEstimate,
) -> GrStatus {
    guard(|| {
        let c = code.as_ref().ok_or_else(|| null("code"))?;
        let est = lift(ml_decode_error_mc(&c.0, trials, seed))?;
        let v = GrDecodingEstimate {
            p_e_hat: est.p_e_hat,
            half_width: est.half_width,
            errors: est.errors,
            trials: est.trials,
        };
        write(out, v, "out")
    })
}

/// Samples a bound on `count` equally spaced rates in `[rmin, rmax]`.
/// Some kinds skip rates where they are undefined; use `gr_curve_len`.
///
/// # Safety
/// `out` must be valid for one pointer write. Release with `gr_curve_free`.
#[no_mangle]
pub unsafe extern "C" fn gr_curve_new(
    kind: GrBoundKind,
    a: f64,
    rmin: f64,
    rmax: f64,
    count: usize,
    out: *mut *mut GrCurve,
) -> GrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match kind {
            GrBoundKind::UpperT1 => BoundKind::UpperT1,
            GrBoundKind::UpperT2 => BoundKind::UpperT2,
            GrBoundKind::Lower => BoundKind::LowerClassical,
            GrBoundKind::SpherePacking => BoundKind::SpherePackingClosed,
            GrBoundKind::StraightLine => BoundKind::StraightLine,
            GrBoundKind::Exact => BoundKind::Exact,
        };
        let curve = lift(
            ChannelParams::new(a)
                .and_then(Bounds::new)
                .and_then(|b| b.curve(kind, &rate_grid(rmin, rmax, count)?)),
        )?;
        out.write(Box::into_raw(Box::new(GrCurve(curve))));
        Ok(())
    })
}

/// # Safety
/// `curve` must come from `gr_curve_new` and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gr_curve_free(curve: *mut GrCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// # Safety
/// `curve` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn gr_curve_len(curve: *const GrCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.samples.len())
}

/// # Safety
/// `curve` must be a live handle; `rate` and `value` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn gr_curve_get(curve: *const GrCurve, index: usize, rate: *mut f64, value: *mut f64) -> GrStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        let &(r, e) = c.0.samples.get(index).ok_or_else(|| {
            set_error(&format!("sample index {index} out of range (len = {})", c.0.samples.len()));
            GrStatus::OutOfRange
        })?;
        write(rate, r, "rate")?;
        write(value, e, "value")
    })
}
