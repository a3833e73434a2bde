//! C interface to frobforge.
//!
//! Every fallible function returns a [`FrobforgeStatus`]; on failure the
//! message is available from [`frobforge_last_error`] on the same thread.
//! Strings handed out by the library must be released with
//! [`frobforge_string_free`], charts with [`frobforge_chart_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use frobforge::frobenius::{check_wdvv, FMChart};
use frobforge::{json, Error};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrobforgeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    MalformedJson = 3,
    SchemaViolation = 4,
    NumericFailure = 5,
    Panic = 6,
}

/// Opaque Frobenius manifold chart.
pub struct FrobforgeChart {
    chart: FMChart,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FrobforgeStatus {
    match e {
        Error::Json(_) => FrobforgeStatus::MalformedJson,
        Error::Schema(_) => FrobforgeStatus::SchemaViolation,
        e if e.is_numeric() => FrobforgeStatus::NumericFailure,
        _ => FrobforgeStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (FrobforgeStatus, String)>) -> FrobforgeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FrobforgeStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FrobforgeStatus::Panic
        }
    }
}

fn lib(e: Error) -> (FrobforgeStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (FrobforgeStatus, String) {
    (FrobforgeStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (FrobforgeStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (FrobforgeStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (FrobforgeStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s).map_err(|_| (FrobforgeStatus::InvalidInput, "string contains nul".into()))?.into_raw();
    Ok(())
}

unsafe fn write_chart(out: *mut *mut FrobforgeChart, chart: FMChart) -> Result<(), (FrobforgeStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(FrobforgeChart { chart }));
    Ok(())
}

unsafe fn chart_ref<'a>(c: *const FrobforgeChart) -> Result<&'a FMChart, (FrobforgeStatus, String)> {
    c.as_ref().map(|c| &c.chart).ok_or_else(|| null("chart"))
}

unsafe fn read_point(re: *const f64, im: *const f64, n: usize) -> Result<Vec<Complex64>, (FrobforgeStatus, String)> {
    if re.is_null() {
        return Err(null("real parts"));
    }
    let re = std::slice::from_raw_parts(re, n);
    let im: &[f64] = if im.is_null() { &[] } else { std::slice::from_raw_parts(im, n) };
    Ok((0..n).map(|k| Complex64::new(re[k], im.get(k).copied().unwrap_or(0.0))).collect())
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn frobforge_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn frobforge_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `chart` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn frobforge_chart_free(chart: *mut FrobforgeChart) {
    if !chart.is_null() {
        drop(Box::from_raw(chart));
    }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn frobforge_chart_build_an(n: usize, out: *mut *mut FrobforgeChart) -> FrobforgeStatus {
    guard(|| write_chart(out, frobforge::singularity::build_an_chart(n).map_err(lib)?))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn frobforge_chart_build_p2(degree: u32, out: *mut *mut FrobforgeChart) -> FrobforgeStatus {
    guard(|| write_chart(out, frobforge::quantum::build_p2_chart(degree).map_err(lib)?))
}

/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn frobforge_chart_from_json(text: *const c_char, out: *mut *mut FrobforgeChart) -> FrobforgeStatus {
    guard(|| {
        let v = json::parse(read_str(text, "text")?).map_err(lib)?;
        write_chart(out, json::chart_from_json(&v).map_err(lib)?)
    })
}

/// # Safety
/// `chart` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn frobforge_chart_to_json(chart: *const FrobforgeChart, out: *mut *mut c_char) -> FrobforgeStatus {
    guard(|| write_string(out, json::to_pretty(&json::chart_to_json(chart_ref(chart)?))))
}

/// Dimension of the chart, 0 for a null handle.
///
/// # Safety
/// `chart` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn frobforge_chart_dim(chart: *const FrobforgeChart) -> usize {
    chart.as_ref().map_or(0, |c| c.chart.dim())
}

/// Number of associativity residuals that are not identically zero.
///
/// # Safety
/// `chart` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn frobforge_chart_wdvv_residuals(chart: *const FrobforgeChart, out: *mut usize) -> FrobforgeStatus {
    guard(|| {
        let report = check_wdvv(chart_ref(chart)?);
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = report.nonzero.len();
        Ok(())
    })
}

/// Canonical coordinates at `t`, sorted. `t_im` and `u_im` may be null
/// for real input and output respectively.
///
/// # Safety
/// Arrays must hold `n` doubles, `n` being the chart dimension.
#[no_mangle]
pub unsafe extern "C" fn frobforge_canonical_coordinates(
    chart: *const FrobforgeChart,
    t_re: *const f64,
    t_im: *const f64,
    n: usize,
    u_re: *mut f64,
    u_im: *mut f64,
) -> FrobforgeStatus {
    guard(|| {
        let chart = chart_ref(chart)?;
        if n != chart.dim() {
            return Err((FrobforgeStatus::InvalidInput, format!("chart dimension is {}, got {n}", chart.dim())));
        }
        let t = read_point(t_re, t_im, n)?;
        let u = frobforge::frame::canonical_coordinates(chart, &t).map_err(lib)?;
        if u_re.is_null() {
            return Err(null("u_re"));
        }
        for (k, z) in u.iter().enumerate() {
            *u_re.add(k) = z.re;
            if !u_im.is_null() {
                *u_im.add(k) = z.im;
            }
        }
        Ok(())
    })
}

/// `G(t1) − G(t0)` along the straight segment.
///
/// # Safety
/// Point arrays must hold `n` doubles; imaginary arrays may be null.
#[no_mangle]
pub unsafe extern "C" fn frobforge_g_function(
    chart: *const FrobforgeChart,
    t0_re: *const f64,
    t0_im: *const f64,
    t1_re: *const f64,
    t1_im: *const f64,
    n: usize,
    tol: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> FrobforgeStatus {
    guard(|| {
        let chart = chart_ref(chart)?;
        if n != chart.dim() {
            return Err((FrobforgeStatus::InvalidInput, format!("chart dimension is {}, got {n}", chart.dim())));
        }
        let (t0, t1) = (read_point(t0_re, t0_im, n)?, read_point(t1_re, t1_im, n)?);
        let g = frobforge::isomonodromy::g_function(chart, &t0, &t1, tol).map_err(lib)?;
        if out_re.is_null() || out_im.is_null() {
            return Err(null("output pointer"));
        }
        *out_re = g.delta_g.re;
        *out_im = g.delta_g.im;
        Ok(())
    })
}

/// The Stokes matrix of P^d as JSON.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn frobforge_pd_stokes_json(d: usize, out: *mut *mut c_char) -> FrobforgeStatus {
    guard(|| {
        let s = frobforge::monodromy::pd_stokes(d).map_err(lib)?;
        write_string(out, json::qmatrix_to_int_json(&s).to_string())
    })
}

/// Applies a braid word such as `"1,-2,1"` to a Stokes matrix given as JSON.
///
/// # Safety
/// `s_json` and `word` must be nul-terminated strings, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn frobforge_braid_json(
    s_json: *const c_char,
    word: *const c_char,
    out: *mut *mut c_char,
) -> FrobforgeStatus {
    guard(|| {
        let s = json::qmatrix_from_json(&json::parse(read_str(s_json, "s_json")?).map_err(lib)?).map_err(lib)?;
        let w = frobforge::monodromy::parse_word(read_str(word, "word")?).map_err(lib)?;
        let (s2, _) = frobforge::monodromy::braid_word(&s, None, &w).map_err(lib)?;
        write_string(out, json::qmatrix_to_int_json(&s2).to_string())
    })
}

/// Runs one acceptance criterion (1 to 13). `passed` receives 1 or 0;
/// `detail` may be null.
///
/// # Safety
/// `passed` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn frobforge_selftest(
    id: u32,
    seed: u64,
    passed: *mut c_int,
    detail: *mut *mut c_char,
) -> FrobforgeStatus {
    guard(|| {
        if !(1..=13).contains(&id) {
            return Err((FrobforgeStatus::InvalidInput, format!("criterion {id} is out of range 1..=13")));
        }
        if passed.is_null() {
            return Err(null("passed"));
        }
        let r = frobforge::selftest::run_criterion(id, seed);
        *passed = c_int::from(r.passed);
        if !detail.is_null() {
            write_string(detail, r.to_string())?;
        }
        Ok(())
    })
}
