use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use frobforge_ffi::*;

fn take(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { frobforge_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(frobforge_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn chart_lifecycle() {
    let mut chart = ptr::null_mut();
    assert_eq!(unsafe { frobforge_chart_build_an(3, &mut chart) }, FrobforgeStatus::Ok);
    assert_eq!(unsafe { frobforge_chart_dim(chart) }, 3);
    let mut residuals = usize::MAX;
    assert_eq!(unsafe { frobforge_chart_wdvv_residuals(chart, &mut residuals) }, FrobforgeStatus::Ok);
    assert_eq!(residuals, 0);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { frobforge_chart_to_json(chart, &mut text) }, FrobforgeStatus::Ok);
    let text = CString::new(take(text)).unwrap();
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { frobforge_chart_from_json(text.as_ptr(), &mut again) }, FrobforgeStatus::Ok);
    assert_eq!(unsafe { frobforge_chart_dim(again) }, 3);
    unsafe {
        frobforge_chart_free(chart);
        frobforge_chart_free(again);
    }
}

#[test]
fn canonical_coordinates_and_g() {
    let mut chart = ptr::null_mut();
    unsafe { frobforge_chart_build_an(2, &mut chart) };
    let t = [0.5, 1.0];
    let (mut ure, mut uim) = ([0.0; 2], [0.0; 2]);
    let st = unsafe { frobforge_canonical_coordinates(chart, t.as_ptr(), ptr::null(), 2, ure.as_mut_ptr(), uim.as_mut_ptr()) };
    assert_eq!(st, FrobforgeStatus::Ok);
    assert!(ure.iter().chain(&uim).all(|x| x.is_finite()));
    assert!((ure[0] - ure[1]).abs() + (uim[0] - uim[1]).abs() > 1e-6);

    let t1 = [1.5, 1.0];
    let (mut gre, mut gim) = (f64::NAN, f64::NAN);
    let st = unsafe {
        frobforge_g_function(chart, t.as_ptr(), ptr::null(), t1.as_ptr(), ptr::null(), 2, 1e-10, &mut gre, &mut gim)
    };
    assert_eq!(st, FrobforgeStatus::Ok);
    assert!(gre.hypot(gim) < 1e-8);

    let zero = [0.0, 0.0];
    let st = unsafe { frobforge_canonical_coordinates(chart, zero.as_ptr(), ptr::null(), 2, ure.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(st, FrobforgeStatus::NumericFailure);
    assert!(last_error().contains("semisimple"));
    unsafe { frobforge_chart_free(chart) };
}

#[test]
fn error_statuses() {
    let mut chart = ptr::null_mut();
    let bad = CString::new("{oops").unwrap();
    assert_eq!(unsafe { frobforge_chart_from_json(bad.as_ptr(), &mut chart) }, FrobforgeStatus::MalformedJson);
    assert!(last_error().starts_with("malformed JSON"));
    let partial = CString::new(r#"{"n": 2}"#).unwrap();
    assert_eq!(unsafe { frobforge_chart_from_json(partial.as_ptr(), &mut chart) }, FrobforgeStatus::SchemaViolation);
    assert_eq!(unsafe { frobforge_chart_from_json(ptr::null(), &mut chart) }, FrobforgeStatus::NullPointer);
    assert_eq!(unsafe { frobforge_chart_build_an(0, &mut chart) }, FrobforgeStatus::InvalidInput);
    assert_eq!(unsafe { frobforge_chart_dim(ptr::null()) }, 0);
    unsafe { frobforge_string_free(ptr::null_mut()) };
}

#[test]
fn stokes_and_braid() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { frobforge_pd_stokes_json(2, &mut out) }, FrobforgeStatus::Ok);
    assert_eq!(take(out), "[[1,3,3],[0,1,3],[0,0,1]]");

    let s = CString::new("[[1,3,3],[0,1,3],[0,0,1]]").unwrap();
    let w = CString::new("2,-2").unwrap();
    assert_eq!(unsafe { frobforge_braid_json(s.as_ptr(), w.as_ptr(), &mut out) }, FrobforgeStatus::Ok);
    assert_eq!(take(out), "[[1,3,3],[0,1,3],[0,0,1]]");

    let w = CString::new("0").unwrap();
    assert_eq!(unsafe { frobforge_braid_json(s.as_ptr(), w.as_ptr(), &mut out) }, FrobforgeStatus::InvalidInput);
}

#[test]
fn selftest_entry_point() {
    let mut passed: c_int = -1;
    let mut detail = ptr::null_mut();
    assert_eq!(unsafe { frobforge_selftest(3, 1, &mut passed, &mut detail) }, FrobforgeStatus::Ok);
    assert_eq!(passed, 1);
    assert!(take(detail).starts_with("PASS"));
    assert_eq!(unsafe { frobforge_selftest(14, 1, &mut passed, ptr::null_mut()) }, FrobforgeStatus::InvalidInput);
}
