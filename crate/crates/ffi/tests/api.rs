use std::ffi::{CStr, CString};
use std::ptr;

use diffusion_entropy_ffi::*;

fn model(toml: &str) -> *mut DeModel {
    let src = CString::new(toml).unwrap();
    let mut m = ptr::null_mut();
    let s = unsafe { de_model_from_toml(src.as_ptr(), &mut m) };
    assert_eq!(s, DeStatus::Ok, "{}", last_error());
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let p = de_last_error_message();
    if p.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }
}

fn empty() -> DeMeasure {
    DeMeasure { value: f64::NAN, abs_err_est: f64::NAN, method: DeMethod::Quadrature }
}

#[test]
fn normal_law_measures() {
    let m = model("family = \"ou\"\n[params]\ntheta = 1.0\nmu = 0.0\n");
    let mut r = empty();
    unsafe {
        assert_eq!(de_model_shannon(m, &mut r), DeStatus::Ok);
        assert!((r.value - 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln()).abs() < 1e-13);
        assert_eq!(r.method, DeMethod::Closed);

        assert_eq!(de_model_renyi(m, 2.0, &mut r), DeStatus::Ok);
        assert!((r.value - (2.0 * std::f64::consts::PI.sqrt()).ln()).abs() < 1e-13);

        assert_eq!(de_model_song(m, &mut r), DeStatus::Ok);
        assert!((r.value - 0.5).abs() < 1e-13);

        let mut lf = 0.0;
        assert_eq!(de_model_log_density(m, 0.0, &mut lf), DeStatus::Ok);
        assert!((lf + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-14);
        de_model_free(m);
    }
    assert!(de_last_error_message().is_null());
}

#[test]
fn params_constructor_and_divergence() {
    let family = CString::new("ou").unwrap();
    let mu = CString::new("mu").unwrap();
    let names = [mu.as_ptr()];
    let (mut f, mut g) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(de_model_from_params(family.as_ptr(), ptr::null(), ptr::null(), 0, &mut f), DeStatus::Ok);
        assert_eq!(de_model_from_params(family.as_ptr(), names.as_ptr(), [1.0].as_ptr(), 1, &mut g), DeStatus::Ok);
        let (mut d, mut psi) = (f64::NAN, f64::NAN);
        assert_eq!(de_divergence(f, g, 0.5, &mut d, &mut psi), DeStatus::Ok);
        let alpha: f64 = 0.5;
        let exact = (-alpha * (1.0 - alpha) / 2.0).exp();
        assert!((psi - (exact - 1.0) / (alpha * (alpha - 1.0))).abs() < 1e-9, "{psi}");
        assert!(d.is_finite() && d > 0.0);
        let mut same = f64::NAN;
        assert_eq!(de_divergence(f, f, 2.0, &mut same, ptr::null_mut()), DeStatus::Ok);
        assert!(same.abs() < 1e-12);
        de_model_free(f);
        de_model_free(g);
    }
}

#[test]
fn spectrum_rows() {
    let m = model("family = \"cir\"\n[params]\nmu = 2.0\n");
    let alphas = [0.25, 0.5, 2.0, 4.0];
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(de_spectrum_compute(m, alphas.as_ptr(), alphas.len(), &mut s), DeStatus::Ok);
        assert_eq!(de_spectrum_len(s), 5);
        let mut prev = f64::INFINITY;
        for i in 0..de_spectrum_len(s) {
            let (mut a, mut v, mut flag) = (0.0, empty(), DeRowFlag::Error);
            assert_eq!(de_spectrum_row(s, i, &mut a, &mut v, &mut flag), DeStatus::Ok);
            assert_eq!(flag, DeRowFlag::None);
            assert!(v.value <= prev + 1e-12, "row {i}");
            prev = v.value;
        }
        let (mut a, mut v, mut flag) = (0.0, empty(), DeRowFlag::None);
        assert_eq!(de_spectrum_row(s, 5, &mut a, &mut v, &mut flag), DeStatus::OutOfRange);
        de_spectrum_free(s);
        de_model_free(m);
    }
}

#[test]
fn divergent_row_is_flagged() {
    let m = model("family = \"cir\"\n[params]\nmu = 0.5\n");
    let alphas = [0.5, 2.5];
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(de_spectrum_compute(m, alphas.as_ptr(), alphas.len(), &mut s), DeStatus::Ok);
        let (mut a, mut v, mut flag) = (0.0, empty(), DeRowFlag::None);
        assert_eq!(de_spectrum_row(s, 2, &mut a, &mut v, &mut flag), DeStatus::Ok);
        assert_eq!(a, 2.5);
        assert_eq!(flag, DeRowFlag::Divergent);
        assert!(v.value.is_nan());
        de_spectrum_free(s);

        let mut r = empty();
        assert_eq!(de_model_renyi(m, 2.5, &mut r), DeStatus::Divergent);
        de_model_free(m);
    }
}

#[test]
fn errors_are_reported() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(de_model_from_toml(ptr::null(), &mut m), DeStatus::NullPointer);
        assert!(!de_last_error_message().is_null());

        let bad = CString::new("family = \"nope\"").unwrap();
        assert_eq!(de_model_from_toml(bad.as_ptr(), &mut m), DeStatus::Config);
        assert!(m.is_null());

        let neg = CString::new("family = \"ou\"\n[params]\ntheta = -1.0\n").unwrap();
        assert_eq!(de_model_from_toml(neg.as_ptr(), &mut m), DeStatus::Domain);
        assert!(last_error().contains("theta"), "{}", last_error());

        let invalid = [b'o', b'u', 0xff, 0];
        assert_eq!(de_model_from_params(invalid.as_ptr().cast(), ptr::null(), ptr::null(), 0, &mut m), DeStatus::InvalidUtf8);

        let missing = CString::new("/nonexistent/model.toml").unwrap();
        assert_eq!(de_model_from_file(missing.as_ptr(), &mut m), DeStatus::Io);

        let ou = model("family = \"ou\"");
        let mut r = empty();
        assert_eq!(de_model_renyi(ou, f64::NAN, &mut r), DeStatus::Domain);
        assert_eq!(de_model_renyi(ou, 2.0, ptr::null_mut()), DeStatus::NullPointer);
        assert_eq!(de_model_set_tolerance(ou, 2.0), DeStatus::Domain);
        assert_eq!(de_model_set_tolerance(ou, 1e-8), DeStatus::Ok);
        assert_eq!(de_model_song(ptr::null(), &mut r), DeStatus::NullPointer);
        de_model_free(ou);
        de_model_free(ptr::null_mut());
        de_spectrum_free(ptr::null_mut());
        assert_eq!(de_spectrum_len(ptr::null()), 0);
    }
}

#[test]
fn status_names() {
    let name = |s| unsafe { CStr::from_ptr(de_status_name(s)) }.to_str().unwrap().to_owned();
    assert_eq!(name(DeStatus::Ok), "ok");
    assert_eq!(name(DeStatus::Divergent), "divergent");
    assert_eq!(name(DeStatus::Panic), "panic");
}
