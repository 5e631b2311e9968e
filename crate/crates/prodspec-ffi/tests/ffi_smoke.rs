//! Drives the extern "C" surface from Rust: handle lifecycle, status
//! codes, last-error retrieval, and agreement with the native API.

use std::f64::consts::PI;
use std::os::raw::c_char;
use std::ptr;

use prodspec_ffi::*;

fn last_error_string() -> String {
    let mut buf = vec![0 as c_char; 512];
    let len = unsafe { ps_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..len.min(buf.len() - 1)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn version_is_a_nul_terminated_semver() {
    let p = ps_version();
    assert!(!p.is_null());
    let s = unsafe { std::ffi::CStr::from_ptr(p) }.to_str().unwrap();
    assert_eq!(s.split('.').count(), 3);
}

#[test]
fn ensemble_round_trip_and_route_agreement() {
    let nus = [0u32];
    let b = [0.3f64, -0.3];
    let mut h: *mut PsEnsemble = ptr::null_mut();
    let st = unsafe { ps_ensemble_new(2, nus.as_ptr(), 1, b.as_ptr(), 2, &mut h) };
    assert_eq!(st, PsStatus::Ok);
    assert!(!h.is_null());
    assert_eq!(unsafe { ps_ensemble_n(h) }, 2);

    let (mut v1, mut e1) = (0.0f64, 0.0f64);
    assert_eq!(unsafe { ps_kernel_contour(h, 0.5, 0.7, &mut v1, &mut e1) }, PsStatus::Ok);
    let (mut v2, mut e2) = (0.0f64, 0.0f64);
    assert_eq!(unsafe { ps_kernel_biortho(h, 0.5, 0.7, &mut v2, &mut e2) }, PsStatus::Ok);
    assert!((v1 - v2).abs() <= 1e-8 * v2.abs().max(1.0), "routes disagree: {v1} vs {v2}");
    assert!(e1 >= 0.0 && e2 >= 0.0);

    unsafe { ps_ensemble_free(h) };
    unsafe { ps_ensemble_free(ptr::null_mut()) };
}

#[test]
fn rejected_inputs_report_status_and_message() {
    let mut h: *mut PsEnsemble = ptr::null_mut();
    let st = unsafe { ps_ensemble_new(0, ptr::null(), 0, ptr::null(), 0, &mut h) };
    assert_eq!(st, PsStatus::InvalidArgument);
    assert!(!last_error_string().is_empty());
    assert!(h.is_null());

    let st = unsafe { ps_ensemble_new(1, ptr::null(), 0, [0.0f64].as_ptr(), 1, ptr::null_mut()) };
    assert_eq!(st, PsStatus::NullPointer);

    let st = unsafe { ps_ensemble_new(1, ptr::null(), 0, ptr::null(), 1, &mut h) };
    assert_eq!(st, PsStatus::NullPointer);

    // Coincident source eigenvalues: contour route works, biorthogonal
    // inversion is an invalid-argument failure.
    let b = [0.4f64, 0.4];
    let st = unsafe { ps_ensemble_new(2, ptr::null(), 0, b.as_ptr(), 2, &mut h) };
    assert_eq!(st, PsStatus::Ok);
    let (mut v, mut e) = (0.0f64, 0.0f64);
    assert_eq!(unsafe { ps_kernel_contour(h, 0.5, 0.7, &mut v, &mut e) }, PsStatus::Ok);
    assert_eq!(
        unsafe { ps_kernel_biortho(h, 0.5, 0.7, &mut v, &mut e) },
        PsStatus::InvalidArgument
    );
    assert!(!last_error_string().is_empty());
    unsafe { ps_ensemble_free(h) };
}

#[test]
fn limit_kernels_match_closed_forms() {
    // Subcritical, M = 0: sine kernel.
    let (mut v, mut e) = (0.0f64, 0.0f64);
    let st = unsafe { ps_limit_subcritical(ptr::null(), 0, 0.7, 0.4, &mut v, &mut e) };
    assert_eq!(st, PsStatus::Ok);
    let sine = (0.7f64 - 0.4).sin() / (PI * (0.7 - 0.4));
    assert!((v - sine).abs() <= 1e-8, "subcritical M=0: {v} vs sine {sine}");

    // Zero argument is a domain error.
    let st = unsafe { ps_limit_subcritical(ptr::null(), 0, 0.0, 0.4, &mut v, &mut e) };
    assert_eq!(st, PsStatus::InvalidArgument);

    // Critical, M = 0, no spikes, tau = 0.
    let st = unsafe {
        ps_limit_critical(ptr::null(), 0, 0.0, ptr::null(), 0, 0, 0.5, 0.5, &mut v, &mut e)
    };
    assert_eq!(st, PsStatus::Ok);
    assert!((v - 0.18318728895810363).abs() <= 1e-6, "critical M=0: {v}");

    // Supercritical, M = 1, one spike.
    let nus = [0u32];
    let spikes = [1.5f64];
    let st = unsafe {
        ps_limit_supercritical(nus.as_ptr(), 1, 2.0, spikes.as_ptr(), 1, 0.8, 0.6, &mut v, &mut e)
    };
    assert_eq!(st, PsStatus::Ok);
    assert!((v - 0.782686557837123954).abs() <= 1e-6, "supercritical: {v}");

    // a ≤ 1 is rejected by validation.
    let st = unsafe {
        ps_limit_supercritical(nus.as_ptr(), 1, 0.9, spikes.as_ptr(), 1, 0.8, 0.6, &mut v, &mut e)
    };
    assert_eq!(st, PsStatus::InvalidArgument);
}

#[test]
fn density_curve_fills_both_buffers() {
    let phis = [0.2f64, 0.4, 0.6];
    let mut xs = [0.0f64; 3];
    let mut rhos = [0.0f64; 3];
    let st = unsafe {
        ps_density_parametric(1, 0.0, phis.as_ptr(), 3, xs.as_mut_ptr(), rhos.as_mut_ptr())
    };
    assert_eq!(st, PsStatus::Ok);
    for i in 0..3 {
        assert!(xs[i].is_finite() && xs[i] > 0.0);
        assert!(rhos[i].is_finite() && rhos[i] > 0.0);
    }

    let st = unsafe {
        ps_density_parametric(1, 0.5, phis.as_ptr(), 3, xs.as_mut_ptr(), rhos.as_mut_ptr())
    };
    assert_eq!(st, PsStatus::InvalidArgument);

    // Out-of-range parameter for the a = 1 branch (limit is π/7 for M = 1).
    let bad = [1.0f64];
    let st = unsafe {
        ps_density_parametric(1, 1.0, bad.as_ptr(), 1, xs.as_mut_ptr(), rhos.as_mut_ptr())
    };
    assert_eq!(st, PsStatus::InvalidArgument);
}

#[test]
fn sampling_is_reproducible_through_the_boundary() {
    let nus = [0u32];
    let b = [0.5f64, -0.5, 0.0];
    let mut h: *mut PsEnsemble = ptr::null_mut();
    assert_eq!(
        unsafe { ps_ensemble_new(3, nus.as_ptr(), 1, b.as_ptr(), 3, &mut h) },
        PsStatus::Ok
    );

    let mut run1 = [0.0f64; 3];
    let mut run2 = [0.0f64; 3];
    assert_eq!(unsafe { ps_sample_spectrum(h, 11, 4, run1.as_mut_ptr()) }, PsStatus::Ok);
    assert_eq!(unsafe { ps_sample_spectrum(h, 11, 4, run2.as_mut_ptr()) }, PsStatus::Ok);
    assert_eq!(run1, run2);
    assert!(run1.windows(2).all(|w| w[0] <= w[1]), "eigenvalues not ascending");

    let mut other = [0.0f64; 3];
    assert_eq!(unsafe { ps_sample_spectrum(h, 11, 5, other.as_mut_ptr()) }, PsStatus::Ok);
    assert_ne!(run1, other);

    unsafe { ps_ensemble_free(h) };
}
