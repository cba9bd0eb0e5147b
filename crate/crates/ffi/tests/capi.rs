use std::ffi::CStr;
use std::ptr;

use cardylab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cardy_last_error()) }.to_string_lossy().into_owned()
}

fn classification(family: CardyFamily, k: f64, delta: f64, x: f64) -> *mut CardyClassification {
    let mut out = ptr::null_mut();
    let status = unsafe { cardy_classification_new(family, k, delta, x, &mut out) };
    assert_eq!(status, CardyStatus::Ok, "{}", last_error());
    assert!(!out.is_null());
    out
}

#[test]
fn special_functions() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(cardy_reg_inc_beta(0.25, 0.5, &mut v), CardyStatus::Ok);
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(cardy_inv_reg_inc_beta(1.0 / 3.0, 0.5, &mut v), CardyStatus::Ok);
        assert!((v - 0.25).abs() < 1e-12);
        assert_eq!(cardy_apex_angle(2.0, &mut v), CardyStatus::Ok);
        assert!((v - 15f64.sqrt().atan()).abs() < 1e-15);
        assert_eq!(cardy_derivative_ratio(0.3, std::f64::consts::FRAC_PI_3, &mut v), CardyStatus::Ok);
        assert!((v - 1.0).abs() < 1e-13);

        let mut p = CardyPrediction::default();
        assert_eq!(cardy_prediction(0.25, 15f64.sqrt().atan(), &mut p), CardyStatus::Ok);
        assert!((p.big_x - 0.283_526_566_416_215_2).abs() < 1e-10);
    }
}

#[test]
fn errors_are_reported() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(cardy_reg_inc_beta(1.5, 0.5, &mut v), CardyStatus::InvalidArgument);
        assert!(last_error().contains("out of range"), "{}", last_error());
        assert_eq!(cardy_apex_angle(0.4, &mut v), CardyStatus::InvalidArgument);
        assert_eq!(cardy_reg_inc_beta(0.5, 0.5, ptr::null_mut()), CardyStatus::NullPointer);
        assert_eq!(cardy_reg_inc_beta(0.5, 0.5, &mut v), CardyStatus::Ok);
        assert_eq!(last_error(), "");

        let mut out = ptr::null_mut();
        let s = cardy_classification_new(CardyFamily::Square, 1.0, 0.1, 0.5, &mut out);
        assert_eq!(s, CardyStatus::DomainError);
        assert!(out.is_null());
        let s = cardy_classification_new(CardyFamily::Triangular, 0.3, 0.1, 0.5, &mut out);
        assert_eq!(s, CardyStatus::InvalidArgument);

        let mut est = CardyEstimate::default();
        assert_eq!(cardy_estimate(ptr::null(), 0.5, 1, 10, &mut est), CardyStatus::NullPointer);
        let status = CStr::from_ptr(cardy_status_str(CardyStatus::CouplingMismatch));
        assert_eq!(status.to_str().unwrap(), "coupling mismatch");
    }
}

#[test]
fn estimates_and_coupling() {
    let eq = classification(CardyFamily::Triangular, 1.0, 1.0 / 16.0, 0.25);
    let stretched = classification(CardyFamily::Triangular, 2.0, 1.0 / 16.0, 0.25);
    let square = classification(CardyFamily::SquareNe, 1.0, 1.0 / (16.0 * std::f64::consts::SQRT_2), 0.25);
    let coarse = classification(CardyFamily::Triangular, 1.0, 1.0 / 20.0, 0.25);
    unsafe {
        let mut summary = CardyDomainSummary::default();
        assert_eq!(cardy_classification_summary(eq, &mut summary), CardyStatus::Ok);
        assert_eq!(summary.in_domain, 17 * 18 / 2);
        assert_eq!(summary.x_snapped, 0.25);

        let mut est = CardyEstimate::default();
        assert_eq!(cardy_estimate(eq, 0.5, 3, 2000, &mut est), CardyStatus::Ok);
        assert_eq!(est.n, 2000);
        assert!(est.ci_low <= est.p_hat && est.p_hat <= est.ci_high);

        let mut agreement = 0;
        let (mut a, mut b) = (CardyEstimate::default(), CardyEstimate::default());
        let s = cardy_coupled_estimate(stretched, eq, 0.5, 3, 500, &mut agreement, &mut a, &mut b);
        assert_eq!(s, CardyStatus::Ok);
        assert_eq!(agreement, 500);
        assert_eq!(a.successes, b.successes);

        let mut rotated = ptr::null_mut();
        assert_eq!(cardy_classification_rotated(square, &mut rotated), CardyStatus::Ok);
        let s = cardy_coupled_estimate(rotated, eq, 0.5, 3, 500, &mut agreement, ptr::null_mut(), ptr::null_mut());
        assert_eq!(s, CardyStatus::Ok);
        assert_eq!(agreement, 500);

        let s = cardy_coupled_estimate(coarse, eq, 0.5, 3, 10, &mut agreement, ptr::null_mut(), ptr::null_mut());
        assert_eq!(s, CardyStatus::CouplingMismatch);
        assert!(last_error().contains("site"), "{}", last_error());

        let mut unused = ptr::null_mut();
        assert_eq!(cardy_classification_rotated(eq, &mut unused), CardyStatus::DomainError);
        assert!(unused.is_null());

        for h in [eq, stretched, square, coarse, rotated] {
            cardy_classification_free(h);
        }
        cardy_classification_free(ptr::null_mut());
    }
    assert_eq!(cardy_site_stream_version(), 1);
}
