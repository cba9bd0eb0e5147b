//! C ABI over `cardylab`.
//!
//! Every fallible function returns a [`CardyStatus`] and writes its result
//! through an out-pointer; on failure `cardy_last_error` holds a message
//! for the calling thread. Classifications are opaque heap handles released
//! with `cardy_classification_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cardylab::conformal;
use cardylab::domain::{classify, standard_triangle, SiteClassification};
use cardylab::engine::{self, EngineError, SamplingPlan};
use cardylab::lattice::{LatticeFamily, LatticeSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DomainError = 3,
    CouplingMismatch = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardyFamily {
    Square = 0,
    Triangular = 1,
    SquareNe = 2,
    TriNe = 3,
    TriNw = 4,
    TriH = 5,
}

/// Opaque handle to the in-domain sites of a marked triangle.
pub struct CardyClassification {
    inner: SiteClassification,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CardyDomainSummary {
    pub in_domain: u64,
    pub interior: u64,
    pub ax: u64,
    pub xb: u64,
    pub bc: u64,
    pub ca: u64,
    pub x_requested: f64,
    pub x_snapped: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CardyEstimate {
    pub n: u64,
    pub successes: u64,
    pub p_hat: f64,
    /// 95% Wilson interval.
    pub ci_low: f64,
    pub ci_high: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CardyPrediction {
    pub x: f64,
    pub kappa: f64,
    pub w: f64,
    pub big_x: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: CardyStatus, msg: impl std::fmt::Display) -> CardyStatus {
    set_error(msg.to_string());
    status
}

/// Runs `f`, converting panics into `CardyStatus::Panic`.
fn guard(f: impl FnOnce() -> CardyStatus) -> CardyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == CardyStatus::Ok {
                set_error("");
            }
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            fail(CardyStatus::Panic, msg)
        }
    }
}

/// Writes `value` through `out`, or reports a null pointer.
unsafe fn write<T>(out: *mut T, value: T) -> CardyStatus {
    if out.is_null() {
        return fail(CardyStatus::NullPointer, "null output pointer");
    }
    out.write(value);
    CardyStatus::Ok
}

fn lattice_family(family: CardyFamily, k: f64) -> Result<LatticeFamily, String> {
    match family {
        CardyFamily::Triangular => LatticeFamily::triangular(k).map_err(|e| e.to_string()),
        CardyFamily::Square => Ok(LatticeFamily::Square),
        CardyFamily::SquareNe => Ok(LatticeFamily::SquareNe),
        CardyFamily::TriNe => Ok(LatticeFamily::TriNe),
        CardyFamily::TriNw => Ok(LatticeFamily::TriNw),
        CardyFamily::TriH => Ok(LatticeFamily::TriH),
    }
}

/// Message describing the last failure on this thread ("" after success).
/// Valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn cardy_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Classifies the sites of `family` (mesh `delta`; `k` is used only by the
/// triangular family) inside its standard triangle with the marked point at
/// fraction `x` of the base.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cardy_classification_new(
    family: CardyFamily,
    k: f64,
    delta: f64,
    x: f64,
    out: *mut *mut CardyClassification,
) -> CardyStatus {
    guard(|| {
        if out.is_null() {
            return fail(CardyStatus::NullPointer, "null output pointer");
        }
        let fam = match lattice_family(family, k) {
            Ok(f) => f,
            Err(e) => return fail(CardyStatus::InvalidArgument, e),
        };
        let spec = match LatticeSpec::new(fam, delta) {
            Ok(s) => s,
            Err(e) => return fail(CardyStatus::InvalidArgument, e),
        };
        let cls = standard_triangle(&spec, x).and_then(|d| classify(&spec, &d));
        match cls {
            Ok(inner) => write(out, Box::into_raw(Box::new(CardyClassification { inner }))),
            Err(e) => fail(CardyStatus::DomainError, e),
        }
    })
}

/// Re-indexes a `SquareNe` classification onto the triangular lattice it
/// rotates to, so it can be coupled with triangular classifications.
///
/// # Safety
/// `src` must be a live handle or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cardy_classification_rotated(
    src: *const CardyClassification,
    out: *mut *mut CardyClassification,
) -> CardyStatus {
    guard(|| {
        let Some(src) = src.as_ref() else {
            return fail(CardyStatus::NullPointer, "null classification");
        };
        match src.inner.rotated_square_ne() {
            Ok(inner) => write(out, Box::into_raw(Box::new(CardyClassification { inner }))),
            Err(e) => fail(CardyStatus::DomainError, e),
        }
    })
}

/// # Safety
/// `cls` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cardy_classification_free(cls: *mut CardyClassification) {
    if !cls.is_null() {
        drop(Box::from_raw(cls));
    }
}

/// # Safety
/// `cls` must be a live handle or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cardy_classification_summary(
    cls: *const CardyClassification,
    out: *mut CardyDomainSummary,
) -> CardyStatus {
    guard(|| {
        let Some(cls) = cls.as_ref() else {
            return fail(CardyStatus::NullPointer, "null classification");
        };
        let s = cls.inner.summary();
        write(
            out,
            CardyDomainSummary {
                in_domain: s.in_domain as u64,
                interior: s.interior as u64,
                ax: s.ax as u64,
                xb: s.xb as u64,
                bc: s.bc as u64,
                ca: s.ca as u64,
                x_requested: s.x_requested,
                x_snapped: s.x_snapped,
            },
        )
    })
}

fn to_estimate(e: &engine::CrossingEstimate) -> CardyEstimate {
    CardyEstimate {
        n: e.n,
        successes: e.successes,
        p_hat: e.p_hat,
        ci_low: e.ci_low,
        ci_high: e.ci_high,
    }
}

/// Monte Carlo estimate of the crossing probability from `ax` to `bc`.
///
/// # Safety
/// `cls` must be a live handle or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cardy_estimate(
    cls: *const CardyClassification,
    p: f64,
    seed: u64,
    n_samples: u64,
    out: *mut CardyEstimate,
) -> CardyStatus {
    guard(|| {
        let Some(cls) = cls.as_ref() else {
            return fail(CardyStatus::NullPointer, "null classification");
        };
        match SamplingPlan::new(p, seed, n_samples) {
            Ok(plan) => write(out, to_estimate(&engine::estimate(&cls.inner, &plan))),
            Err(e) => fail(CardyStatus::InvalidArgument, e),
        }
    })
}

/// Runs two classifications on shared site marks and counts the samples
/// in which their crossing indicators agree. Fails with
/// `CouplingMismatch` unless both describe the same indexed graph.
///
/// # Safety
/// `a`, `b` must be live handles or null; `agreement` must be valid for
/// writes; `est_a`, `est_b` may be null.
#[no_mangle]
pub unsafe extern "C" fn cardy_coupled_estimate(
    a: *const CardyClassification,
    b: *const CardyClassification,
    p: f64,
    seed: u64,
    n_samples: u64,
    agreement: *mut u64,
    est_a: *mut CardyEstimate,
    est_b: *mut CardyEstimate,
) -> CardyStatus {
    guard(|| {
        let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
            return fail(CardyStatus::NullPointer, "null classification");
        };
        let plan = match SamplingPlan::new(p, seed, n_samples) {
            Ok(plan) => plan,
            Err(e) => return fail(CardyStatus::InvalidArgument, e),
        };
        match engine::coupled_estimate(&a.inner, &b.inner, &plan) {
            Ok(c) => {
                if !est_a.is_null() {
                    est_a.write(to_estimate(&c.estimate_a));
                }
                if !est_b.is_null() {
                    est_b.write(to_estimate(&c.estimate_b));
                }
                write(agreement, c.agreement)
            }
            Err(e @ EngineError::CouplingMismatch { .. }) => fail(CardyStatus::CouplingMismatch, e),
            Err(e) => fail(CardyStatus::InvalidArgument, e),
        }
    })
}

fn math(out: *mut f64, r: Result<f64, conformal::ConformalError>) -> CardyStatus {
    guard(|| match r {
        Ok(v) => unsafe { write(out, v) },
        Err(e) => fail(CardyStatus::InvalidArgument, e),
    })
}

/// Regularized incomplete beta I_w(a, a).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cardy_reg_inc_beta(w: f64, a: f64, out: *mut f64) -> CardyStatus {
    math(out, conformal::reg_inc_beta(w, a))
}

/// The w in [0, 1] with I_w(a, a) = x.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cardy_inv_reg_inc_beta(x: f64, a: f64, out: *mut f64) -> CardyStatus {
    math(out, conformal::inv_reg_inc_beta(x, a))
}

/// Base angle of the unit-base triangle of the triangular family with shape k.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cardy_apex_angle(k: f64, out: *mut f64) -> CardyStatus {
    math(out, conformal::apex_params(k))
}

/// Ratio of the triangle map's derivative to the equilateral one at w.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cardy_derivative_ratio(w: f64, kappa: f64, out: *mut f64) -> CardyStatus {
    math(out, conformal::derivative_ratio(w, kappa))
}

/// Conformal prediction for marked point `x` in the triangle with base
/// angle `kappa`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cardy_prediction(x: f64, kappa: f64, out: *mut CardyPrediction) -> CardyStatus {
    guard(|| match conformal::cardy_prediction(x, kappa) {
        Ok(p) => write(
            out,
            CardyPrediction {
                x: p.x,
                kappa: p.kappa,
                w: p.w,
                big_x: p.big_x,
            },
        ),
        Err(e) => fail(CardyStatus::InvalidArgument, e),
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn cardy_status_str(status: CardyStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        CardyStatus::Ok => b"ok\0",
        CardyStatus::NullPointer => b"null pointer\0",
        CardyStatus::InvalidArgument => b"invalid argument\0",
        CardyStatus::DomainError => b"domain error\0",
        CardyStatus::CouplingMismatch => b"coupling mismatch\0",
        CardyStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Version of the per-site random stream; outputs are reproducible only
/// between equal versions.
#[no_mangle]
pub extern "C" fn cardy_site_stream_version() -> u32 {
    engine::rng::SITE_STREAM_VERSION
}
