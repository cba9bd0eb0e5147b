//! Conformal prediction for crossing probabilities in isosceles triangles.
//!
//! The Schwarz–Christoffel map sending the upper half-plane onto an
//! isosceles triangle with unit base and base angles κ, with prevertices
//! 0, 1, ∞ at α, β, γ, restricts on (0, 1) to the regularized incomplete
//! beta function `x = I_w(κ/π, κ/π)`. Composing the inverse of that map
//! with the one for the equilateral triangle (κ = π/3) gives the conformal
//! image X of a base point x, which is the predicted scaling limit of the
//! crossing probability from `ax` to `bc`.

pub mod beta;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use serde::Serialize;
use thiserror::Error;

pub use beta::{inv_reg_inc_beta, reg_inc_beta, reg_inc_beta_density};

use crate::lattice;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConformalError {
    #[error("beta exponent {0} must be finite and > 0")]
    InvalidExponent(f64),
    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("base angle kappa = {0} must lie in (0, pi/2]")]
    InvalidAngle(f64),
    #[error("shape parameter k = {0} must be > 1/2")]
    InvalidShape(f64),
}

/// Exponent of the equilateral target map.
pub const EQUILATERAL_EXPONENT: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleMapParams {
    pub kappa: f64,
    /// Beta exponent κ/π.
    pub a: f64,
    /// 1/B(a, a): the derivative constant of the source map.
    pub a_norm: f64,
}

impl TriangleMapParams {
    pub fn new(kappa: f64) -> Result<Self, ConformalError> {
        if !(kappa > 0.0 && kappa <= FRAC_PI_2) {
            return Err(ConformalError::InvalidAngle(kappa));
        }
        let a = kappa / PI;
        Ok(Self {
            kappa,
            a,
            a_norm: (-beta::ln_beta(a, a)).exp(),
        })
    }

    pub fn equilateral() -> Self {
        Self::new(FRAC_PI_3).expect("pi/3 is a valid angle")
    }

    /// dx/dw = A·w^{a−1}(1−w)^{a−1}.
    pub fn derivative(&self, w: f64) -> f64 {
        self.a_norm * (w * (1.0 - w)).powf(self.a - 1.0)
    }
}

/// Base angle κ = arctan(2·h(k)) of the unit-base triangle of
/// `Triangular(k)`.
pub fn apex_params(k: f64) -> Result<f64, ConformalError> {
    if !(k.is_finite() && k > 0.5) {
        return Err(ConformalError::InvalidShape(k));
    }
    Ok((2.0 * lattice::row_height_factor(k)).atan())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CardyPrediction {
    pub x: f64,
    pub kappa: f64,
    /// Half-plane preimage of x.
    pub w: f64,
    /// Conformal image of x on the base of the equilateral triangle.
    #[serde(rename = "X")]
    pub big_x: f64,
}

/// Predicted limiting crossing probability for a marked point at fraction
/// `x` of the base of the isosceles triangle with base angle `kappa`.
pub fn cardy_prediction(x: f64, kappa: f64) -> Result<CardyPrediction, ConformalError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(ConformalError::OutOfRange { name: "x", value: x });
    }
    let params = TriangleMapParams::new(kappa)?;
    // Work on the half of the base nearer its endpoint so w keeps full
    // relative precision, then reflect.
    let near = x.min(1.0 - x);
    let w = inv_reg_inc_beta(near, params.a)?;
    let big_x = reg_inc_beta(w, EQUILATERAL_EXPONENT)?;
    Ok(if x > 0.5 {
        CardyPrediction { x, kappa, w: 1.0 - w, big_x: 1.0 - big_x }
    } else {
        CardyPrediction { x, kappa, w, big_x }
    })
}

/// Ratio of the source map's derivative to the equilateral map's at `w`:
/// `A₁·w^{a−1/3}(1−w)^{a−1/3} / A₂`. It would have to be identically 1 for
/// the conformal image to coincide with the base point; it is only when
/// κ = π/3.
pub fn derivative_ratio(w: f64, kappa: f64) -> Result<f64, ConformalError> {
    if !(w > 0.0 && w < 1.0) {
        return Err(ConformalError::OutOfRange { name: "w", value: w });
    }
    let src = TriangleMapParams::new(kappa)?;
    let dst = TriangleMapParams::equilateral();
    Ok(src.a_norm / dst.a_norm * (w * (1.0 - w)).powf(src.a - EQUILATERAL_EXPONENT))
}
