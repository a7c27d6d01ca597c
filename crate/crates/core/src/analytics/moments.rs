//! Moments `E R^p(t)` of the distance from the origin.
//!
//! Two routes are provided. [`moment_quadrature`] integrates the radial law
//! directly and is the reference value. [`moment_closed_form_paper`] is the
//! published Bessel-function expression, kept verbatim; its series
//! derivation keeps only even powers of `λ/c` and it does not agree with the
//! integral (e.g. `p = 2, λ = c = t = 1`: 0.6078 against `2/e ≈ 0.7358`).

use std::f64::consts::PI;

use crate::bessel::{bessel_i_scaled, gamma_half};
use crate::error::{ensure_positive, Error, Result};
use crate::flight::FlightParams;
use crate::quadrature::{integrate, QuadOptions};

use super::require_origin_centered;

/// `(ct)^p e^{-λt} { √π (2/(λt))^{(p-1)/2} Γ((p+1)/2) I_{(p+1)/2}(λt) + 1 }`.
pub fn moment_closed_form_paper(params: &FlightParams, t: f64, p: u32) -> Result<f64> {
    require_origin_centered(params)?;
    ensure_positive("t", t)?;
    if p == 0 {
        return Err(Error::InvalidParameter("moment order p must be >= 1".into()));
    }
    let lt = params.lambda() * t;
    let order = 0.5 * (p + 1) as f64;
    let bracket = PI.sqrt()
        * (2.0 / lt).powf(0.5 * (p as f64 - 1.0))
        * gamma_half(p + 1)
        * bessel_i_scaled(order, lt)?;
    Ok((params.c() * t).powi(p as i32) * (bracket + (-lt).exp()))
}

/// `E R^p(t)` by quadrature of the radial law plus the boundary mass.
///
/// With `z = √(c²t² - r²)` the absolutely continuous part becomes
/// `(λ/c) ∫_0^{ct} (c²t² - z²)^{p/2} e^{-(λ/c)(ct - z)} dz`, free of the
/// `1/√(c²t² - r²)` singularity.
pub fn moment_quadrature(params: &FlightParams, t: f64, p: f64) -> Result<f64> {
    require_origin_centered(params)?;
    ensure_positive("t", t)?;
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "moment order must be finite and non-negative, got {p}"
        )));
    }
    let (lambda, c) = (params.lambda(), params.c());
    let reach = c * t;
    let opts = QuadOptions {
        abs_tol: 1e-9,
        rel_tol: 1e-13,
        max_subdivisions: 10_000,
    };
    let q = integrate(
        |z: f64| ((reach - z) * (reach + z)).powf(0.5 * p) * (-(lambda / c) * (reach - z)).exp(),
        0.0,
        reach,
        &opts,
    )?;
    Ok(lambda / c * q.value + reach.powf(p) * (-lambda * t).exp())
}
