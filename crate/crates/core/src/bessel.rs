//! Modified Bessel functions of the first kind for integer and half-integer
//! orders.
//!
//! Below the crossover the power series
//! `Σ (x/2)^{2m+ν} / (m! Γ(m+ν+1))` is summed in exponent-scaled form; above
//! it the large-argument expansion
//! `e^x/√(2πx) · Σ (-1)^k a_k(ν) / x^k` is used. The crossover is at
//! `x = max(30, ν²)`: the expansion needs `x ≫ ν²` to reach full precision.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Argument above which the asymptotic expansion is used (for `ν² ≤ 30`).
pub const ASYMPTOTIC_THRESHOLD: f64 = 30.0;

/// Largest `x` with finite `e^x`.
const EXP_OVERFLOW: f64 = 709.782_712_893_384;

/// `ln Γ(k/2)` for a positive integer `k`.
pub fn ln_gamma_half(k: u32) -> f64 {
    assert!(k > 0, "Γ(0) is undefined");
    // Γ(1) = 1, Γ(1/2) = √π, Γ(z+1) = zΓ(z)
    let (mut z, mut acc) = if k % 2 == 0 {
        (1.0, 0.0)
    } else {
        (0.5, 0.5 * PI.ln())
    };
    let target = 0.5 * k as f64;
    while z < target {
        acc += z.ln();
        z += 1.0;
    }
    acc
}

/// `Γ(k/2)` for a positive integer `k`.
pub fn gamma_half(k: u32) -> f64 {
    ln_gamma_half(k).exp()
}

fn order_twice(nu: f64) -> Result<u32> {
    let twice = 2.0 * nu;
    if !(nu >= 0.0) || twice.fract() != 0.0 || twice > u32::MAX as f64 {
        return Err(Error::InvalidParameter(format!(
            "Bessel order must be a non-negative integer or half-integer, got {nu}"
        )));
    }
    Ok(twice as u32)
}

fn check_arg(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "Bessel argument must be finite and non-negative, got {x}"
        )))
    }
}

/// Power series for `I_ν(x)·e^{-x}`, `x > 0`.
pub(crate) fn series_scaled(twice_nu: u32, x: f64) -> f64 {
    let nu = 0.5 * twice_nu as f64;
    let half = 0.5 * x;
    let q = half * half;
    let mut term = (nu * half.ln() - ln_gamma_half(twice_nu + 2) - x).exp();
    let mut sum = term;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * (m + nu));
        sum += term;
        if term <= 1e-17 * sum && m > half {
            break;
        }
        if term == 0.0 {
            break;
        }
    }
    sum
}

/// Large-argument expansion for `I_ν(x)·e^{-x}`.
pub(crate) fn asymptotic_scaled(twice_nu: u32, x: f64) -> f64 {
    let mu = (twice_nu as f64).powi(2); // 4ν²
    let mut term = 1.0_f64;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        let odd = 2.0 * k - 1.0;
        let next = -term * (mu - odd * odd) / (8.0 * k * x);
        if next == 0.0 || next.abs() >= term.abs() {
            break;
        }
        sum += next;
        term = next;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

fn uses_asymptotic(twice_nu: u32, x: f64) -> bool {
    let nu = 0.5 * twice_nu as f64;
    x > ASYMPTOTIC_THRESHOLD.max(nu * nu)
}

/// `I_ν(x)·e^{-x}`; finite for every `x ≥ 0`.
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    let twice = order_twice(nu)?;
    check_arg(x)?;
    if x == 0.0 {
        return Ok(if twice == 0 { 1.0 } else { 0.0 });
    }
    Ok(if uses_asymptotic(twice, x) {
        asymptotic_scaled(twice, x)
    } else {
        series_scaled(twice, x)
    })
}

/// `I_ν(x)` for integer or half-integer `ν ≥ 0` and `x ≥ 0`.
///
/// Returns [`Error::BesselOverflow`] with the scaled value when `e^x`
/// overflows.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    let twice = order_twice(nu)?;
    check_arg(x)?;
    if x == 0.0 {
        return Ok(if twice == 0 { 1.0 } else { 0.0 });
    }
    let scaled = bessel_i_scaled(nu, x)?;
    if x > EXP_OVERFLOW {
        return Err(Error::BesselOverflow { nu, x, scaled });
    }
    let value = scaled * x.exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::BesselOverflow { nu, x, scaled })
    }
}
