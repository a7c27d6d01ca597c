//! Densities of the position `(X(t), Y(t))` and of the distance
//! `R(t) = √(X² + Y²)`.
//!
//! Every law has an absolutely continuous part inside the disc of radius
//! `ct` and a singular part of mass `e^{-λt}` on its boundary (no turn by
//! time `t`). Exponents are written as `-(λ/c)(ct - √u)` with
//! `ct - √u = (c²t² - u)/(ct + √u)` so that large `λ` neither overflows nor
//! cancels.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use crate::bessel::bessel_i_scaled;
use crate::error::{ensure_positive, Error, Result};
use crate::flight::{FlightParams, Point};
use crate::quadrature::{integrate, integrate_with_breaks, QuadOptions, Quadrature};

use super::require_origin_centered;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    /// Absolutely continuous density at the query point.
    pub ac: f64,
    /// `e^{-λt}`, the mass on the boundary circle.
    pub singular_weight: f64,
}

/// `e^{-(λ/c)(ct - √u)} / √u` given `gap = c²t² - u ≥ 0`.
fn kernel(lambda: f64, c: f64, t: f64, u: f64, gap: f64) -> f64 {
    let root = u.sqrt();
    (-(lambda / c) * gap / (c * t + root)).exp() / root
}

/// Absolutely continuous planar density at `point`, strictly inside the
/// disc of radius `ct` around the origin of the flight.
pub fn planar_density_ac(params: &FlightParams, t: f64, point: Point) -> Result<f64> {
    ensure_positive("t", t)?;
    let (lambda, c) = (params.lambda(), params.c());
    let o = params.origin();
    let gap = (point.x - o.x).powi(2) + (point.y - o.y).powi(2);
    let reach = c * t;
    let u = (reach - gap.sqrt()) * (reach + gap.sqrt());
    if !(u > 0.0) {
        return Err(Error::Domain(format!(
            "point ({}, {}) is not inside the disc of radius {reach}",
            point.x, point.y
        )));
    }
    Ok(lambda / (2.0 * PI * c) * kernel(lambda, c, t, u, gap))
}

/// Law of `R(t)` for a flight started at `(0, 0)`, for `0 < r < ct`.
pub fn radial_density_origin(params: &FlightParams, t: f64, r: f64) -> Result<DensityValue> {
    require_origin_centered(params)?;
    ensure_positive("t", t)?;
    let (lambda, c) = (params.lambda(), params.c());
    let reach = c * t;
    if !(r > 0.0 && r < reach) {
        return Err(Error::Domain(format!("radius {r} outside (0, {reach})")));
    }
    let u = (reach - r) * (reach + r);
    Ok(DensityValue {
        ac: lambda / c * r * kernel(lambda, c, t, u, r * r),
        singular_weight: (-lambda * t).exp(),
    })
}

fn inner_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_subdivisions: 10_000,
    }
}

/// Law of `R(t)` for a flight started at an arbitrary point.
///
/// The angular integral runs only over directions where
/// `A(θ) = c²t² - r² - |o|² + 2r(o·(cos θ, sin θ))` is positive. After
/// rotating so the origin lies on the positive axis, `A(ψ) = K + B cos ψ` is
/// even in `ψ`. When `A` vanishes at `ψ*`, the substitution `ψ = ψ* - v²`
/// turns the `1/√A` endpoint singularity into a smooth integrand, and
/// `A = 2B sin(ψ* - v²/2) sin(v²/2)` is evaluated without cancellation.
pub fn radial_density_offset(params: &FlightParams, t: f64, r: f64) -> Result<DensityValue> {
    ensure_positive("t", t)?;
    ensure_positive("r", r)?;
    let (lambda, c) = (params.lambda(), params.c());
    let rho0 = params.origin().norm();
    let reach = c * t;
    if !((r - rho0).abs() < reach) {
        return Err(Error::Domain(format!(
            "radius {r} outside the reachable annulus ({}, {})",
            (rho0 - reach).max(0.0),
            rho0 + reach
        )));
    }
    let b = 2.0 * r * rho0;
    let k = reach * reach - r * r - rho0 * rho0;
    let dist2 = r * r + rho0 * rho0;
    // c²t² - A(ψ) = r² + |o|² - B cos ψ
    let h = |a: f64, cos_psi: f64| kernel(lambda, c, t, a, (dist2 - b * cos_psi).max(0.0));

    let quad = if k - b > 0.0 && !(k - b < 2.0 * b) {
        integrate(|psi: f64| h(k + b * psi.cos(), psi.cos()), 0.0, PI, &inner_opts())
    } else if k - b > 0.0 {
        // A peaks sharply at ψ = π when m = K - B is small. With s = π - ψ
        // and sin(s/2) = √(m/2B) sinh w we get A = m cosh² w on s ∈ [0, π/2].
        let m = k - b;
        let gauge = (m / (2.0 * b)).sqrt();
        let near = integrate(
            |w: f64| {
                let sigma = gauge * w.sinh();
                let a = m * w.cosh().powi(2);
                2.0 * a.sqrt() * h(a, 2.0 * sigma * sigma - 1.0) / ((2.0 * b).sqrt() * (1.0 - sigma * sigma).sqrt())
            },
            0.0,
            (FRAC_1_SQRT_2 / gauge).asinh(),
            &inner_opts(),
        );
        let far = integrate(|psi: f64| h(k + b * psi.cos(), psi.cos()), 0.0, FRAC_PI_2, &inner_opts());
        match (near, far) {
            (Ok(x), Ok(y)) => Ok(Quadrature {
                value: x.value + y.value,
                abs_error: x.abs_error + y.abs_error,
                subdivisions: x.subdivisions + y.subdivisions,
                evaluations: x.evaluations + y.evaluations,
            }),
            (Err(e), _) | (_, Err(e)) => Err(e),
        }
    } else {
        let psi_star = (-k / b).clamp(-1.0, 1.0).acos();
        integrate(
            |v: f64| {
                let w = 0.5 * v * v;
                let a = 2.0 * b * (psi_star - w).sin() * w.sin();
                if !(a > 0.0) {
                    return 0.0;
                }
                2.0 * v * h(a, (psi_star - v * v).cos())
            },
            0.0,
            psi_star.sqrt(),
            &inner_opts(),
        )
    };
    let scale = lambda / (2.0 * PI * c) * r * 2.0;
    let singular_weight = (-lambda * t).exp();
    match quad {
        Ok(q) => Ok(DensityValue {
            ac: scale * q.value,
            singular_weight,
        }),
        Err(Error::Numerical { message, estimate }) => Err(Error::Numerical {
            message: format!("radial density at r={r}: {message}"),
            estimate: scale * estimate,
        }),
        Err(e) => Err(e),
    }
}

/// Total absolutely continuous mass of `R(t)`; equals `1 - e^{-λt}`.
///
/// Origin-centred flights integrate [`radial_density_origin`] in
/// `z = √(c²t² - r²)`, which removes the `r → ct` singularity. Offset flights
/// integrate [`radial_density_offset`] over the reachable annulus with a
/// breakpoint at the internal tangency `r = |ct - |o||`.
pub fn absolutely_continuous_mass(params: &FlightParams, t: f64) -> Result<f64> {
    ensure_positive("t", t)?;
    let reach = params.c() * t;
    let rho0 = params.origin().norm();
    if rho0 == 0.0 {
        // dr = -(z/r) dz
        let q = integrate(
            |z: f64| {
                let r = ((reach - z) * (reach + z)).sqrt();
                match radial_density_origin(params, t, r) {
                    Ok(d) => d.ac * z / r,
                    Err(_) => 0.0,
                }
            },
            0.0,
            reach,
            &QuadOptions::abs(1e-12),
        )?;
        return Ok(q.value);
    }
    let lo = (rho0 - reach).max(0.0);
    let hi = rho0 + reach;
    let tangent = (reach - rho0).abs();
    let mut points = vec![lo];
    if tangent > lo && tangent < hi {
        points.push(tangent);
    }
    points.push(hi);
    let failure = std::cell::Cell::new(None);
    let q = integrate_with_breaks(
        |r: f64| match radial_density_offset(params, t, r) {
            Ok(d) => d.ac,
            Err(Error::Domain(_)) => 0.0,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        &points,
        &QuadOptions::abs(1e-10),
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(q.value),
    }
}

/// Density of a planar Brownian motion's distance from `(0, 0)` at time
/// `t`, started at `origin`: the limit of the radial law under `c, λ → ∞`,
/// `c²/λ → 1`.
pub fn bessel_limit_density(origin: Point, t: f64, r: f64) -> Result<f64> {
    ensure_positive("t", t)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "radius must be finite and non-negative, got {r}"
        )));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let rho0 = origin.norm();
    // e^{-(r²+ρ0²)/2t} I₀(rρ0/t) = e^{-(r-ρ0)²/2t} · I₀(rρ0/t) e^{-rρ0/t}
    let scaled = bessel_i_scaled(0.0, r * rho0 / t)?;
    Ok(r / t * (-(r - rho0).powi(2) / (2.0 * t)).exp() * scaled)
}
