//! Fisher information of one increment and the Cramér–Rao bound.
//!
//! The per-observation information integrates the squared score of the
//! absolutely continuous part of the increment law:
//! `I(λ, Δ) = (1 - e^{-λΔ}(1 + λ²Δ²)) / λ²`. When every interval contains a
//! turn it becomes `1/λ²`, which is the idealized value used for the bound.

use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::{integrate, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherInfo {
    pub per_observation: f64,
    pub idealized_per_observation: f64,
    pub n: usize,
    pub total: f64,
}

fn ensure_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

pub fn fisher_info(lambda: f64, delta: f64, n: usize) -> Result<FisherInfo> {
    ensure_positive("lambda", lambda)?;
    ensure_positive("delta", delta)?;
    ensure_count(n)?;
    let x = lambda * delta;
    // 1 - e^{-x}(1 + x²), arranged to keep precision for small x
    let numerator = -(-x).exp_m1() - x * x * (-x).exp();
    let per_observation = numerator / (lambda * lambda);
    Ok(FisherInfo {
        per_observation,
        idealized_per_observation: 1.0 / (lambda * lambda),
        n,
        total: n as f64 * per_observation,
    })
}

/// Per-observation information by direct quadrature of the squared score
/// over the disc of radius `cΔ`.
///
/// In polar coordinates with `z = √(c²Δ² - ρ²)` the integrand
/// `(λ/2πc) e^{-λΔ + λz/c}/z · (1/λ - Δ + z/c)²` loses its singularity and
/// the angle integrates out.
pub fn fisher_info_quadrature(lambda: f64, delta: f64, c: f64) -> Result<f64> {
    ensure_positive("lambda", lambda)?;
    ensure_positive("delta", delta)?;
    ensure_positive("c", c)?;
    let reach = c * delta;
    let q = integrate(
        |z: f64| {
            let score = 1.0 / lambda - delta + z / c;
            (-(lambda / c) * (reach - z)).exp() * score * score
        },
        0.0,
        reach,
        &QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_subdivisions: 10_000,
        },
    )?;
    Ok(lambda / c * q.value)
}

/// Bias function `b(λ) = E T_n - λ` of an estimator, with an optional
/// analytic derivative.
pub struct Bias<'a> {
    pub value: &'a dyn Fn(f64) -> f64,
    pub derivative: Option<&'a dyn Fn(f64) -> f64>,
}

impl Bias<'_> {
    /// `b'(λ)`, by central differences with step `1e-5·λ` if no derivative
    /// was given.
    pub fn slope(&self, lambda: f64) -> f64 {
        match self.derivative {
            Some(d) => d(lambda),
            None => {
                let h = 1e-5 * lambda;
                ((self.value)(lambda + h) - (self.value)(lambda - h)) / (2.0 * h)
            }
        }
    }
}

/// Lower bound on `E(T_n - λ)²`: `(1 + b'(λ))² λ²/n + b(λ)²`, using the
/// idealized information `n/λ²`.
pub fn cramer_rao_bound(lambda: f64, n: usize, bias: Option<&Bias<'_>>) -> Result<f64> {
    ensure_positive("lambda", lambda)?;
    ensure_count(n)?;
    let information = n as f64 / (lambda * lambda);
    Ok(match bias {
        None => 1.0 / information,
        Some(b) => {
            let slope = 1.0 + b.slope(lambda);
            slope * slope / information + (b.value)(lambda).powi(2)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_value() {
        let f = fisher_info(1.0, 1.0, 1).unwrap();
        assert!((f.per_observation - (1.0 - 2.0 / 1.0f64.exp())).abs() < 1e-15);
        assert_eq!(f.idealized_per_observation, 1.0);
        let f = fisher_info(2.0, 0.5, 40).unwrap();
        assert!((f.total - 40.0 * f.per_observation).abs() < 1e-15);
    }

    #[test]
    fn limits() {
        let big = fisher_info(2.0, 50.0, 1).unwrap();
        assert!((big.per_observation - 0.25).abs() < 1e-15);
        // Δ/λ - (3/2)Δ² + O(Δ³)
        let (lambda, delta) = (1.3, 1e-4);
        let f = fisher_info(lambda, delta, 1).unwrap().per_observation;
        let series = delta / lambda - 1.5 * delta * delta;
        assert!(((f - series) / f).abs() < 1e-3, "{f} vs {series}");
        let tiny = fisher_info(1.0, 1e-12, 1).unwrap().per_observation;
        assert!(tiny > 0.0 && (tiny - 1e-12).abs() < 1e-20);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for &l in &[0.5, 1.0, 2.0] {
            for &d in &[0.5, 1.0, 2.0] {
                let q = fisher_info_quadrature(l, d, 1.3).unwrap();
                let cf = fisher_info(l, d, 1).unwrap().per_observation;
                assert!((q - cf).abs() < 1e-12, "λ={l} Δ={d}: {q} vs {cf}");
            }
        }
    }

    #[test]
    fn monotone_and_bounded() {
        for &l in &[0.3, 1.0, 4.0] {
            let mut prev = 0.0;
            for k in 1..400 {
                let f = fisher_info(l, 0.025 * k as f64, 1).unwrap();
                assert!(f.per_observation >= prev);
                assert!(f.per_observation <= f.idealized_per_observation);
                prev = f.per_observation;
            }
        }
    }

    #[test]
    fn cramer_rao_cases() {
        assert!((cramer_rao_bound(2.0, 100, None).unwrap() - 0.04).abs() < 1e-15);
        let zero = |_: f64| 0.0;
        let b = Bias { value: &zero, derivative: None };
        assert_eq!(
            cramer_rao_bound(2.0, 100, Some(&b)).unwrap(),
            cramer_rao_bound(2.0, 100, None).unwrap()
        );
        let constant = |l: f64| -l;
        let b = Bias { value: &constant, derivative: None };
        let bound = cramer_rao_bound(3.0, 10, Some(&b)).unwrap();
        assert!((bound - 9.0).abs() < 1e-9, "{bound}");
        let minus_one = |_: f64| -1.0;
        let b = Bias { value: &constant, derivative: Some(&minus_one) };
        assert_eq!(cramer_rao_bound(3.0, 10, Some(&b)).unwrap(), 9.0);
        assert!(cramer_rao_bound(0.0, 10, None).is_err());
        assert!(cramer_rao_bound(1.0, 0, None).is_err());
    }
}
