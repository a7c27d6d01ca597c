//! Estimation of the turn rate `λ` from equidistant observations.
//!
//! Each increment is scored against the law of a single flight over one
//! grid step. The slack `u_i = c²Δ² - |ΔX_i|²` is zero exactly when no turn
//! happened in the interval; in floating point an interval counts as turned
//! when `u_i > ε(cΔ)²`.
//!
//! Estimators:
//!
//! | kind           | formula                                  |
//! |----------------|------------------------------------------|
//! | `pseudo_mle`   | `c n⁺ / (c n Δ - Σ_turned √u_i)`         |
//! | `modified_mle` | `c n / (c n Δ - Σ √u_i)`                 |
//! | `indicator`    | `-ln(1 - n⁺/n) / Δ`                      |
//! | `poisson_mle`  | `N(T) / T` (needs the continuous path)   |

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::flight::{DiscreteSample, Trajectory};
use crate::sum::pairwise_sum;

pub const DEFAULT_EPSILON: f64 = 1e-9;
pub const MAX_EPSILON: f64 = 1e-3;

pub fn validate_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= MAX_EPSILON {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, {MAX_EPSILON}], got {epsilon}"
        )))
    }
}

/// Per-interval statistics shared by all estimators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementSummary {
    pub n: usize,
    pub delta: f64,
    pub c: f64,
    pub epsilon: f64,
    /// Slack `c²Δ² - η_i²`, clamped at zero.
    pub u: Vec<f64>,
    /// Displacement lengths `η_i`.
    pub eta: Vec<f64>,
    pub turned: Vec<bool>,
    pub n_plus: usize,
    pub sum_sqrt_u_turned: f64,
    /// `Σ √u_i` over all intervals; unturned intervals contribute zero.
    pub sum_sqrt_u_all: f64,
}

impl IncrementSummary {
    pub fn from_sample(sample: &DiscreteSample, epsilon: f64) -> Result<Self> {
        validate_epsilon(epsilon)?;
        let delta = sample.delta();
        let c = sample.speed();
        let step = c * delta;
        let threshold = epsilon * step * step;
        let n = sample.intervals();

        let mut u = Vec::with_capacity(n);
        let mut eta = Vec::with_capacity(n);
        let mut turned = Vec::with_capacity(n);
        let mut roots = Vec::with_capacity(n);
        for (i, w) in sample.positions().windows(2).enumerate() {
            let length = w[1].distance(&w[0]);
            let slack = (step - length) * (step + length);
            if slack < -threshold {
                return Err(Error::InconsistentInput(format!(
                    "interval {}: displacement {length} exceeds c*delta = {step}",
                    i + 1
                )));
            }
            let is_turn = slack > threshold;
            let slack = slack.max(0.0);
            u.push(slack);
            eta.push(length);
            turned.push(is_turn);
            roots.push(if is_turn { slack.sqrt() } else { 0.0 });
        }
        let n_plus = turned.iter().filter(|&&t| t).count();
        let sum_sqrt = pairwise_sum(&roots);
        Ok(Self {
            n,
            delta,
            c,
            epsilon,
            u,
            eta,
            turned,
            n_plus,
            sum_sqrt_u_turned: sum_sqrt,
            sum_sqrt_u_all: sum_sqrt,
        })
    }

    /// Observation span `nΔ`.
    pub fn span(&self) -> f64 {
        self.n as f64 * self.delta
    }
}

/// Shorthand for [`IncrementSummary::from_sample`].
pub fn summarize_increments(sample: &DiscreteSample, epsilon: f64) -> Result<IncrementSummary> {
    IncrementSummary::from_sample(sample, epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    PseudoMle,
    ModifiedMle,
    Indicator,
    PoissonMle,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PseudoMle => "pseudo_mle",
            Self::ModifiedMle => "modified_mle",
            Self::Indicator => "indicator",
            Self::PoissonMle => "poisson_mle",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub kind: EstimatorKind,
    pub value: f64,
    /// Asymptotic standard error; zero when the estimate is zero.
    pub stderr: f64,
    pub n: usize,
    pub delta: f64,
    pub n_plus: usize,
    /// The estimator diverged (indicator estimator with every interval turned).
    pub saturated: bool,
    /// The data violate the modelling assumption of the estimator
    /// (modified MLE computed although some interval shows no turn).
    pub assumption_violated: bool,
}

impl Estimate {
    fn new(kind: EstimatorKind, value: f64, stderr: f64, s: &IncrementSummary) -> Self {
        Self {
            kind,
            value,
            stderr,
            n: s.n,
            delta: s.delta,
            n_plus: s.n_plus,
            saturated: false,
            assumption_violated: false,
        }
    }
}

/// Log pseudo-likelihood, additive constants included.
pub fn pseudo_log_likelihood(s: &IncrementSummary, lambda: f64) -> Result<f64> {
    ensure_rate(lambda)?;
    let log_roots: Vec<f64> = s
        .u
        .iter()
        .zip(&s.turned)
        .filter(|(_, &t)| t)
        .map(|(&u, _)| 0.5 * u.ln())
        .collect();
    let n = s.n as f64;
    Ok(-lambda * s.span() + s.n_plus as f64 * lambda.ln() + lambda / s.c * s.sum_sqrt_u_turned
        - pairwise_sum(&log_roots)
        - n * (2.0 * PI * s.c).ln())
}

/// Derivative of [`pseudo_log_likelihood`] in `λ`.
pub fn score(s: &IncrementSummary, lambda: f64) -> Result<f64> {
    ensure_rate(lambda)?;
    Ok(-s.span() + s.sum_sqrt_u_turned / s.c + s.n_plus as f64 / lambda)
}

/// Root of the score. With no turned interval the pseudo-likelihood
/// decreases in `λ` and the estimate is 0.
pub fn lambda_hat(s: &IncrementSummary) -> Result<Estimate> {
    if s.n_plus == 0 {
        return Ok(Estimate::new(EstimatorKind::PseudoMle, 0.0, 0.0, s));
    }
    let denom = s.c * s.span() - s.sum_sqrt_u_turned;
    if !(denom > 0.0) {
        return Err(Error::Numerical {
            message: format!("pseudo-MLE denominator {denom} is not positive"),
            estimate: f64::NAN,
        });
    }
    let value = s.c * s.n_plus as f64 / denom;
    Ok(Estimate::new(
        EstimatorKind::PseudoMle,
        value,
        (value / s.span()).sqrt(),
        s,
    ))
}

/// Estimator that assumes every interval contains a turn. Computed anyway
/// when that fails, with `assumption_violated` set.
pub fn lambda_tilde(s: &IncrementSummary) -> Result<Estimate> {
    let denom = s.c * s.span() - s.sum_sqrt_u_all;
    if !(denom > 0.0) {
        return Err(Error::Numerical {
            message: format!("modified MLE denominator {denom} is not positive"),
            estimate: f64::NAN,
        });
    }
    let value = s.c * s.n as f64 / denom;
    let mut e = Estimate::new(
        EstimatorKind::ModifiedMle,
        value,
        value / (s.n as f64).sqrt(),
        s,
    );
    e.assumption_violated = s.n_plus < s.n;
    Ok(e)
}

/// `-ln(1 - ΔG_n)/Δ` with `G_n = n⁺/(nΔ)`. Saturates (value `+∞`) when every
/// interval turned.
pub fn lambda_dot(s: &IncrementSummary) -> Estimate {
    if s.n_plus == s.n {
        let mut e = Estimate::new(EstimatorKind::Indicator, f64::INFINITY, f64::INFINITY, s);
        e.saturated = true;
        return e;
    }
    let fraction = s.n_plus as f64 / s.n as f64;
    let value = -(-fraction).ln_1p() / s.delta;
    Estimate::new(
        EstimatorKind::Indicator,
        value,
        (value / s.span()).sqrt(),
        s,
    )
}

/// `N(T)/T` from the continuously observed path.
pub fn poisson_mle(traj: &Trajectory) -> Result<Estimate> {
    let horizon = traj.horizon();
    ensure_positive("horizon", horizon)?;
    let value = traj.event_count() as f64 / horizon;
    Ok(Estimate {
        kind: EstimatorKind::PoissonMle,
        value,
        stderr: (value / horizon).sqrt(),
        n: traj.event_count(),
        delta: horizon,
        n_plus: traj.event_count(),
        saturated: false,
        assumption_violated: false,
    })
}

/// Local scale `φ(n) = λ/√n` of the normalized likelihood ratio.
pub fn local_scale(lambda: f64, n: usize) -> f64 {
    lambda / (n as f64).sqrt()
}

/// `ln Z_{n,λ}(z)` of the modified pseudo-likelihood.
pub fn pseudo_log_lr(s: &IncrementSummary, lambda: f64, z: f64) -> Result<f64> {
    ensure_rate(lambda)?;
    let phi = local_scale(lambda, s.n);
    let shifted = lambda + phi * z;
    if !(shifted > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!(
            "z = {z} moves lambda to {shifted}, outside (0, inf)"
        )));
    }
    let n = s.n as f64;
    Ok(phi * z / s.c * s.sum_sqrt_u_all - phi * n * z * s.delta + n * (phi * z / lambda).ln_1p())
}

/// Normalized pseudo-likelihood ratio `Z_{n,λ}(z)`.
pub fn pseudo_lr(s: &IncrementSummary, lambda: f64, z: f64) -> Result<f64> {
    pseudo_log_lr(s, lambda, z).map(f64::exp)
}

fn ensure_rate(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda must be positive, got {lambda}")))
    }
}
