use pfl::estimators::{
    lambda_dot, lambda_hat, lambda_tilde, poisson_mle, pseudo_log_likelihood, pseudo_log_lr, score,
    summarize_increments, DEFAULT_EPSILON,
};
use pfl::flight::simulate_trajectory;
use pfl::{DiscreteSample, FlightParams, Point, SeedSpec, Trajectory};
use proptest::prelude::*;

fn path(lambda: f64, c: f64, horizon: f64, seed: u64, stream: u64) -> Trajectory {
    let p = FlightParams::new(lambda, c).unwrap();
    simulate_trajectory(&p, horizon, SeedSpec::new(seed, stream)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

fn estimates(sample: &DiscreteSample) -> [f64; 3] {
    let s = summarize_increments(sample, DEFAULT_EPSILON).unwrap();
    [
        lambda_hat(&s).unwrap().value,
        lambda_tilde(&s).unwrap().value,
        lambda_dot(&s).value,
    ]
}

fn sampled() -> impl Strategy<Value = DiscreteSample> {
    (0.1f64..3.0, 0.2f64..5.0, 5.0f64..200.0, 2usize..400, any::<u64>())
        .prop_map(|(l, c, t, n, seed)| path(l, c, t, seed, 0).sample_at_grid(n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn score_vanishes_at_hat(sample in sampled()) {
        let s = summarize_increments(&sample, DEFAULT_EPSILON).unwrap();
        prop_assume!(s.n_plus >= 1);
        let hat = lambda_hat(&s).unwrap().value;
        prop_assert!(score(&s, hat).unwrap().abs() <= 1e-10 * s.n as f64);
    }

    #[test]
    fn rotation_invariance(sample in sampled(), angle in 0.0f64..std::f64::consts::TAU) {
        let (sin, cos) = angle.sin_cos();
        let turned = sample.map_positions(|p| Point::new(cos * p.x - sin * p.y, sin * p.x + cos * p.y));
        let a = summarize_increments(&sample, DEFAULT_EPSILON).unwrap();
        let b = summarize_increments(&turned, DEFAULT_EPSILON).unwrap();
        prop_assert_eq!(a.n_plus, b.n_plus);
        prop_assert_eq!(&a.turned, &b.turned);
        // √u is ill-conditioned for barely turned intervals; compare on the
        // scale it enters the estimators at
        let span = a.c * a.span();
        prop_assert!((b.sum_sqrt_u_turned - a.sum_sqrt_u_turned).abs() <= 1e-12 * span);
        for (x, y) in estimates(&sample).iter().zip(estimates(&turned)) {
            prop_assert!(rel(y, *x) <= 1e-12, "{} vs {}", x, y);
        }
    }

    #[test]
    fn scale_invariance(sample in sampled(), a in 0.01f64..100.0) {
        let scaled = sample.scaled(a).unwrap();
        let before = summarize_increments(&sample, DEFAULT_EPSILON).unwrap();
        let after = summarize_increments(&scaled, DEFAULT_EPSILON).unwrap();
        prop_assert_eq!(before.n_plus, after.n_plus);
        for (x, y) in estimates(&sample).iter().zip(estimates(&scaled)) {
            prop_assert!(rel(y, *x) <= 1e-12, "{} vs {}", x, y);
        }
    }

    #[test]
    fn hat_equals_tilde_when_every_interval_turned(seed in any::<u64>(), n in 2usize..100) {
        // λΔ = 20: every interval turns with overwhelming probability
        let sample = path(4.0, 1.0, 5.0 * n as f64, seed, 1).sample_at_grid(n).unwrap();
        let s = summarize_increments(&sample, DEFAULT_EPSILON).unwrap();
        prop_assume!(s.n_plus == s.n);
        prop_assert_eq!(lambda_hat(&s).unwrap().value, lambda_tilde(&s).unwrap().value);
        prop_assert!(lambda_dot(&s).saturated);
    }

    #[test]
    fn score_matches_finite_difference(sample in sampled()) {
        let s = summarize_increments(&sample, DEFAULT_EPSILON).unwrap();
        for &lambda in &[0.5, 1.0, 2.0] {
            let h = 1e-6;
            let fd = (pseudo_log_likelihood(&s, lambda + h).unwrap()
                - pseudo_log_likelihood(&s, lambda - h).unwrap())
                / (2.0 * h);
            let exact = score(&s, lambda).unwrap();
            prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(s.n as f64), "{} vs {}", fd, exact);
        }
    }

    #[test]
    fn likelihood_is_concave(sample in sampled(), lambda in 0.05f64..5.0) {
        let s = summarize_increments(&sample, DEFAULT_EPSILON).unwrap();
        prop_assume!(s.n_plus >= 1);
        let h = 1e-3 * lambda;
        let second = pseudo_log_likelihood(&s, lambda + h).unwrap()
            - 2.0 * pseudo_log_likelihood(&s, lambda).unwrap()
            + pseudo_log_likelihood(&s, lambda - h).unwrap();
        prop_assert!(second < 0.0);
    }
}

#[test]
fn classification_matches_ground_truth() {
    for (k, &product) in [0.1, 1.0, 5.0].iter().enumerate() {
        let (n, delta) = (10_000, 1.0);
        let traj = path(product / delta, 1.0, n as f64 * delta, 31, k as u64);
        let s = summarize_increments(&traj.sample_at_grid(n).unwrap(), DEFAULT_EPSILON).unwrap();
        let counts = traj.ground_truth_counts(n).unwrap();
        let wrong = (0..n).filter(|&i| s.turned[i] != (counts[i] >= 1)).count();
        assert_eq!(wrong, 0, "λΔ = {product}: {wrong} misclassified intervals");
    }
}

#[test]
fn consistency_sweep() {
    let reps = 500u64;
    let mut rmse = Vec::new();
    let mut last_variance = 0.0;
    for k in 0..3 {
        let horizon = 100.0 * 4f64.powi(k);
        let delta = 0.5 * 0.5f64.powi(k);
        let n = (horizon / delta).round() as usize;
        let mut sq = 0.0;
        let mut scaled = Vec::new();
        for rep in 0..reps {
            let sample = path(1.0, 1.0, horizon, 404 + k as u64, rep).sample_at_grid(n).unwrap();
            let s = summarize_increments(&sample, DEFAULT_EPSILON).unwrap();
            sq += (lambda_hat(&s).unwrap().value - 1.0).powi(2);
            scaled.push(horizon.sqrt() * (lambda_dot(&s).value - 1.0));
        }
        rmse.push((sq / reps as f64).sqrt());
        let mean = scaled.iter().sum::<f64>() / reps as f64;
        last_variance = scaled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    }
    assert!(rmse[0] > rmse[1] && rmse[1] > rmse[2], "rmse {rmse:?}");
    assert!((0.8..=1.2).contains(&last_variance), "variance {last_variance}");
}

#[test]
fn lan_centering() {
    // ln Z(1) + 1/2 → 0 under the true λ; checked where every interval turns
    let (n, delta, reps) = (1000, 10.0, 2000u64);
    let values: Vec<f64> = (0..reps)
        .map(|rep| {
            let sample = path(1.0, 1.0, n as f64 * delta, 99, rep).sample_at_grid(n).unwrap();
            let s = summarize_increments(&sample, DEFAULT_EPSILON).unwrap();
            pseudo_log_lr(&s, 1.0, 1.0).unwrap() + 0.5
        })
        .collect();
    let mean = values.iter().sum::<f64>() / reps as f64;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
    assert!(mean.abs() <= 3.0 * sd / (reps as f64).sqrt(), "mean {mean}, sd {sd}");
}

#[test]
fn fine_grid_recovers_poisson_mle() {
    let traj = path(1.0, 1.0, 100.0, 8, 0);
    let s = summarize_increments(&traj.sample_at_grid(1_000_000).unwrap(), DEFAULT_EPSILON).unwrap();
    let hat = lambda_hat(&s).unwrap().value;
    let poisson = poisson_mle(&traj).unwrap().value;
    assert!(rel(hat, poisson) <= 0.02, "{hat} vs {poisson}");
}

#[test]
fn table1_row_range() {
    // λ = 1, n = 1000, T = 500: the published extremes are 0.82 and 1.18
    let (lo, hi) = (0.82 - 0.05, 1.18 + 0.05);
    let outside = (0..500u64)
        .filter(|&rep| {
            let sample = path(1.0, 1.0, 500.0, 12, rep).sample_at_grid(1000).unwrap();
            let v = lambda_hat(&summarize_increments(&sample, DEFAULT_EPSILON).unwrap()).unwrap().value;
            !(lo..=hi).contains(&v)
        })
        .count();
    assert!(outside <= 1, "{outside} replications outside [{lo}, {hi}]");
}
