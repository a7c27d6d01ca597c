//! Deterministic parallel Monte Carlo study of the estimators.
//!
//! Every replication owns a random stream addressed by
//! `(master_seed, stream_index(λ-index, n-index, rep_index))`, so a cell can
//! be reproduced on its own. Replication results are collected in
//! `rep_index` order and reduced with fixed-order pairwise summation, which
//! makes the output bit-identical for any thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::estimators::{self, validate_epsilon, Estimate, IncrementSummary, DEFAULT_EPSILON};
use crate::flight::{simulate_trajectory, FlightParams};
use crate::rng::{stream_index, SeedSpec};
use crate::sum::pairwise_sum;

/// Estimator selector used by experiment configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorChoice {
    Hat,
    Tilde,
    Dot,
}

impl EstimatorChoice {
    pub const ALL: [EstimatorChoice; 3] = [Self::Hat, Self::Tilde, Self::Dot];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Hat => "hat",
            Self::Tilde => "tilde",
            Self::Dot => "dot",
        }
    }

    pub fn evaluate(&self, summary: &IncrementSummary) -> Result<Estimate> {
        match self {
            Self::Hat => estimators::lambda_hat(summary),
            Self::Tilde => estimators::lambda_tilde(summary),
            Self::Dot => Ok(estimators::lambda_dot(summary)),
        }
    }
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_estimators() -> Vec<EstimatorChoice> {
    vec![EstimatorChoice::Hat]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub lambda_grid: Vec<f64>,
    pub n_grid: Vec<usize>,
    #[serde(rename = "T", alias = "horizon")]
    pub horizon: f64,
    pub c: f64,
    pub reps: usize,
    pub master_seed: u64,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorChoice>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

impl ExperimentConfig {
    /// The Monte Carlo design of the published study: `T = 500`, `c = 1`,
    /// 10 000 paths, `n ∈ {200, 300, 500, 1000}`,
    /// `λ ∈ {0.1, 0.25, 0.5, 0.75, 1, 1.5, 2}`.
    pub fn table1(master_seed: u64) -> Self {
        Self {
            lambda_grid: vec![0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0],
            n_grid: vec![200, 300, 500, 1000],
            horizon: 500.0,
            c: 1.0,
            reps: 10_000,
            master_seed,
            estimators: vec![EstimatorChoice::Hat],
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda_grid.is_empty() || self.n_grid.is_empty() || self.estimators.is_empty() {
            return Err(Error::InvalidParameter(
                "lambda_grid, n_grid and estimators must be non-empty".into(),
            ));
        }
        for &l in &self.lambda_grid {
            ensure_positive("lambda", l)?;
        }
        if self.n_grid.contains(&0) {
            return Err(Error::InvalidParameter("n_grid values must be >= 1".into()));
        }
        ensure_positive("T", self.horizon)?;
        ensure_positive("c", self.c)?;
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be >= 1".into()));
        }
        validate_epsilon(self.epsilon)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.lambda_grid.iter().enumerate().flat_map(move |(li, &lambda)| {
            self.n_grid.iter().enumerate().map(move |(ni, &n)| Cell {
                lambda_index: li,
                n_index: ni,
                lambda,
                n,
            })
        })
    }
}

/// One `(λ, n)` point of the design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub lambda_index: usize,
    pub n_index: usize,
    pub lambda: f64,
    pub n: usize,
}

impl Cell {
    pub fn seed(&self, master_seed: u64, rep_index: u64) -> SeedSpec {
        SeedSpec::new(
            master_seed,
            stream_index(&[self.lambda_index as u64, self.n_index as u64, rep_index]),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Saturated,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationValue {
    pub estimator: EstimatorChoice,
    pub status: Status,
    /// `None` unless `status` is `Ok`.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationRecord {
    pub lambda: f64,
    pub n: usize,
    pub rep: u64,
    pub events: usize,
    pub n_plus: Option<usize>,
    pub values: Vec<ReplicationValue>,
}

impl ReplicationRecord {
    pub fn value(&self, estimator: EstimatorChoice) -> Option<&ReplicationValue> {
        self.values.iter().find(|v| v.estimator == estimator)
    }
}

/// Simulates one path for `cell`, samples it on the `n`-point grid and runs
/// every requested estimator. Estimator failures are recorded, not raised.
pub fn run_replication(config: &ExperimentConfig, cell: &Cell, rep_index: u64) -> Result<ReplicationRecord> {
    let params = FlightParams::new(cell.lambda, config.c)?;
    let traj = simulate_trajectory(&params, config.horizon, cell.seed(config.master_seed, rep_index))?;
    let summary = traj
        .sample_at_grid(cell.n)
        .and_then(|s| IncrementSummary::from_sample(&s, config.epsilon));
    let values = config
        .estimators
        .iter()
        .map(|&estimator| {
            let outcome = summary.as_ref().map_err(Clone::clone).and_then(|s| estimator.evaluate(s));
            let (status, value) = match outcome {
                Ok(e) if e.saturated || !e.value.is_finite() => (Status::Saturated, None),
                Ok(e) => (Status::Ok, Some(e.value)),
                Err(_) => (Status::Failed, None),
            };
            ReplicationValue {
                estimator,
                status,
                value,
            }
        })
        .collect();
    Ok(ReplicationRecord {
        lambda: cell.lambda,
        n: cell.n,
        rep: rep_index,
        events: traj.event_count(),
        n_plus: summary.ok().map(|s| s.n_plus),
        values,
    })
}

/// Sample moments of one cell, in the column layout of the published table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub bias: f64,
    pub rmse: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Bias and root mean squared error about the true `λ`:
/// `√((1/N) Σ (λ̂ - λ)²)`.
pub fn summarize(lambda: f64, values: &[f64]) -> Result<Moments> {
    if values.is_empty() {
        return Err(Error::EmptyCell {
            lambda,
            n: 0,
            estimator: String::new(),
        });
    }
    let count = values.len() as f64;
    let mean = pairwise_sum(values) / count;
    let squares: Vec<f64> = values.iter().map(|v| (v - lambda) * (v - lambda)).collect();
    let rmse = (pairwise_sum(&squares) / count).sqrt();
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(Moments {
        bias: mean - lambda,
        rmse,
        mean,
        min,
        max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub lambda: f64,
    pub c: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub n: usize,
    pub delta: f64,
    pub estimator: EstimatorChoice,
    pub reps: usize,
    pub bias: f64,
    pub rmse: f64,
    pub min: f64,
    pub max: f64,
    /// Replications excluded from the moments (saturated or failed).
    pub saturated_count: usize,
    /// Subset of `saturated_count` that raised a numerical error.
    pub failed_count: usize,
    pub successful: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    pub keep_records: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentOutput {
    pub summaries: Vec<ExperimentSummary>,
    /// Per-replication records, in cell then `rep_index` order, when
    /// requested.
    pub records: Vec<ReplicationRecord>,
}

fn summarize_cell(config: &ExperimentConfig, cell: &Cell, estimator: EstimatorChoice, records: &[ReplicationRecord]) -> ExperimentSummary {
    let mut values = Vec::with_capacity(records.len());
    let (mut saturated, mut failed) = (0, 0);
    for r in records {
        match r.value(estimator) {
            Some(ReplicationValue { status: Status::Ok, value: Some(v), .. }) => values.push(*v),
            Some(ReplicationValue { status: Status::Failed, .. }) => {
                saturated += 1;
                failed += 1;
            }
            _ => saturated += 1,
        }
    }
    let m = summarize(cell.lambda, &values).unwrap_or(Moments {
        bias: f64::NAN,
        rmse: f64::NAN,
        mean: f64::NAN,
        min: f64::NAN,
        max: f64::NAN,
    });
    ExperimentSummary {
        lambda: cell.lambda,
        c: config.c,
        horizon: config.horizon,
        n: cell.n,
        delta: config.horizon / cell.n as f64,
        estimator,
        reps: records.len(),
        bias: m.bias,
        rmse: m.rmse,
        min: m.min,
        max: m.max,
        saturated_count: saturated,
        failed_count: failed,
        successful: values.len(),
    }
}

fn run_cells(config: &ExperimentConfig, keep_records: bool) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::default();
    for cell in config.cells() {
        let records = (0..config.reps as u64)
            .into_par_iter()
            .map(|rep| run_replication(config, &cell, rep))
            .collect::<Result<Vec<_>>>()?;
        for &estimator in &config.estimators {
            out.summaries.push(summarize_cell(config, &cell, estimator, &records));
        }
        if keep_records {
            out.records.extend(records);
        }
    }
    Ok(out)
}

/// Runs the full design: one summary per `(λ, n, estimator)`, in
/// `λ`-major, then `n`, then estimator order.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentOutput> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_cells(config, opts.keep_records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            lambda_grid: vec![0.5, 2.0],
            n_grid: vec![20, 50],
            horizon: 50.0,
            c: 1.0,
            reps: 64,
            master_seed: 11,
            estimators: EstimatorChoice::ALL.to_vec(),
            epsilon: DEFAULT_EPSILON,
        }
    }

    #[test]
    fn summarize_hand_cases() {
        let m = summarize(1.0, &[1.0, 1.0]).unwrap();
        assert_eq!((m.bias, m.rmse), (0.0, 0.0));
        let m = summarize(1.0, &[0.9, 1.1]).unwrap();
        assert!(m.bias.abs() < 1e-15 && (m.rmse - 0.1).abs() < 1e-15);
        let m = summarize(1.0, &[1.1, 1.1]).unwrap();
        assert!((m.bias - 0.1).abs() < 1e-15 && (m.rmse - 0.1).abs() < 1e-15);
        let m = summarize(2.0, &[2.5]).unwrap();
        assert_eq!(m.bias, 0.5);
        assert_eq!(m.rmse, 0.5);
        assert_eq!(m.min, m.max);
        assert!(matches!(summarize(1.0, &[]), Err(Error::EmptyCell { .. })));
    }

    #[test]
    fn replication_is_deterministic() {
        let cfg = small();
        let cell = cfg.cells().nth(3).unwrap();
        assert_eq!(
            run_replication(&cfg, &cell, 17).unwrap(),
            run_replication(&cfg, &cell, 17).unwrap()
        );
        assert_ne!(
            run_replication(&cfg, &cell, 17).unwrap(),
            run_replication(&cfg, &cell, 18).unwrap()
        );
    }

    #[test]
    fn event_free_replication_records_zero() {
        let mut cfg = small();
        cfg.lambda_grid = vec![1e-4];
        cfg.horizon = 1.0;
        let cell = cfg.cells().next().unwrap();
        let rec = (0..100)
            .map(|r| run_replication(&cfg, &cell, r).unwrap())
            .find(|r| r.events == 0)
            .unwrap();
        assert_eq!(rec.value(EstimatorChoice::Hat).unwrap().value, Some(0.0));
        assert_eq!(rec.value(EstimatorChoice::Dot).unwrap().value, Some(0.0));
    }

    #[test]
    fn accounting_and_ordering() {
        let cfg = small();
        let out = run_experiment(&cfg, &RunOptions { threads: 2, keep_records: true }).unwrap();
        assert_eq!(out.summaries.len(), 2 * 2 * 3);
        assert_eq!(out.records.len(), 4 * 64);
        for s in &out.summaries {
            assert_eq!(s.saturated_count + s.successful, s.reps);
            if s.successful > 0 {
                assert!(s.rmse >= s.bias.abs());
                let mean = s.bias + s.lambda;
                assert!(s.min <= mean && mean <= s.max);
            }
        }
        let first = &out.summaries[0];
        assert_eq!((first.lambda, first.n, first.estimator), (0.5, 20, EstimatorChoice::Hat));
    }

    #[test]
    fn thread_count_invariance() {
        let cfg = small();
        let a = run_experiment(&cfg, &RunOptions { threads: 1, keep_records: false }).unwrap();
        let b = run_experiment(&cfg, &RunOptions { threads: 3, keep_records: false }).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn validation() {
        let mut cfg = small();
        cfg.reps = 0;
        assert!(run_experiment(&cfg, &RunOptions::default()).is_err());
        let mut cfg = small();
        cfg.lambda_grid.push(-1.0);
        assert!(cfg.validate().is_err());
        let mut cfg = small();
        cfg.n_grid = vec![];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"lambda_grid":[1.0],"n_grid":[10],"T":5,"c":1,"reps":3,"master_seed":9,"estimators":["hat","dot"]}"#,
        )
        .unwrap();
        assert_eq!(cfg.horizon, 5.0);
        assert_eq!(cfg.epsilon, DEFAULT_EPSILON);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"lambda_grid":[1.0],"bogus":1}"#).is_err());
    }
}
