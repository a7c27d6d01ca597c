//! Planar random flights observed at equidistant times.
//!
//! A particle moves in the plane at constant speed `c`; at the events of a
//! rate-`λ` Poisson process it picks a fresh direction uniformly on
//! `(0, 2π]`. This crate provides
//!
//! * exact trajectory simulation and grid sampling ([`flight`]),
//! * closed-form and quadrature evaluation of densities, moments, Bessel
//!   functions and Fisher information ([`analytics`], [`bessel`]),
//! * the pseudo-likelihood estimators of `λ` and their companions
//!   ([`estimators`]),
//! * a deterministic parallel Monte Carlo harness ([`montecarlo`]).

pub mod analytics;
pub mod bessel;
pub mod error;
pub mod estimators;
pub mod flight;
pub mod montecarlo;
pub mod quadrature;
pub mod report;
pub mod rng;
pub(crate) mod sum;

pub use error::{Error, Result};
pub use estimators::{Estimate, EstimatorKind, IncrementSummary};
pub use flight::{DiscreteSample, FlightParams, Point, Trajectory};
pub use montecarlo::{ExperimentConfig, ExperimentSummary};
pub use rng::SeedSpec;
