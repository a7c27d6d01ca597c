//! Exact simulation of planar random flights and equidistant sampling.
//!
//! Event times are generated as cumulative exponential interarrivals and
//! truncated at the horizon. The initial direction is not an event: a
//! trajectory with `N` events has `N + 1` directions.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::rng::SeedSpec;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Rate `λ`, speed `c` and starting point of a flight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlightParams {
    lambda: f64,
    c: f64,
    origin: Point,
}

impl FlightParams {
    pub fn new(lambda: f64, c: f64) -> Result<Self> {
        ensure_positive("lambda", lambda)?;
        ensure_positive("c", c)?;
        Ok(Self {
            lambda,
            c,
            origin: Point::ORIGIN,
        })
    }

    pub fn with_origin(mut self, origin: Point) -> Result<Self> {
        if !(origin.x.is_finite() && origin.y.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "origin must be finite, got ({}, {})",
                origin.x, origin.y
            )));
        }
        self.origin = origin;
        Ok(self)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn origin(&self) -> Point {
        self.origin
    }
}

/// A continuous-time path on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    params: FlightParams,
    horizon: f64,
    event_times: Vec<f64>,
    directions: Vec<f64>,
}

impl Trajectory {
    /// Builds a trajectory from explicit events and directions.
    ///
    /// `event_times` must be strictly increasing inside `(0, horizon)` and
    /// `directions` must hold one more entry than `event_times`. Directions
    /// are angles in radians; any finite value is accepted.
    pub fn new(
        params: FlightParams,
        horizon: f64,
        event_times: Vec<f64>,
        directions: Vec<f64>,
    ) -> Result<Self> {
        ensure_positive("horizon", horizon)?;
        if directions.len() != event_times.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} directions for {} events, got {}",
                event_times.len() + 1,
                event_times.len(),
                directions.len()
            )));
        }
        let mut prev = 0.0;
        for &s in &event_times {
            if !(s > prev && s < horizon) {
                return Err(Error::InvalidParameter(format!(
                    "event times must be strictly increasing in (0, {horizon}), got {s} after {prev}"
                )));
            }
            prev = s;
        }
        if let Some(d) = directions.iter().find(|d| !d.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite direction {d}")));
        }
        Ok(Self {
            params,
            horizon,
            event_times,
            directions,
        })
    }

    pub fn params(&self) -> &FlightParams {
        &self.params
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn event_times(&self) -> &[f64] {
        &self.event_times
    }

    pub fn directions(&self) -> &[f64] {
        &self.directions
    }

    /// `N(T)`, the number of direction changes.
    pub fn event_count(&self) -> usize {
        self.event_times.len()
    }

    /// Segment end times: `s_1, ..., s_N, T`.
    fn segment_ends(&self) -> impl Iterator<Item = f64> + '_ {
        self.event_times
            .iter()
            .copied()
            .chain(std::iter::once(self.horizon))
    }

    pub fn segment_lengths(&self) -> impl Iterator<Item = f64> + '_ {
        let c = self.params.c;
        let mut prev = 0.0;
        self.segment_ends().map(move |end| {
            let len = c * (end - prev);
            prev = end;
            len
        })
    }

    pub fn path_length(&self) -> f64 {
        self.segment_lengths().sum()
    }

    /// Position at time `t`, walking the segments in order.
    pub fn position_at(&self, t: f64) -> Result<Point> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::Domain(format!(
                "time {t} outside [0, {}]",
                self.horizon
            )));
        }
        let c = self.params.c;
        let mut p = self.params.origin;
        let mut start = 0.0;
        for (end, &theta) in self.segment_ends().zip(&self.directions) {
            let (sin, cos) = theta.sin_cos();
            if t <= end {
                let len = c * (t - start);
                return Ok(Point::new(p.x + len * cos, p.y + len * sin));
            }
            let len = c * (end - start);
            p = Point::new(p.x + len * cos, p.y + len * sin);
            start = end;
        }
        unreachable!("t <= horizon is always reached by the last segment")
    }

    /// Grid time `t_i = T·i/n`; `t_n` equals the horizon exactly.
    fn grid_time(&self, i: usize, n: usize) -> f64 {
        // T·n/n need not round back to T
        if i == n {
            self.horizon
        } else {
            self.horizon * (i as f64) / (n as f64)
        }
    }

    /// Positions at `t_i = iΔ`, `Δ = T/n`, in one merged sweep over events
    /// and grid points.
    pub fn sample_at_grid(&self, n: usize) -> Result<DiscreteSample> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let c = self.params.c;
        let mut positions = Vec::with_capacity(n + 1);
        let mut vertex = self.params.origin;
        let mut start = 0.0;
        let mut i = 0;
        for (end, &theta) in self.segment_ends().zip(&self.directions) {
            let (sin, cos) = theta.sin_cos();
            while i <= n {
                let t = self.grid_time(i, n);
                if t > end {
                    break;
                }
                let len = c * (t - start);
                positions.push(Point::new(vertex.x + len * cos, vertex.y + len * sin));
                i += 1;
            }
            let len = c * (end - start);
            vertex = Point::new(vertex.x + len * cos, vertex.y + len * sin);
            start = end;
        }
        debug_assert_eq!(positions.len(), n + 1);
        DiscreteSample::new(self.horizon / n as f64, c, positions)
    }

    /// Number of events in each observation interval `((i-1)Δ, iΔ]`.
    pub fn ground_truth_counts(&self, n: usize) -> Result<Vec<usize>> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let mut counts = vec![0usize; n];
        let mut i = 1;
        for &s in &self.event_times {
            while self.grid_time(i, n) < s {
                i += 1;
            }
            counts[i - 1] += 1;
        }
        Ok(counts)
    }
}

/// Simulates a trajectory on `[0, horizon]`.
///
/// The stream draws the initial direction first, then alternates an
/// exponential interarrival and a new direction until the horizon is passed.
pub fn simulate_trajectory(
    params: &FlightParams,
    horizon: f64,
    seed: SeedSpec,
) -> Result<Trajectory> {
    ensure_positive("horizon", horizon)?;
    let mut rng = seed.rng();
    let expected = (params.lambda * horizon).min(1e8) as usize;
    let mut event_times = Vec::with_capacity(expected + expected / 8 + 4);
    let mut directions = Vec::with_capacity(expected + expected / 8 + 5);
    directions.push(rng.direction());
    let mut s = 0.0;
    loop {
        s += rng.exponential(params.lambda);
        if s >= horizon {
            break;
        }
        event_times.push(s);
        directions.push(rng.direction());
    }
    Ok(Trajectory {
        params: *params,
        horizon,
        event_times,
        directions,
    })
}

/// The `n + 1` equidistant observations an observer sees.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSample {
    delta: f64,
    speed: f64,
    positions: Vec<Point>,
}

impl DiscreteSample {
    pub fn new(delta: f64, speed: f64, positions: Vec<Point>) -> Result<Self> {
        ensure_positive("delta", delta)?;
        ensure_positive("c", speed)?;
        if positions.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 positions, got {}",
                positions.len()
            )));
        }
        Ok(Self {
            delta,
            speed,
            positions,
        })
    }

    /// Grid step `Δ`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    /// Number of intervals `n`.
    pub fn intervals(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn time(&self, i: usize) -> f64 {
        self.delta * i as f64
    }

    /// Applies `f` to every position, keeping `Δ` and `c`.
    pub fn map_positions(&self, f: impl Fn(Point) -> Point) -> Self {
        Self {
            delta: self.delta,
            speed: self.speed,
            positions: self.positions.iter().copied().map(f).collect(),
        }
    }

    /// Rescales positions and speed by `a > 0`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        ensure_positive("scale", a)?;
        let mut out = self.map_positions(|p| Point::new(a * p.x, a * p.y));
        out.speed *= a;
        Ok(out)
    }
}

/// Wraps an angle onto `(0, 2π]`.
pub fn wrap_direction(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w == 0.0 {
        TAU
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn unit() -> FlightParams {
        FlightParams::new(1.0, 1.0).unwrap()
    }

    fn two_segment() -> Trajectory {
        Trajectory::new(unit(), 2.0, vec![1.0], vec![0.0, FRAC_PI_2]).unwrap()
    }

    fn close(a: Point, b: Point, tol: f64) -> bool {
        a.distance(&b) <= tol
    }

    #[test]
    fn rejects_bad_params() {
        assert!(FlightParams::new(0.0, 1.0).is_err());
        assert!(FlightParams::new(1.0, -1.0).is_err());
        assert!(FlightParams::new(f64::NAN, 1.0).is_err());
        assert!(FlightParams::new(f64::INFINITY, 1.0).is_err());
        assert!(simulate_trajectory(&unit(), 0.0, SeedSpec::new(1, 0)).is_err());
    }

    #[test]
    fn rejects_malformed_trajectory() {
        assert!(Trajectory::new(unit(), 2.0, vec![1.0], vec![0.0]).is_err());
        assert!(Trajectory::new(unit(), 2.0, vec![1.0, 1.0], vec![0.0; 3]).is_err());
        assert!(Trajectory::new(unit(), 2.0, vec![2.5], vec![0.0; 2]).is_err());
    }

    #[test]
    fn position_examples() {
        let straight = Trajectory::new(unit(), 4.0, vec![], vec![0.0]).unwrap();
        assert_eq!(straight.position_at(0.0).unwrap(), Point::ORIGIN);
        assert_eq!(straight.position_at(2.0).unwrap(), Point::new(2.0, 0.0));
        let p = two_segment().position_at(2.0).unwrap();
        assert!(close(p, Point::new(1.0, 1.0), 1e-15), "{p:?}");
        assert!(matches!(
            two_segment().position_at(2.5),
            Err(Error::Domain(_))
        ));
        assert!(two_segment().position_at(-0.1).is_err());
    }

    #[test]
    fn grid_examples() {
        let straight = Trajectory::new(unit(), 4.0, vec![], vec![0.0]).unwrap();
        let s = straight.sample_at_grid(4).unwrap();
        let xs: Vec<_> = s.positions().iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(xs, vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)]);
        assert_eq!(s.delta(), 1.0);

        let s = two_segment().sample_at_grid(2).unwrap();
        let want = [Point::ORIGIN, Point::new(1.0, 0.0), Point::new(1.0, 1.0)];
        for (p, w) in s.positions().iter().zip(want) {
            assert!(close(*p, w, 1e-15), "{p:?} vs {w:?}");
        }
        assert!(two_segment().sample_at_grid(0).is_err());
    }

    #[test]
    fn counts_examples() {
        let straight = Trajectory::new(unit(), 4.0, vec![], vec![0.0]).unwrap();
        assert_eq!(straight.ground_truth_counts(3).unwrap(), vec![0, 0, 0]);
        assert_eq!(two_segment().ground_truth_counts(2).unwrap(), vec![1, 0]);
        assert!(two_segment().ground_truth_counts(0).is_err());
    }

    #[test]
    fn zero_event_seed_gives_straight_segment() {
        let params = unit();
        let horizon = 1e-3;
        let traj = (0..1000)
            .map(|s| simulate_trajectory(&params, horizon, SeedSpec::new(s, 0)).unwrap())
            .find(|t| t.event_count() == 0)
            .expect("P(no event) = e^-0.001, some seed must give none");
        assert_eq!(traj.directions().len(), 1);
        let end = traj.position_at(horizon).unwrap();
        assert!((end.norm() - horizon).abs() < 1e-15);
    }

    #[test]
    fn simulation_is_deterministic() {
        let p = FlightParams::new(2.0, 1.5).unwrap();
        let a = simulate_trajectory(&p, 50.0, SeedSpec::new(42, 7)).unwrap();
        let b = simulate_trajectory(&p, 50.0, SeedSpec::new(42, 7)).unwrap();
        assert_eq!(a, b);
        let c = simulate_trajectory(&p, 50.0, SeedSpec::new(42, 8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn directions_in_range() {
        let t = simulate_trajectory(&unit(), 200.0, SeedSpec::new(3, 3)).unwrap();
        assert!(t.directions().iter().all(|&d| d > 0.0 && d <= TAU));
    }

    #[test]
    fn wrap() {
        assert_eq!(wrap_direction(0.0), TAU);
        assert!((wrap_direction(-FRAC_PI_2) - 3.0 * FRAC_PI_2).abs() < 1e-15);
    }
}
