//! Problem statement, peak vectors and the achievement-time function.
//!
//! Every vector here is 0-based with entry 0 holding the distance `s`, so
//! entry `n` is the peak of the `n`-th derivative. For a symmetric
//! trajectory whose top derivative only takes the values `{-c, 0, c}` the
//! earliest time at which order `n` reaches its peak is
//!
//! ```text
//! T_n = sum_{k=n}^{N-1} x_k / x_{k+1}
//! ```
//!
//! and `T_0` is the whole horizon.

use crate::error::{check_positive, check_positive_entries, Error, Result};
use crate::MAX_ORDER;

/// Relative tolerance used to decide that `T_n = 2 T_{n+1}` holds.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Distance and per-order bounds of a rest-to-rest motion.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionSpec {
    distance: f64,
    bounds: Vec<f64>,
}

impl MotionSpec {
    /// `bounds` holds `w_1..w_N`; its length is the order.
    pub fn new(distance: f64, bounds: Vec<f64>) -> Result<Self> {
        check_order(bounds.len())?;
        check_positive("distance", distance)?;
        if let Some(i) = bounds.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::NonPositive {
                what: "bound w",
                index: i + 1,
                value: bounds[i],
            });
        }
        Ok(Self { distance, bounds })
    }

    pub fn order(&self) -> usize {
        self.bounds.len()
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// `w_1..w_N`.
    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    /// Bound of derivative order `n` (1-based, `1 <= n <= N`).
    pub fn bound(&self, n: usize) -> f64 {
        self.bounds[n - 1]
    }

    /// Copy of this spec with `w_n` replaced.
    pub fn with_bound(&self, n: usize, value: f64) -> Result<Self> {
        if n == 0 || n > self.order() {
            return Err(Error::Invalid(format!(
                "bound index {n} outside 1..={}",
                self.order()
            )));
        }
        let mut bounds = self.bounds.clone();
        bounds[n - 1] = value;
        Self::new(self.distance, bounds)
    }

    /// `(s, w_1, ..., w_N)` as a vector in peak layout.
    pub fn bound_vector(&self) -> PeakVector {
        let mut values = Vec::with_capacity(self.order() + 1);
        values.push(self.distance);
        values.extend_from_slice(&self.bounds);
        PeakVector(values)
    }
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if (1..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder(order))
    }
}

/// Anything laid out as `(x_0, ..., x_N)` with strictly positive entries.
pub trait Peaks {
    fn values(&self) -> &[f64];

    fn order(&self) -> usize {
        self.values().len() - 1
    }
}

/// Achieved extrema `x_0..x_N` of a motion, `x_0 = s`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakVector(Vec<f64>);

impl PeakVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::LengthMismatch {
                what: "peak vector",
                expected: 2,
                got: values.len(),
            });
        }
        check_order(values.len() - 1)?;
        check_positive_entries("peak x", &values)?;
        Ok(Self(values))
    }

    pub fn get(&self, n: usize) -> f64 {
        self.0[n]
    }

    pub fn distance(&self) -> f64 {
        self.0[0]
    }

    /// Peak of the highest order, `x_N`.
    pub fn top(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Peaks for PeakVector {
    fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Earliest achievement times `T_0..T_N`.
///
/// `T_N = 0` because the top derivative sits at its peak from `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AchievementTimes(Vec<f64>);

impl AchievementTimes {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, n: usize) -> f64 {
        self.0[n]
    }

    /// Total duration `T_0`.
    pub fn horizon(&self) -> f64 {
        self.0[0]
    }

    /// `T_{n-1} / T_n` for `n = 1..N-1`, the quantity compared against 2.
    pub fn ratios(&self) -> Vec<f64> {
        let n = self.0.len() - 1;
        (1..n).map(|k| self.0[k - 1] / self.0[k]).collect()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Backward cumulative sum of the ratio terms; no validation.
pub(crate) fn times_of(values: &[f64]) -> Vec<f64> {
    let order = values.len() - 1;
    let mut times = vec![0.0; order + 1];
    for n in (0..order).rev() {
        times[n] = times[n + 1] + values[n] / values[n + 1];
    }
    times
}

pub fn achievement_times<P: Peaks + ?Sized>(peaks: &P) -> AchievementTimes {
    AchievementTimes(times_of(peaks.values()))
}

/// Achievement times straight from raw values, rejecting nonpositive entries.
pub fn achievement_times_of(values: &[f64]) -> Result<AchievementTimes> {
    check_positive_entries("peak x", values)?;
    if values.len() < 2 {
        return Err(Error::LengthMismatch {
            what: "peak vector",
            expected: 2,
            got: values.len(),
        });
    }
    Ok(AchievementTimes(times_of(values)))
}

/// Relation between `T_n` and `2 T_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryStatus {
    /// `T_n = 2 T_{n+1}`: order `n + 1` has no cruising phase.
    OnBoundary,
    /// `T_n > 2 T_{n+1}`: order `n + 1` cruises at its peak.
    Interior,
    /// `T_n < 2 T_{n+1}`: no symmetric trajectory has these peaks.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    statuses: Vec<BoundaryStatus>,
    times: Vec<f64>,
}

impl FeasibilityReport {
    /// Status for each `n` in `0..=N-2`.
    pub fn statuses(&self) -> &[BoundaryStatus] {
        &self.statuses
    }

    pub fn status(&self, n: usize) -> BoundaryStatus {
        self.statuses[n]
    }

    pub fn is_feasible(&self) -> bool {
        self.first_infeasible().is_none()
    }

    pub fn first_infeasible(&self) -> Option<usize> {
        self.statuses
            .iter()
            .position(|s| *s == BoundaryStatus::Infeasible)
    }

    /// Derivative orders that hold their peak for a positive time.
    pub fn cruising_orders(&self) -> Vec<usize> {
        self.statuses
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == BoundaryStatus::Interior)
            .map(|(n, _)| n + 1)
            .collect()
    }

    /// Number of positive-duration phases, `None` when infeasible.
    ///
    /// A cruise of order `n` is repeated `2^(n-1)` times in the top-order
    /// pattern, on top of the `2^(N-1)` pulses.
    pub fn phase_count(&self) -> Option<usize> {
        if !self.is_feasible() {
            return None;
        }
        let order = self.statuses.len() + 1;
        let cruises: usize = self.cruising_orders().iter().map(|n| 1 << (n - 1)).sum();
        Some((1 << (order - 1)) + cruises)
    }

    pub(crate) fn error(&self) -> Option<Error> {
        self.first_infeasible().map(|index| Error::Infeasible {
            index,
            lhs: self.times[index],
            rhs: 2.0 * self.times[index + 1],
        })
    }
}

pub fn classify_feasibility<P: Peaks + ?Sized>(peaks: &P) -> FeasibilityReport {
    let times = times_of(peaks.values());
    let order = times.len() - 1;
    let statuses = (0..order.saturating_sub(1))
        .map(|n| classify_pair(times[n], times[n + 1]))
        .collect();
    FeasibilityReport { statuses, times }
}

fn classify_pair(t: f64, next: f64) -> BoundaryStatus {
    let gap = t - 2.0 * next;
    if gap.abs() <= BOUNDARY_TOL * t {
        BoundaryStatus::OnBoundary
    } else if gap > 0.0 {
        BoundaryStatus::Interior
    } else {
        BoundaryStatus::Infeasible
    }
}
