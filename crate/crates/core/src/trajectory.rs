//! Explicit pre-optimal trajectories.
//!
//! The top derivative is a sequence of `+c`, `0` and `-c` segments built by
//! pulse doubling: starting from a single `+c` pulse of length `t_0`, level
//! `k + 1` is level `k`, a zero gap of length `t_{k+1} - 2 t_k`, and level
//! `k` negated. After `N - 1` doublings the sequence has `2^N - 1` entries of
//! which `2^(N-1)` are pulses. The structural times are the achievement
//! times read from the top: `t_k = T_{N-1-k}`.
//!
//! The lower orders are exact polynomials obtained by integrating segment
//! by segment, so evaluation is exact up to round-off.

use std::fmt::Write as _;

use crate::error::{check_positive, Error, Result};
use crate::kinematics::{classify_feasibility, times_of, PeakVector, Peaks, BOUNDARY_TOL};

/// Value of the top derivative on one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
            Sign::Positive => 1.0,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment {
    pub duration: f64,
    pub sign: Sign,
}

/// Top-derivative pattern of a pre-optimal trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    magnitude: f64,
    segments: Vec<PulseSegment>,
    structural_times: Vec<f64>,
    /// For each segment boundary, the largest `j` such that it starts or
    /// ends a copy of the level-`j` pattern.
    boundary_levels: Vec<usize>,
}

/// Gaps this close to zero, relative to the horizon, are exact zeros.
const GAP_CLAMP: f64 = 1e-12;

impl PulseSchedule {
    /// Builds the pattern from `t_0..t_{N-1}` with `t_0 > 0` and
    /// `t_{k+1} >= 2 t_k`.
    pub fn from_structural_times(times: &[f64], magnitude: f64) -> Result<Self> {
        let horizon = *times.last().ok_or(Error::LengthMismatch {
            what: "structural times",
            expected: 1,
            got: 0,
        })?;
        let tol = vec![GAP_CLAMP * horizon; times.len().saturating_sub(1)];
        Self::build(times, magnitude, &tol)
    }

    fn build(times: &[f64], magnitude: f64, tol: &[f64]) -> Result<Self> {
        check_positive("pulse magnitude", magnitude)?;
        crate::kinematics::check_order(times.len())?;
        check_positive("t0", times[0])?;
        let order = times.len();
        let mut segments = vec![PulseSegment {
            duration: times[0],
            sign: Sign::Positive,
        }];
        let mut levels = vec![0, 0];
        for k in 0..order - 1 {
            let inner = &levels[1..levels.len() - 1];
            let mut next = vec![k + 1];
            next.extend_from_slice(inner);
            next.extend([k, k]);
            next.extend_from_slice(inner);
            next.push(k + 1);
            levels = next;
            let mut gap = times[k + 1] - 2.0 * times[k];
            if gap.abs() <= tol[k] {
                gap = 0.0;
            } else if gap < 0.0 {
                // t_{k+1} = T_{N-2-k}, t_k = T_{N-1-k}
                return Err(Error::Infeasible {
                    index: order - 2 - k,
                    lhs: times[k + 1],
                    rhs: 2.0 * times[k],
                });
            }
            let mirrored: Vec<PulseSegment> = segments
                .iter()
                .map(|s| PulseSegment {
                    duration: s.duration,
                    sign: s.sign.negate(),
                })
                .collect();
            segments.push(PulseSegment {
                duration: gap,
                sign: Sign::Zero,
            });
            segments.extend(mirrored);
        }
        Ok(Self {
            magnitude,
            segments,
            structural_times: times.to_vec(),
            boundary_levels: levels,
        })
    }

    pub fn order(&self) -> usize {
        self.structural_times.len()
    }

    /// The constant `c` with top derivative in `{-c, 0, c}`.
    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    /// `t_0..t_{N-1}`.
    pub fn structural_times(&self) -> &[f64] {
        &self.structural_times
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn pulse_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| s.sign != Sign::Zero)
            .count()
    }

    /// Segments with positive duration.
    pub fn phase_count(&self) -> usize {
        self.segments.iter().filter(|s| s.duration > 0.0).count()
    }

    /// Length of one cruising phase of derivative order `n` (`1 <= n < N`).
    pub fn cruise_duration(&self, n: usize) -> f64 {
        let order = self.order();
        assert!((1..order).contains(&n), "cruise order {n} out of range");
        // the gap for order n is inserted at doubling step N-1-n
        let k = order - 1 - n;
        let t = &self.structural_times;
        (t[k + 1] - 2.0 * t[k]).max(0.0)
    }
}

/// Pulse pattern realizing the given peaks.
pub fn pulse_schedule(peaks: &PeakVector) -> Result<PulseSchedule> {
    if let Some(err) = classify_feasibility(peaks).error() {
        return Err(err);
    }
    let order = peaks.order();
    let times = times_of(peaks.values());
    let structural: Vec<f64> = (0..order).map(|k| times[order - 1 - k]).collect();
    // gaps that classify as on-boundary are zeroed
    let tol: Vec<f64> = (0..order - 1)
        .map(|k| BOUNDARY_TOL * times[order - 2 - k])
        .collect();
    PulseSchedule::build(&structural, peaks.top(), &tol)
}

/// Piecewise-polynomial trajectory with exact coefficients.
///
/// Segment `k` covers `[τ_k, τ_{k+1}]` and stores the derivatives
/// `x^(0)..x^(N)` at `τ_k`. Within the segment
/// `x^(n)(τ_k + h) = Σ_m x^(n+m)(τ_k) h^m / m!`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryProfile {
    order: usize,
    breakpoints: Vec<f64>,
    states: Vec<f64>,
}

/// One row of sampled output: time and `x^(0)..x^(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub values: Vec<f64>,
}

pub fn build_profile(schedule: &PulseSchedule) -> TrajectoryProfile {
    let order = schedule.order();
    let width = order + 1;
    let mut breakpoints = vec![0.0];
    let mut states = Vec::new();
    let mut state = vec![0.0; width];
    let mut t = 0.0;
    let mut level = 0;
    for (k, seg) in schedule.segments().iter().enumerate() {
        level = level.max(schedule.boundary_levels[k]);
        if seg.duration <= 0.0 {
            continue;
        }
        // orders N-1..N-j vanish on every boundary of a level-j copy
        for value in &mut state[order - level..order] {
            *value = 0.0;
        }
        level = 0;
        state[order] = seg.sign.value() * schedule.magnitude();
        states.extend_from_slice(&state);
        state = advance(&state, seg.duration);
        t += seg.duration;
        breakpoints.push(t);
    }
    TrajectoryProfile {
        order,
        breakpoints,
        states,
    }
}

/// Taylor shift of a derivative state by `h`.
fn advance(state: &[f64], h: f64) -> Vec<f64> {
    let order = state.len() - 1;
    (0..=order).map(|n| taylor(state, n, h)).collect()
}

/// `x^(n)(h)` from the derivative state at `h = 0`, by Horner.
fn taylor(state: &[f64], n: usize, h: f64) -> f64 {
    let order = state.len() - 1;
    let mut acc = state[order];
    for m in (0..order - n).rev() {
        acc = state[n + m] + acc * h / (m + 1) as f64;
    }
    acc
}

impl TrajectoryProfile {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn horizon(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    /// `0 = τ_0 < ... < τ_K = T_0`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segment_count(&self) -> usize {
        self.breakpoints.len() - 1
    }

    fn state(&self, k: usize) -> &[f64] {
        let w = self.order + 1;
        &self.states[k * w..(k + 1) * w]
    }

    /// Coefficients of `x^(n)` on segment `k` in powers of local time.
    pub fn coefficients(&self, segment: usize, n: usize) -> Vec<f64> {
        let state = self.state(segment);
        let mut factorial = 1.0;
        (0..=self.order - n)
            .map(|m| {
                if m > 0 {
                    factorial *= m as f64;
                }
                state[n + m] / factorial
            })
            .collect()
    }

    fn locate(&self, t: f64) -> usize {
        let starts = &self.breakpoints[..self.breakpoints.len() - 1];
        starts.partition_point(|&tau| tau <= t).saturating_sub(1)
    }

    /// `x^(n)(t)`. The top order is right-continuous; at `T_0` the last
    /// segment's value is returned.
    pub fn evaluate(&self, t: f64, n: usize) -> Result<f64> {
        if n > self.order {
            return Err(Error::DerivativeOrder {
                requested: n,
                order: self.order,
            });
        }
        if !(0.0..=self.horizon()).contains(&t) {
            return Err(Error::OutOfRange {
                t,
                horizon: self.horizon(),
            });
        }
        let k = self.locate(t);
        Ok(taylor(self.state(k), n, t - self.breakpoints[k]))
    }

    /// All orders at once.
    pub fn evaluate_all(&self, t: f64) -> Result<Vec<f64>> {
        self.evaluate(t, 0)?;
        let k = self.locate(t);
        let h = t - self.breakpoints[k];
        let state = self.state(k);
        Ok((0..=self.order).map(|n| taylor(state, n, h)).collect())
    }

    /// Largest `|x^(n)|` over breakpoints and segment midpoints.
    ///
    /// Between breakpoints each order is monotone or identically zero, so
    /// this is the true maximum for profiles built from a pulse schedule.
    pub fn measured_peaks(&self) -> Vec<f64> {
        let mut peaks = vec![0.0f64; self.order + 1];
        let mut probe = |t: f64| {
            let values = self.evaluate_all(t).expect("probe inside the horizon");
            for (p, v) in peaks.iter_mut().zip(values) {
                *p = p.max(v.abs());
            }
        };
        for w in self.breakpoints.windows(2) {
            probe(w[0]);
            probe(0.5 * (w[0] + w[1]));
        }
        probe(self.horizon());
        peaks
    }

    /// Maximal open intervals on which `x^(n)` does not vanish.
    pub fn supporting_intervals(&self, n: usize) -> Vec<(f64, f64)> {
        let scale = self.measured_peaks()[n];
        let eps = 1e-9 * scale;
        let zero_at = |t: f64| self.evaluate(t, n).map(|v| v.abs() <= eps).unwrap_or(true);
        let mut intervals = Vec::new();
        let mut start: Option<f64> = None;
        let mut previous = 0.0;
        for w in self.breakpoints.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let mid = self.evaluate(0.5 * (a + b), n).unwrap_or(0.0);
            let live = mid.abs() > eps;
            let sign_change = mid * previous < 0.0;
            previous = mid;
            match (start, live) {
                (None, true) => start = Some(a),
                (Some(s), true) => {
                    // for the top order a sign change also ends a support
                    let split = zero_at(a) || (n == self.order && sign_change);
                    if split {
                        intervals.push((s, a));
                        start = Some(a);
                    }
                }
                (Some(s), false) => {
                    intervals.push((s, a));
                    start = None;
                }
                (None, false) => {}
            }
        }
        if let Some(s) = start {
            intervals.push((s, self.horizon()));
        }
        intervals
    }

    /// Copy with every derivative multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            order: self.order,
            breakpoints: self.breakpoints.clone(),
            states: self.states.iter().map(|v| v * factor).collect(),
        }
    }

    fn sample_at(&self, times: &[f64]) -> Vec<Sample> {
        times
            .iter()
            .map(|&t| Sample {
                t,
                values: self
                    .evaluate_all(t)
                    .expect("sample time inside the horizon"),
            })
            .collect()
    }

    fn grid(&self, step: f64) -> Result<Vec<f64>> {
        check_positive("sample step", step)?;
        let horizon = self.horizon();
        let tol = 1e-12 * horizon;
        let mut times = Vec::new();
        let mut i = 0u64;
        loop {
            let t = i as f64 * step;
            if t >= horizon - tol {
                break;
            }
            times.push(t);
            i += 1;
        }
        times.push(horizon);
        Ok(times)
    }

    /// Samples at `0, step, 2 step, ...` and exactly at `T_0`.
    pub fn sample(&self, step: f64) -> Result<Vec<Sample>> {
        Ok(self.sample_at(&self.grid(step)?))
    }

    /// Like [`sample`](Self::sample), with every breakpoint added.
    pub fn sample_with_breakpoints(&self, step: f64) -> Result<Vec<Sample>> {
        let tol = 1e-12 * self.horizon();
        let mut times = self.grid(step)?;
        times.extend_from_slice(&self.breakpoints);
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| (*a - *b).abs() <= tol);
        // dedup keeps the earlier entry; pin the end exactly
        if let Some(last) = times.last_mut() {
            *last = self.horizon();
        }
        Ok(self.sample_at(&times))
    }
}

/// CSV with header `t,x0,...,xN`, floats in shortest round-trip form.
pub fn samples_to_csv(samples: &[Sample], order: usize) -> String {
    let mut out = String::from("t");
    for n in 0..=order {
        write!(out, ",x{n}").unwrap();
    }
    out.push('\n');
    for s in samples {
        write!(out, "{}", s.t).unwrap();
        for v in &s.values {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses [`samples_to_csv`] output; returns the order and the rows.
pub fn samples_from_csv(text: &str) -> Result<(usize, Vec<Sample>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Invalid("empty CSV".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    if columns.len() < 3 || columns[0] != "t" {
        return Err(Error::Invalid(format!("unexpected CSV header `{header}`")));
    }
    for (n, c) in columns[1..].iter().enumerate() {
        if *c != format!("x{n}") {
            return Err(Error::Invalid(format!(
                "CSV column {} should be x{n}, found `{c}`",
                n + 2
            )));
        }
    }
    let order = columns.len() - 2;
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Invalid(format!("CSV row {}: {e}", i + 2)))?;
        if fields.len() != columns.len() {
            return Err(Error::Invalid(format!(
                "CSV row {} has {} fields, expected {}",
                i + 2,
                fields.len(),
                columns.len()
            )));
        }
        samples.push(Sample {
            t: fields[0],
            values: fields[1..].to_vec(),
        });
    }
    Ok((order, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::achievement_times;

    fn signs(s: &PulseSchedule) -> Vec<i32> {
        s.segments().iter().map(|p| p.sign.value() as i32).collect()
    }

    #[test]
    fn triangular_acceleration_pattern() {
        let (v, a) = (2.0, 0.5);
        let schedule = pulse_schedule(&PeakVector::new(vec![v * v / a, v, a]).unwrap()).unwrap();
        assert_eq!(signs(&schedule), vec![1, 0, -1]);
        assert_eq!(schedule.segments()[1].duration, 0.0);
        assert_eq!(schedule.phase_count(), 2);
    }

    #[test]
    fn seven_phase_jerk_pattern() {
        let peaks = PeakVector::new(vec![10.0, 0.5, 0.3, 1.0]).unwrap();
        let schedule = pulse_schedule(&peaks).unwrap();
        assert_eq!(signs(&schedule), vec![1, 0, -1, 0, -1, 0, 1]);
        assert!(schedule.segments().iter().all(|s| s.duration > 0.0));
        assert_eq!(schedule.phase_count(), 7);
        let t = achievement_times(&peaks);
        assert!((schedule.total_duration() - t.horizon()).abs() < 1e-12 * t.horizon());
        // middle gap is the velocity cruise
        assert!((schedule.segments()[3].duration - schedule.cruise_duration(1)).abs() < 1e-15);
    }

    #[test]
    fn infeasible_peaks_are_rejected() {
        let err = pulse_schedule(&PeakVector::new(vec![1.0, 0.1, 0.6, 1.0]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Infeasible { index: 1, .. }));
        let err = PulseSchedule::from_structural_times(&[1.0, 1.5], 1.0).unwrap_err();
        assert!(matches!(err, Error::Infeasible { index: 0, .. }));
    }

    #[test]
    fn round_off_gaps_are_clamped() {
        let s = PulseSchedule::from_structural_times(&[1.0, 2.0 - 1e-15, 4.0], 1.0).unwrap();
        assert!(s.segments().iter().all(|p| p.duration >= 0.0));
    }

    #[test]
    fn four_phase_segment_matches_closed_form() {
        // N = 3 with no cruise: t_1 = a/j, T = 4 t_1
        let (j, t1) = (0.7, 1.3);
        let a = j * t1;
        let v = a * t1;
        let s = 2.0 * (v * t1 + a * t1 * t1) / 2.0;
        let schedule = PulseSchedule::from_structural_times(&[t1, 2.0 * t1, 4.0 * t1], j).unwrap();
        let profile = build_profile(&schedule);
        for i in 0..=10 {
            let t = t1 + t1 * i as f64 / 10.0;
            let d = t - t1;
            let expected =
                j * t1.powi(3) / 6.0 + 0.5 * v * d + 0.5 * a * d * d - j * d.powi(3) / 6.0;
            assert!((profile.evaluate(t, 0).unwrap() - expected).abs() < 1e-12);
        }
        assert!((profile.evaluate(profile.horizon(), 0).unwrap() - s).abs() < 1e-12);
    }

    #[test]
    fn uniform_motion_profile() {
        let schedule = pulse_schedule(&PeakVector::new(vec![10.0, 2.0]).unwrap()).unwrap();
        let profile = build_profile(&schedule);
        assert_eq!(profile.segment_count(), 1);
        assert_eq!(profile.horizon(), 5.0);
        assert_eq!(profile.evaluate(2.5, 0).unwrap(), 5.0);
        assert_eq!(profile.coefficients(0, 0), vec![0.0, 2.0]);
    }

    #[test]
    fn trapezoid_covers_distance() {
        let (s, v, a) = (9.0, 2.0, 1.0);
        let profile =
            build_profile(&pulse_schedule(&PeakVector::new(vec![s, v, a]).unwrap()).unwrap());
        let t1 = v / a;
        let horizon = profile.horizon();
        assert!((v * (horizon - t1) - s).abs() < 1e-12);
        assert!((profile.evaluate(horizon, 0).unwrap() - s).abs() < 1e-12);
    }

    #[test]
    fn six_phase_distance_and_midpoint() {
        // acceleration cruises, velocity does not
        let (j, t_jerk, gap) = (1.0, 0.5, 0.8);
        let t_acc = 2.0 * t_jerk + gap;
        let schedule =
            PulseSchedule::from_structural_times(&[t_jerk, t_acc, 2.0 * t_acc], j).unwrap();
        assert_eq!(schedule.phase_count(), 6);
        let profile = build_profile(&schedule);
        let v = j * t_jerk * (t_acc - t_jerk);
        let s = v * t_acc;
        let end = profile.evaluate(profile.horizon(), 0).unwrap();
        assert!((end - s).abs() < 1e-12, "{end} vs {s}");
        let half = profile.evaluate(profile.horizon() / 2.0, 0).unwrap();
        assert!((half - s / 2.0).abs() < 1e-12);
        assert!((profile.evaluate(t_acc, 1).unwrap() - v).abs() < 1e-12);
    }

    #[test]
    fn evaluate_rejects_bad_arguments() {
        let profile =
            build_profile(&PulseSchedule::from_structural_times(&[1.0, 2.0], 1.0).unwrap());
        assert!(matches!(
            profile.evaluate(-0.1, 0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            profile.evaluate(2.1, 0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            profile.evaluate(1.0, 3),
            Err(Error::DerivativeOrder { .. })
        ));
        // right-continuous top order at the switch
        assert_eq!(profile.evaluate(1.0, 2).unwrap(), -1.0);
        assert_eq!(profile.evaluate(2.0, 2).unwrap(), -1.0);
        assert_eq!(profile.evaluate(0.0, 2).unwrap(), 1.0);
    }

    #[test]
    fn coarse_sampling_gives_endpoints() {
        let profile =
            build_profile(&PulseSchedule::from_structural_times(&[1.0, 3.0], 2.0).unwrap());
        let samples = profile.sample(10.0).unwrap();
        assert_eq!(samples.len(), 2);
        assert_eq!(samples[0].t, 0.0);
        assert_eq!(samples[1].t, profile.horizon());
        let with_breaks = profile.sample_with_breakpoints(10.0).unwrap();
        let times: Vec<f64> = with_breaks.iter().map(|s| s.t).collect();
        assert_eq!(times, profile.breakpoints());
        assert!(profile.sample(0.0).is_err());
        let fine = profile.sample(0.25).unwrap();
        assert_eq!(fine.len(), 13);
    }

    #[test]
    fn csv_round_trip() {
        let profile =
            build_profile(&PulseSchedule::from_structural_times(&[0.3, 0.7, 1.9], 1.7).unwrap());
        let samples = profile.sample_with_breakpoints(0.1).unwrap();
        let text = samples_to_csv(&samples, 3);
        assert!(text.starts_with("t,x0,x1,x2,x3\n"));
        let (order, back) = samples_from_csv(&text).unwrap();
        assert_eq!(order, 3);
        assert_eq!(back, samples);
        assert!(samples_from_csv("t,x1\n").is_err());
        assert!(samples_from_csv("t,x0,x1\n1,2\n").is_err());
    }

    #[test]
    fn supporting_intervals_of_seven_phase() {
        let schedule = PulseSchedule::from_structural_times(&[0.5, 1.5, 4.0], 1.0).unwrap();
        let profile = build_profile(&schedule);
        let horizon = profile.horizon();
        assert_eq!(profile.supporting_intervals(1), vec![(0.0, horizon)]);
        let acc = profile.supporting_intervals(2);
        assert_eq!(acc.len(), 2);
        assert!((acc[0].1 - 1.5).abs() < 1e-12);
        assert!((acc[1].0 - (horizon - 1.5)).abs() < 1e-12);
        assert_eq!(profile.supporting_intervals(3).len(), 4);
    }
}
