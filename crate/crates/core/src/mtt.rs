//! Minimum-time planning.
//!
//! In dimensionless coordinates the minimum-time peaks satisfy, for every
//! interior index, either `ẑ_n = ŵ_n` or `T_{n-1}(ẑ) = 2 T_n(ẑ)`. Without
//! bounds all boundary equations hold at once and the solution is the
//! closed-form global minimum.
//!
//! The solver clamps the global minimum against the bounds, reads off the
//! indices whose boundary condition is violated by the clamped vector, and
//! solves the boundary equations for every index that is not held at its
//! bound. A short pin/release loop then fixes the few cases where the
//! initial guess of held indices is wrong.

use log::{debug, warn};

use crate::error::{check_positive, Error, Result};
use crate::kinematics::{
    achievement_times, check_order, classify_feasibility, times_of, AchievementTimes, MotionSpec,
    PeakVector, Peaks,
};
use crate::residual::solve_boundary_equations;
use crate::scaling::{from_dimensionless, to_dimensionless, DimensionlessPeaks, Scale};
use crate::trajectory::{build_profile, pulse_schedule, PulseSchedule, TrajectoryProfile};

/// Relative slack when deciding that a peak sits on its bound.
pub const ACTIVE_TOL: f64 = 1e-9;
const STRICT: f64 = 1e-12;
const RELEASE_TOL: f64 = 1e-10;

/// Unbounded minimum of the dimensionless horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMinimum {
    peaks: DimensionlessPeaks,
    horizon: f64,
}

impl GlobalMinimum {
    pub fn order(&self) -> usize {
        self.peaks.order()
    }

    /// `(1, x̂⋆_1, ..., x̂⋆_{N-1}, 1)`.
    pub fn peaks(&self) -> &DimensionlessPeaks {
        &self.peaks
    }

    /// `T̂⋆_0`.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// `x̂⋆_n = 2^((n/2)(2/N - N + n))` for `0 < n < N`.
pub fn global_minimum(order: usize) -> Result<GlobalMinimum> {
    if order < 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    check_order(order)?;
    Ok(GlobalMinimum {
        peaks: DimensionlessPeaks::from_raw(star_values(order)),
        horizon: star_horizon(order),
    })
}

pub(crate) fn star_values(order: usize) -> Vec<f64> {
    let big = order as f64;
    (0..=order)
        .map(|n| {
            if n == 0 || n == order {
                1.0
            } else {
                let k = n as f64;
                (0.5 * k * (2.0 / big - big + k)).exp2()
            }
        })
        .collect()
}

pub(crate) fn star_horizon(order: usize) -> f64 {
    let big = order as f64;
    ((big - 1.0) * (big + 2.0) / (2.0 * big)).exp2()
}

/// `û_n = min(ŵ_n, x̂⋆_n)`.
pub fn clamp_candidates(spec: &MotionSpec) -> DimensionlessPeaks {
    let w_hat = to_dimensionless(&spec.bound_vector());
    DimensionlessPeaks::from_raw(clamp_values(w_hat.values()))
}

fn clamp_values(w: &[f64]) -> Vec<f64> {
    let order = w.len() - 1;
    let star = star_values(order);
    (0..=order)
        .map(|n| {
            if n == 0 || n == order {
                1.0
            } else {
                w[n].min(star[n])
            }
        })
        .collect()
}

/// Indices `n` in `1..N` with `T_{n-1}(û) < 2 T_n(û)`.
///
/// The comparison is strict with a relative margin of `1e-12`, so ratios
/// that equal 2 up to round-off are left out.
pub fn active_set(u_hat: &DimensionlessPeaks) -> Vec<usize> {
    ratio_set(u_hat.values())
}

fn ratio_set(u: &[f64]) -> Vec<usize> {
    let t = times_of(u);
    (1..u.len() - 1)
        .filter(|&n| t[n - 1] < 2.0 * t[n] * (1.0 - STRICT))
        .collect()
}

/// Solves the boundary equations of `boundary` with every other entry of
/// `pinned` held fixed. An empty set returns the input.
pub fn solve_residual_system(
    boundary: &[usize],
    pinned: &DimensionlessPeaks,
) -> Result<DimensionlessPeaks> {
    let z = solve_boundary_equations(pinned.values(), boundary)?;
    Ok(DimensionlessPeaks::from_raw(z))
}

/// Dimensionless minimum-time solution of one block.
#[derive(Debug, Clone)]
pub(crate) struct Block {
    pub z: Vec<f64>,
    pub held: Vec<bool>,
    pub ratio_set: Vec<usize>,
    pub rounds: usize,
}

/// Minimizes `T̂_0` over `0 < ẑ_n <= w[n]` with `ẑ_0 = ẑ_K = 1`.
pub(crate) fn solve_block(w: &[f64], warm: Option<&[f64]>) -> Result<Block> {
    let order = w.len() - 1;
    let star = star_values(order);
    let u = clamp_values(w);
    let ratio_set = ratio_set(&u);
    let held: Vec<bool> = (0..=order)
        .map(|n| n > 0 && n < order && w[n] < star[n] && !ratio_set.contains(&n))
        .collect();
    let mut guess: Vec<f64> = match warm {
        Some(g) => g.iter().zip(w).map(|(g, w)| g.min(*w)).collect(),
        None => u.clone(),
    };
    guess[0] = 1.0;
    guess[order] = 1.0;
    let vars: Vec<usize> = (1..order).collect();
    let (z, held, rounds) = repair(w, &vars, held, guess, &u)?;
    Ok(Block {
        z,
        held,
        ratio_set,
        rounds,
    })
}

/// Pin/release iteration over the entries `vars` of `guess`.
///
/// Entries outside `vars` are taken from `guess` and never change. Each
/// round solves the boundary equations of the free entries, then either
/// pins the free entry furthest above its bound or releases the held entry
/// whose boundary condition is most violated.
pub(crate) fn repair(
    w: &[f64],
    vars: &[usize],
    mut held: Vec<bool>,
    mut guess: Vec<f64>,
    fallback: &[f64],
) -> Result<(Vec<f64>, Vec<bool>, usize)> {
    let max_rounds = 4 * w.len() + 4;
    for round in 0..max_rounds {
        let z = solve_with_held(w, vars, &held, &guess, fallback)?;
        let over = vars
            .iter()
            .copied()
            .filter(|&n| !held[n] && z[n] > w[n] * (1.0 + STRICT))
            .max_by(|&a, &b| (z[a] / w[a]).total_cmp(&(z[b] / w[b])));
        if let Some(n) = over {
            debug!("pinning index {n}: {} exceeds bound {}", z[n], w[n]);
            held[n] = true;
            guess = z;
            continue;
        }
        let t = times_of(&z);
        let infeasible = vars
            .iter()
            .copied()
            .filter(|&n| held[n] && t[n - 1] - 2.0 * t[n] < -RELEASE_TOL * t[n - 1])
            .min_by(|&a, &b| (t[a - 1] / t[a]).total_cmp(&(t[b - 1] / t[b])));
        if let Some(n) = infeasible {
            debug!(
                "releasing index {n}: T{} / T{n} = {}",
                n - 1,
                t[n - 1] / t[n]
            );
            held[n] = false;
            guess = z;
            continue;
        }
        if round > 0 {
            debug!("active set settled after {round} repair rounds");
        }
        let mut z = z;
        for &n in vars {
            z[n] = z[n].min(w[n]);
        }
        return Ok((z, held, round));
    }
    warn!("active-set repair did not settle for bounds {w:?}");
    Err(Error::RepairLimit {
        rounds: max_rounds,
        detail: format!("bounds {w:?}"),
    })
}

fn solve_with_held(
    w: &[f64],
    vars: &[usize],
    held: &[bool],
    guess: &[f64],
    fallback: &[f64],
) -> Result<Vec<f64>> {
    let free: Vec<usize> = vars.iter().copied().filter(|&n| !held[n]).collect();
    let start = |base: &[f64]| -> Vec<f64> {
        let mut x = guess.to_vec();
        for &n in vars {
            x[n] = if held[n] { w[n] } else { base[n] };
        }
        x
    };
    match solve_boundary_equations(&start(guess), &free) {
        Ok(z) => Ok(z),
        Err(err) if guess != fallback => {
            debug!("retrying from the fallback start after {err}");
            solve_boundary_equations(&start(fallback), &free)
        }
        Err(err) => Err(err),
    }
}

/// Minimum-time result.
#[derive(Debug, Clone, PartialEq)]
pub struct MttSolution {
    peaks: PeakVector,
    dimensionless: DimensionlessPeaks,
    times: AchievementTimes,
    active_bounds: Vec<usize>,
    schedule: PulseSchedule,
}

impl MttSolution {
    pub(crate) fn from_peaks(
        peaks: PeakVector,
        dimensionless: DimensionlessPeaks,
        bounds: &[f64],
    ) -> Result<Self> {
        let order = peaks.order();
        let active_bounds = (1..order)
            .filter(|&n| (peaks.get(n) - bounds[n - 1]).abs() <= ACTIVE_TOL * bounds[n - 1])
            .collect();
        let times = achievement_times(&peaks);
        let schedule = pulse_schedule(&peaks)?;
        Ok(Self {
            peaks,
            dimensionless,
            times,
            active_bounds,
            schedule,
        })
    }

    pub fn order(&self) -> usize {
        self.peaks.order()
    }

    /// Achieved peaks `(s, x_1, ..., x_N)`.
    pub fn peaks(&self) -> &PeakVector {
        &self.peaks
    }

    /// Same peaks in dimensionless coordinates.
    pub fn dimensionless(&self) -> &DimensionlessPeaks {
        &self.dimensionless
    }

    pub fn times(&self) -> &AchievementTimes {
        &self.times
    }

    /// Total duration `T_0`.
    pub fn horizon(&self) -> f64 {
        self.times.horizon()
    }

    pub fn dimensionless_horizon(&self) -> f64 {
        times_of(self.dimensionless.values())[0]
    }

    /// Interior orders `n` in `1..N` with `x_n = w_n`.
    pub fn active_bounds(&self) -> &[usize] {
        &self.active_bounds
    }

    pub fn schedule(&self) -> &PulseSchedule {
        &self.schedule
    }

    pub fn profile(&self) -> TrajectoryProfile {
        build_profile(&self.schedule)
    }
}

/// Every intermediate of a minimum-time solve.
#[derive(Debug, Clone, PartialEq)]
pub struct MttTrace {
    /// `ŵ`.
    pub w_hat: DimensionlessPeaks,
    /// `û`.
    pub u_hat: DimensionlessPeaks,
    /// `T_n(û)`.
    pub u_times: AchievementTimes,
    /// `T_{n-1}(û) / T_n(û)` for `n = 1..N-1`.
    pub ratios: Vec<f64>,
    /// Indices failing the ratio test at `û`.
    pub boundary_set: Vec<usize>,
    /// Indices held at their bound in the final solve.
    pub held: Vec<usize>,
    /// Pin/release rounds beyond the first solve.
    pub repair_rounds: usize,
    pub solution: MttSolution,
}

pub fn solve_mtt(spec: &MotionSpec) -> Result<MttSolution> {
    solve_mtt_traced(spec).map(|trace| trace.solution)
}

pub fn solve_mtt_traced(spec: &MotionSpec) -> Result<MttTrace> {
    let order = spec.order();
    let w_hat = to_dimensionless(&spec.bound_vector());
    if order == 1 {
        let peaks = PeakVector::new(vec![spec.distance(), spec.bound(1)])?;
        let ones = DimensionlessPeaks::from_raw(vec![1.0, 1.0]);
        let solution = MttSolution::from_peaks(peaks, ones.clone(), spec.bounds())?;
        return Ok(MttTrace {
            w_hat,
            u_hat: ones.clone(),
            u_times: achievement_times(&ones),
            ratios: Vec::new(),
            boundary_set: Vec::new(),
            held: Vec::new(),
            repair_rounds: 0,
            solution,
        });
    }
    let block = solve_block(w_hat.values(), None)?;
    let u_hat = clamp_candidates(spec);
    let u_times = achievement_times(&u_hat);
    let z_hat = DimensionlessPeaks::from_raw(block.z.clone());
    let solution = back_transform(spec, z_hat, &block.held)?;
    Ok(MttTrace {
        w_hat,
        ratios: u_times.ratios(),
        u_hat,
        u_times,
        boundary_set: block.ratio_set,
        held: (1..order).filter(|&n| block.held[n]).collect(),
        repair_rounds: block.rounds,
        solution,
    })
}

/// Physical solution from dimensionless peaks; held entries are set to
/// their bounds exactly.
pub(crate) fn back_transform(
    spec: &MotionSpec,
    z_hat: DimensionlessPeaks,
    held: &[bool],
) -> Result<MttSolution> {
    let top = spec.bound(spec.order());
    let mut values = from_dimensionless(&z_hat, spec.distance(), top)?.into_inner();
    for (n, h) in held.iter().enumerate() {
        if *h {
            values[n] = spec.bound(n);
        }
    }
    let peaks = PeakVector::new(values)?;
    let report = classify_feasibility(&peaks);
    if let Some(index) = report.first_infeasible() {
        warn!("solution infeasible at index {index}");
    }
    MttSolution::from_peaks(peaks, z_hat, spec.bounds())
}

/// Minimum dimensionless horizon of a problem whose distance and top order
/// are `head` and `tail`, under interior bounds `bounds`.
pub(crate) fn reduced_minimum(head: f64, bounds: &[f64], tail: f64) -> Result<(Vec<f64>, f64)> {
    check_positive("reduced distance", head)?;
    let order = bounds.len() + 1;
    let scale = Scale::new(head, tail, order)?;
    let mut w = vec![head];
    w.extend_from_slice(bounds);
    w.push(tail);
    let w_hat = scale.values_to_hat(&w);
    let block = solve_block(&w_hat, None)?;
    let mut x = scale.values_from_hat(&block.z);
    x[0] = head;
    x[order] = tail;
    for n in 1..order {
        if block.held[n] {
            x[n] = w[n];
        }
    }
    let horizon = times_of(&x)[0];
    Ok((x, horizon))
}
