//! Brute-force references for testing the solvers.
//!
//! Nothing here is fast. The grid searches scale as `grid^(N-1)` and are
//! limited to `N <= 4`.

use crate::error::{Error, Result};
use crate::kinematics::{times_of, MotionSpec};
use crate::mdt::MdtRequest;
use crate::scaling::{to_dimensionless, DimensionlessPeaks, Scale};
use crate::trajectory::{Sample, TrajectoryProfile};

/// Highest order accepted by the grid oracles.
pub const ORACLE_MAX_ORDER: usize = 4;
pub const MIN_GRID: usize = 32;
const REFINE_ROUNDS: usize = 3;
const REFINE_FACTOR: f64 = 8.0;
const REFINE_WINDOW: f64 = 2.0;
/// The log grid spans this many decades below its upper end.
const DECADES: f64 = 4.0;
const MDT_DENSIFY: usize = 16;
const FEASIBLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_peaks: DimensionlessPeaks,
    pub best_horizon: f64,
    pub evaluations: usize,
    /// Log spacing of the last refinement grid.
    pub spacing: f64,
}

fn feasible(z: &[f64]) -> bool {
    let t = times_of(z);
    (1..z.len() - 1).all(|n| t[n - 1] >= 2.0 * t[n] * (1.0 - FEASIBLE_SLACK))
}

fn check_grid(order: usize, grid: usize) -> Result<()> {
    if order > ORACLE_MAX_ORDER {
        return Err(Error::Invalid(format!(
            "oracle supports N <= {ORACLE_MAX_ORDER}, got {order}"
        )));
    }
    if grid < MIN_GRID {
        return Err(Error::Invalid(format!(
            "oracle grid must have at least {MIN_GRID} points, got {grid}"
        )));
    }
    Ok(())
}

/// Log-spaced axis per coordinate.
#[derive(Debug, Clone)]
struct Axis {
    ln_lo: f64,
    ln_hi: f64,
    points: usize,
}

impl Axis {
    fn spacing(&self) -> f64 {
        if self.points < 2 {
            0.0
        } else {
            (self.ln_hi - self.ln_lo) / (self.points - 1) as f64
        }
    }

    fn value(&self, i: usize) -> f64 {
        (self.ln_lo + i as f64 * self.spacing()).exp()
    }

    fn around(&self, center: f64, cap: f64) -> Axis {
        let h = self.spacing();
        let ln_c = center.ln();
        let ln_hi = (ln_c + REFINE_WINDOW * h).min(cap.ln());
        let ln_lo = ln_c - REFINE_WINDOW * h;
        let fine = h / REFINE_FACTOR;
        let points = ((ln_hi - ln_lo) / fine).round() as usize + 1;
        Axis {
            ln_lo,
            ln_hi,
            points: points.max(2),
        }
    }
}

/// Visits every grid point in lexicographic order.
fn for_each_point(axes: &[Axis], mut visit: impl FnMut(&[f64])) {
    let mut index = vec![0usize; axes.len()];
    let mut point: Vec<f64> = axes.iter().map(|a| a.value(0)).collect();
    loop {
        visit(&point);
        let mut d = axes.len();
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            index[d] += 1;
            if index[d] < axes[d].points {
                point[d] = axes[d].value(index[d]);
                break;
            }
            index[d] = 0;
            point[d] = axes[d].value(0);
        }
    }
}

/// Grid search for the minimum dimensionless horizon.
///
/// Coordinates `ẑ_1..ẑ_{N-1}` range over a log grid on
/// `[1e-4 c_n, c_n]` with `c_n = min(ŵ_n, 1)`, followed by three rounds of
/// refinement around the incumbent. Ties keep the lexicographically first
/// point.
pub fn oracle_mtt(spec: &MotionSpec, grid: usize) -> Result<OracleResult> {
    let order = spec.order();
    check_grid(order, grid)?;
    let w = to_dimensionless(&spec.bound_vector());
    if order == 1 {
        return Ok(OracleResult {
            best_peaks: w,
            best_horizon: 1.0,
            evaluations: 1,
            spacing: 0.0,
        });
    }
    let caps: Vec<f64> = (1..order).map(|n| w.get(n).min(1.0)).collect();
    let mut axes: Vec<Axis> = caps
        .iter()
        .map(|c| Axis {
            ln_lo: c.ln() - DECADES * std::f64::consts::LN_10,
            ln_hi: c.ln(),
            points: grid,
        })
        .collect();
    let mut evaluations = 0;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut z = vec![1.0; order + 1];
    for round in 0..=REFINE_ROUNDS {
        if round > 0 {
            let (_, incumbent) = best.as_ref().ok_or(Error::OracleEmpty)?;
            axes = axes
                .iter()
                .enumerate()
                .map(|(k, a)| a.around(incumbent[k + 1], caps[k]))
                .collect();
        }
        for_each_point(&axes, |p| {
            evaluations += 1;
            z[1..order].copy_from_slice(p);
            if !feasible(&z) {
                return;
            }
            let horizon = times_of(&z)[0];
            if best.as_ref().is_none_or(|(b, _)| horizon < *b) {
                best = Some((horizon, z.clone()));
            }
        });
        if best.is_none() {
            return Err(Error::OracleEmpty);
        }
    }
    let (best_horizon, best_z) = best.ok_or(Error::OracleEmpty)?;
    Ok(OracleResult {
        best_peaks: DimensionlessPeaks::from_raw(best_z),
        best_horizon,
        evaluations,
        spacing: axes.iter().map(Axis::spacing).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdtOracleResult {
    pub best_peaks: DimensionlessPeaks,
    /// Smallest `ẑ_M` found.
    pub best_target: f64,
    pub evaluations: usize,
    pub spacing: f64,
}

/// Grid search for the smallest `ẑ_M` with `T̂_0` equal to the requested
/// horizon.
///
/// One coordinate other than `M` is eliminated through the horizon
/// equation, which is quadratic in it; all others are gridded.
/// Grid search for the smallest `ẑ_M` meeting the horizon. Near the minimum
/// time the feasible set is a thin sliver, so an empty grid is retried at
/// up to `MDT_DENSIFY` times the density.
pub fn oracle_mdt(req: &MdtRequest, grid: usize) -> Result<MdtOracleResult> {
    check_grid(req.spec().order(), grid)?;
    let mut points = grid;
    loop {
        match mdt_grid(req, points) {
            Err(Error::OracleEmpty) if points < grid * MDT_DENSIFY => points *= 2,
            other => return other,
        }
    }
}

fn mdt_grid(req: &MdtRequest, grid: usize) -> Result<MdtOracleResult> {
    let spec = req.spec();
    let order = spec.order();
    let m = req.target_order();
    let w = to_dimensionless(&spec.bound_vector());
    let scale = Scale::new(spec.distance(), spec.bound(order), order)?;
    let target = scale.time_to_hat(req.horizon());
    let within = |z: &[f64]| (1..order).all(|n| z[n] <= w.get(n) * (1.0 + FEASIBLE_SLACK));

    if order == 2 {
        let mut best: Option<Vec<f64>> = None;
        for v in quadratic_roots(1.0, -target, 1.0) {
            let z = vec![1.0, v, 1.0];
            if v > 0.0 && within(&z) && feasible(&z) && best.as_ref().is_none_or(|b| v < b[1]) {
                best = Some(z);
            }
        }
        let z = best.ok_or(Error::OracleEmpty)?;
        return Ok(MdtOracleResult {
            best_target: z[1],
            best_peaks: DimensionlessPeaks::from_raw(z),
            evaluations: 2,
            spacing: 0.0,
        });
    }

    let e = if m == 1 { 2 } else { 1 };
    let gridded: Vec<usize> = (1..order).filter(|&n| n != e).collect();
    let caps: Vec<f64> = gridded.iter().map(|&n| w.get(n).min(2.0)).collect();
    let mut axes: Vec<Axis> = caps
        .iter()
        .map(|c| Axis {
            ln_lo: c.ln() - DECADES * std::f64::consts::LN_10,
            ln_hi: c.ln(),
            points: grid,
        })
        .collect();
    let mut evaluations = 0;
    let mut best: Option<Vec<f64>> = None;
    let mut z = vec![1.0; order + 1];
    let better = |cand: &[f64], best: &Option<Vec<f64>>| match best {
        None => true,
        Some(b) => cand[m] < b[m] || (cand[m] == b[m] && cand[m + 1] < b[m + 1]),
    };
    for round in 0..=REFINE_ROUNDS {
        if round > 0 {
            let incumbent = best.as_ref().ok_or(Error::OracleEmpty)?;
            axes = axes
                .iter()
                .enumerate()
                .map(|(k, a)| a.around(incumbent[gridded[k]], caps[k]))
                .collect();
        }
        for_each_point(&axes, |p| {
            evaluations += 1;
            for (k, &n) in gridded.iter().enumerate() {
                z[n] = p[k];
            }
            // T = rest + z_{e-1} / z_e + z_e / z_{e+1}
            let (below, above) = (z[e - 1], z[e + 1]);
            let rest: f64 = (0..order)
                .filter(|&k| k != e - 1 && k != e)
                .map(|k| z[k] / z[k + 1])
                .sum();
            for root in quadratic_roots(1.0, -above * (target - rest), below * above) {
                if root.is_nan() || root <= 0.0 {
                    continue;
                }
                z[e] = root;
                if within(&z) && feasible(&z) && better(&z, &best) {
                    best = Some(z.clone());
                }
            }
        });
        if best.is_none() {
            return Err(Error::OracleEmpty);
        }
    }
    let z = best.ok_or(Error::OracleEmpty)?;
    Ok(MdtOracleResult {
        best_target: z[m],
        best_peaks: DimensionlessPeaks::from_raw(z),
        evaluations,
        spacing: axes.iter().map(Axis::spacing).fold(0.0, f64::max),
    })
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = vec![q / a];
    if q != 0.0 {
        roots.push(c / q);
    }
    roots
}

/// Solves the boundary equations of the free entries by top-down shooting.
///
/// For a free index `n` the equation `T_{n-1} = 2 T_n` reads
/// `x_{n-1} = x_n T_n`, so a run of consecutive free indices is fixed by
/// its top entry, and the entry below the run must match. Runs are settled
/// from the top down by bisection in the logarithm of their top entry.
pub fn shooting_solve(values: &[f64], free: &[usize]) -> Result<Vec<f64>> {
    let order = values.len() - 1;
    let is_free = |n: usize| free.contains(&n);
    let mut x = values.to_vec();
    let mut top = order;
    while top > 1 {
        let b = top - 1;
        if !is_free(b) {
            top = b;
            continue;
        }
        let mut a = b;
        while a > 1 && is_free(a - 1) {
            a -= 1;
        }
        // mismatch of the entry below the run as a function of ln x_b
        let target = x[a - 1];
        let shoot = |ln_top: f64, x: &mut Vec<f64>| -> f64 {
            x[b] = ln_top.exp();
            let mut t_above = times_of(&x[b..])[0];
            for n in (a..=b).rev() {
                let below = x[n] * t_above;
                if n > a {
                    x[n - 1] = below;
                    t_above += below / x[n];
                } else {
                    return below.ln() - target.ln();
                }
            }
            unreachable!()
        };
        let (mut lo, mut hi) = (x[b].ln() - 1.0, x[b].ln() + 1.0);
        let mut expansions = 0;
        while shoot(lo, &mut x) > 0.0 {
            lo -= 2.0 * (hi - lo);
            expansions += 1;
            if expansions > 200 {
                return Err(Error::Invalid("shooting bracket not found".into()));
            }
        }
        while shoot(hi, &mut x) < 0.0 {
            hi += 2.0 * (hi - lo);
            expansions += 1;
            if expansions > 200 {
                return Err(Error::Invalid("shooting bracket not found".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if shoot(mid, &mut x) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        shoot(0.5 * (lo + hi), &mut x);
        top = a;
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `|x^(n)|` above its bound.
    Bound,
    /// Nonzero derivative at `t = 0`, or nonzero start position.
    Start,
    /// Nonzero derivative at the end.
    End,
    /// Final position differs from the distance.
    Distance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub order: usize,
    pub kind: ViolationKind,
    /// Relative size of the violation.
    pub magnitude: f64,
}

/// Result of a direct admissibility check.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// Largest sampled `|x^(n)|` for `n = 0..=N`.
    pub peaks: Vec<f64>,
    /// `max(0, peak_n / w_n - 1)` for `n = 1..=N`.
    pub excess: Vec<f64>,
    pub violations: Vec<Violation>,
    pub samples: usize,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn worst_excess(&self) -> f64 {
        self.excess.iter().fold(0.0, |m, v| m.max(*v))
    }
}

/// Relative tolerance of every admissibility check.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;
const DENSE_SAMPLES: usize = 10_000;

/// Dense sampling of a profile (10^4 points plus breakpoints), then
/// [`check_samples`].
pub fn oracle_admissibility(profile: &TrajectoryProfile, spec: &MotionSpec) -> AdmissibilityReport {
    let step = profile.horizon() / DENSE_SAMPLES as f64;
    match profile.sample_with_breakpoints(step) {
        Ok(samples) => check_samples(&samples, spec),
        Err(_) => AdmissibilityReport {
            peaks: Vec::new(),
            excess: Vec::new(),
            violations: vec![Violation {
                order: 0,
                kind: ViolationKind::Distance,
                magnitude: f64::INFINITY,
            }],
            samples: 0,
        },
    }
}

/// Checks rest-to-rest boundary values, the final distance and every bound
/// over a sequence of samples ordered in time.
pub fn check_samples(samples: &[Sample], spec: &MotionSpec) -> AdmissibilityReport {
    let order = spec.order();
    let mut violations = Vec::new();
    let mut peaks = vec![0.0f64; order + 1];
    let Some((first, last)) = samples.first().zip(samples.last()) else {
        return AdmissibilityReport {
            peaks,
            excess: vec![0.0; order],
            violations: vec![Violation {
                order: 0,
                kind: ViolationKind::Distance,
                magnitude: f64::INFINITY,
            }],
            samples: 0,
        };
    };
    if samples.iter().any(|s| s.values.len() != order + 1) {
        violations.push(Violation {
            order: 0,
            kind: ViolationKind::Bound,
            magnitude: f64::INFINITY,
        });
        return AdmissibilityReport {
            peaks,
            excess: vec![0.0; order],
            violations,
            samples: samples.len(),
        };
    }
    for s in samples {
        for (p, v) in peaks.iter_mut().zip(&s.values) {
            *p = p.max(v.abs());
        }
    }
    let s = spec.distance();
    let excess: Vec<f64> = (1..=order)
        .map(|n| (peaks[n] / spec.bound(n) - 1.0).max(0.0))
        .collect();
    for n in 1..=order {
        if excess[n - 1] > ADMISSIBILITY_TOL {
            violations.push(Violation {
                order: n,
                kind: ViolationKind::Bound,
                magnitude: excess[n - 1],
            });
        }
    }
    let scale = |n: usize| if n == 0 { s } else { spec.bound(n) };
    for n in 0..order {
        let start = first.values[n].abs() / scale(n);
        if start > ADMISSIBILITY_TOL {
            violations.push(Violation {
                order: n,
                kind: ViolationKind::Start,
                magnitude: start,
            });
        }
        if n > 0 {
            let end = last.values[n].abs() / scale(n);
            if end > ADMISSIBILITY_TOL {
                violations.push(Violation {
                    order: n,
                    kind: ViolationKind::End,
                    magnitude: end,
                });
            }
        }
    }
    let distance = (last.values[0] - s).abs() / s;
    if distance > ADMISSIBILITY_TOL {
        violations.push(Violation {
            order: 0,
            kind: ViolationKind::Distance,
            magnitude: distance,
        });
    }
    AdmissibilityReport {
        peaks,
        excess,
        violations,
        samples: samples.len(),
    }
}
