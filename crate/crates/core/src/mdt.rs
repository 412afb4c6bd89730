//! Minimum-derivative planning for a prescribed horizon.
//!
//! For a target order `M` the peak `x_M` is made as small as possible while
//! the move still finishes in the given time. With `x_M` fixed the problem
//! splits: orders above `M` form a reduced minimum-time problem whose
//! "distance" is `x_M`, and orders below `M` minimize the remaining time
//! with that tail fixed. The smallest `x_M` whose split minimum fits the
//! horizon is found by bisection in `ln x_M`, then polished by Newton on the
//! joint system with the horizon equation.

use log::{debug, warn};

use crate::error::{check_positive, Error, Result};
use crate::kinematics::{times_of, MotionSpec, Peaks};
use crate::mtt::{back_transform, reduced_minimum, repair, solve_mtt, MttSolution};
use crate::residual::{Equation, NewtonSystem};
use crate::scaling::{to_dimensionless, DimensionlessPeaks, Scale};

/// Relative bracket width at which bisection stops.
pub const BISECTION_TOL: f64 = 1e-10;
const HORIZON_TOL: f64 = 1e-9;
const COUPLING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MdtRequest {
    spec: MotionSpec,
    horizon: f64,
    target_order: usize,
}

impl MdtRequest {
    pub fn new(spec: MotionSpec, horizon: f64, target_order: usize) -> Result<Self> {
        check_positive("horizon", horizon)?;
        if target_order == 0 || target_order >= spec.order() {
            return Err(Error::TargetOrder {
                target: target_order,
                order: spec.order(),
            });
        }
        Ok(Self {
            spec,
            horizon,
            target_order,
        })
    }

    pub fn spec(&self) -> &MotionSpec {
        &self.spec
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn target_order(&self) -> usize {
        self.target_order
    }
}

/// Split solution at one trial value of `ẑ_M`.
#[derive(Debug, Clone)]
struct Trial {
    z: Vec<f64>,
    held: Vec<bool>,
    horizon: f64,
}

struct Split<'a> {
    w: &'a [f64],
    m: usize,
}

impl Split<'_> {
    fn order(&self) -> usize {
        self.w.len() - 1
    }

    /// Minimum `T̂_0` with `ẑ_M = x`, or `None` when the coupling
    /// condition at `M` fails.
    fn evaluate(&self, x: f64, warm: Option<&Trial>) -> Result<Option<Trial>> {
        let (order, m) = (self.order(), self.m);
        let (upper, _) = reduced_minimum(x, &self.w[m + 1..order], 1.0)?;
        let mut z = match warm {
            Some(t) => t.z.clone(),
            None => lower_guess(self.w, m, x),
        };
        z[m..].copy_from_slice(&upper);
        let mut held = vec![false; order + 1];
        for n in m + 1..order {
            held[n] = upper[n - m] == self.w[n];
        }
        if m > 1 {
            let vars: Vec<usize> = (1..m).collect();
            let lower_held = match warm {
                Some(t) => t.held.clone(),
                None => vec![false; order + 1],
            };
            let mut start = lower_held.clone();
            start[m..].iter_mut().for_each(|h| *h = false);
            let fallback = {
                let mut f = lower_guess(self.w, m, x);
                f[m..].copy_from_slice(&upper);
                f
            };
            let (lower, lower_held, _) = repair(self.w, &vars, start, z.clone(), &fallback)?;
            z = lower;
            held[..m].copy_from_slice(&lower_held[..m]);
        }
        let t = times_of(&z);
        if t[m - 1] - 2.0 * t[m] < -COUPLING_TOL * t[m - 1] {
            return Ok(None);
        }
        Ok(Some(Trial {
            horizon: t[0],
            z,
            held,
        }))
    }
}

/// Geometric interpolation between `1` and `x` for orders below `M`,
/// clipped to the bounds.
fn lower_guess(w: &[f64], m: usize, x: f64) -> Vec<f64> {
    let mut z = vec![1.0; w.len()];
    for n in 1..m {
        z[n] = x.powf(n as f64 / m as f64).min(w[n]);
    }
    z[m] = x;
    z
}

pub fn solve_mdt(req: &MdtRequest) -> Result<MttSolution> {
    let spec = &req.spec;
    let order = spec.order();
    let m = req.target_order;
    let mtt = solve_mtt(spec)?;
    let minimum = mtt.horizon();
    if req.horizon < minimum * (1.0 - HORIZON_TOL) {
        return Err(Error::InfeasibleHorizon {
            requested: req.horizon,
            minimum,
        });
    }
    if req.horizon <= minimum * (1.0 + HORIZON_TOL) {
        return Ok(mtt);
    }
    let top = spec.bound(order);
    let scale = Scale::new(spec.distance(), top, order)?;
    let target = scale.time_to_hat(req.horizon);
    let w_hat = to_dimensionless(&spec.bound_vector());
    let split = Split {
        w: w_hat.values(),
        m,
    };

    let hi_x = mtt.dimensionless().get(m);
    let mut hi = split
        .evaluate(hi_x, None)?
        .ok_or_else(|| Error::Invalid("minimum-time peaks fail the coupling test".into()))?;
    let mut hi_x = hi_x;
    let mut lo_x = hi_x;
    // walk down until the horizon is exceeded
    loop {
        lo_x *= 0.5;
        if lo_x < f64::MIN_POSITIVE.sqrt() {
            return Err(Error::Invalid(format!(
                "no lower bracket for x{m} at horizon {}",
                req.horizon
            )));
        }
        match split.evaluate(lo_x, Some(&hi))? {
            Some(trial) if trial.horizon <= target => {
                hi = trial;
                hi_x = lo_x;
            }
            _ => break,
        }
    }
    while (hi_x / lo_x).ln() > BISECTION_TOL {
        let mid = (lo_x * hi_x).sqrt();
        match split.evaluate(mid, Some(&hi))? {
            Some(trial) if trial.horizon <= target => {
                hi = trial;
                hi_x = mid;
            }
            _ => lo_x = mid,
        }
    }
    debug!("bisection bracket for x{m}: [{lo_x}, {hi_x}]");
    let z = polish(&split, &hi, target).unwrap_or_else(|| hi.z.clone());
    back_transform(spec, DimensionlessPeaks::from_raw(z), &hi.held)
}

/// Newton on the free boundary equations plus `T̂_0 = target`, with `ẑ_M`
/// free. Returns `None` if the result drifts from the bisection answer or
/// breaks a bound.
fn polish(split: &Split, trial: &Trial, target: f64) -> Option<Vec<f64>> {
    let (order, m) = (split.order(), split.m);
    let w = split.w;
    let mut free = Vec::new();
    let mut equations = Vec::new();
    for n in 1..order {
        if n != m && !trial.held[n] {
            free.push(n);
            equations.push(Equation::Boundary(n));
        }
    }
    free.push(m);
    equations.push(Equation::Horizon(target));
    let system = NewtonSystem::new(trial.z.clone(), free, equations).ok()?;
    let z = match system.solve() {
        Ok(z) => z,
        Err(err) => {
            debug!("polish skipped: {err}");
            return None;
        }
    };
    let drift = (z[m] / trial.z[m]).ln().abs();
    let within = (1..order).all(|n| z[n] <= w[n] * (1.0 + 1e-12));
    let t = times_of(&z);
    let feasible = (1..order).all(|n| t[n - 1] - 2.0 * t[n] >= -COUPLING_TOL * t[n - 1]);
    if drift > 1e-6 || !within || !feasible {
        warn!("polish rejected (drift {drift:e}, within {within}, feasible {feasible})");
        return None;
    }
    let mut z = z;
    for n in 1..order {
        z[n] = z[n].min(w[n]);
    }
    Some(z)
}
