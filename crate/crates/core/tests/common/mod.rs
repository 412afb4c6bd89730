#![allow(dead_code)]

use minmotion::{
    achievement_times, build_profile, MotionSpec, MttSolution, PulseSchedule, TrajectoryProfile,
};
use rand::rngs::StdRng;
use rand::Rng;

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

pub fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// `t_0 > 0` and `t_{k+1} / t_k >= 2`, a quarter of the ratios exactly 2.
pub fn random_schedule(rng: &mut StdRng, order: usize) -> PulseSchedule {
    let mut times = vec![log_uniform(rng, 0.01, 10.0)];
    for _ in 1..order {
        let last = *times.last().unwrap();
        let ratio = if rng.random_bool(0.25) {
            2.0
        } else {
            log_uniform(rng, 2.0, 8.0)
        };
        times.push(last * ratio);
    }
    PulseSchedule::from_structural_times(&times, log_uniform(rng, 0.1, 10.0)).unwrap()
}

/// Worst relative gap between the structural times and the achievement
/// times computed from the peaks measured off the profile.
pub fn time_identity_error(schedule: &PulseSchedule) -> f64 {
    let profile = build_profile(schedule);
    let order = schedule.order();
    let mut peaks = profile.measured_peaks();
    // x_0 is the travelled distance
    peaks[0] = profile.evaluate(profile.horizon(), 0).unwrap();
    let times = achievement_times(&minmotion::PeakVector::new(peaks).unwrap());
    let t = schedule.structural_times();
    (0..order)
        .map(|n| rel(times.get(n), t[order - 1 - n]))
        .fold(0.0, f64::max)
}

/// The `k`-th function of the doubling construction: `x^(N-k)` on
/// `[0, t_k]`, or the position on `[0, t_{N-1}]` for `k = N`.
pub fn f(profile: &TrajectoryProfile, k: usize, t: f64) -> f64 {
    let t = t.clamp(0.0, profile.horizon());
    profile.evaluate(t, profile.order() - k).unwrap()
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ConstructionErrors {
    pub symmetry: f64,
    pub first_achievement: f64,
    pub complement: f64,
    pub ratio: f64,
    pub nonnegative: f64,
    pub endpoints: f64,
    pub plateau: f64,
}

impl ConstructionErrors {
    pub fn worst(&self) -> f64 {
        [
            self.symmetry,
            self.first_achievement,
            self.complement,
            self.ratio,
            self.nonnegative,
            self.endpoints,
            self.plateau,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Checks the doubling-construction identities at `probes` points per
/// function. Errors are relative to the function's maximum.
pub fn construction_errors(
    rng: &mut StdRng,
    schedule: &PulseSchedule,
    probes: usize,
) -> ConstructionErrors {
    let profile = build_profile(schedule);
    let order = schedule.order();
    let t = schedule.structural_times();
    let mut e = ConstructionErrors::default();
    for k in 1..order {
        let (tk, tp) = (t[k], t[k - 1]);
        let peak = f(&profile, k, tp);
        let mut points: Vec<f64> = (0..probes).map(|_| rng.random_range(0.0..tk)).collect();
        points.extend(profile.breakpoints().iter().copied().filter(|&b| b <= tk));
        for &s in &points {
            let v = f(&profile, k, s);
            e.symmetry = e.symmetry.max((v - f(&profile, k, tk - s)).abs() / peak);
            e.nonnegative = e.nonnegative.max((-v).max(0.0) / peak);
            e.first_achievement = e.first_achievement.max(((v - peak) / peak).max(0.0));
            if s <= tp {
                let c = peak - f(&profile, k, tp - s);
                e.complement = e.complement.max((v - c).abs() / peak);
            }
            // the derivative vanishes between the two halves
            if s > tp && s < tk - tp {
                e.plateau = e.plateau.max((v - peak).abs() / peak);
            }
        }
        e.endpoints = e
            .endpoints
            .max(f(&profile, k, 0.0).abs() / peak)
            .max(f(&profile, k, tk).abs() / peak);
        // earliest time of the maximum: just before t_{k-1} the value is smaller
        let before = f(&profile, k, 0.9 * tp);
        if before >= peak {
            e.first_achievement = e.first_achievement.max(1.0);
        }
        let measured = profile.measured_peaks()[order - k];
        e.first_achievement = e.first_achievement.max(rel(measured, peak));
        let next = f(&profile, k + 1, tk);
        e.ratio = e.ratio.max(rel(next / peak, tk - tp));
    }
    e
}

/// Largest `min(slack of bound, slack of boundary condition)` over the
/// interior orders; zero means exact complementarity.
pub fn complementarity(sol: &MttSolution, spec: &MotionSpec) -> f64 {
    let x = sol.peaks();
    let t = sol.times();
    (1..spec.order())
        .map(|n| {
            let bound = (spec.bound(n) - x.get(n)) / spec.bound(n);
            let boundary = (t.get(n - 1) - 2.0 * t.get(n)) / t.get(n - 1);
            bound.abs().min(boundary.abs())
        })
        .fold(0.0, f64::max)
}

/// Spec with unit distance and top bound so that `ŵ = w`.
pub fn unit_spec(interior: &[f64]) -> MotionSpec {
    let mut bounds = interior.to_vec();
    bounds.push(1.0);
    MotionSpec::new(1.0, bounds).unwrap()
}

pub fn random_unit_spec(rng: &mut StdRng, order: usize, lo: f64, hi: f64) -> MotionSpec {
    let interior: Vec<f64> = (1..order).map(|_| log_uniform(rng, lo, hi)).collect();
    unit_spec(&interior)
}
