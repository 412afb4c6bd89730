//! Minimum-time and minimum-distance-time motion planning for rest-to-rest
//! moves under peak bounds on every derivative up to order `N`.

mod error;
pub mod kinematics;
pub mod mdt;
pub mod mtt;
pub mod oracle;
pub mod residual;
pub mod scaling;
pub mod trajectory;

pub use error::{Error, Result};
pub use kinematics::{
    achievement_times, achievement_times_of, classify_feasibility, AchievementTimes,
    BoundaryStatus, FeasibilityReport, MotionSpec, PeakVector, Peaks, BOUNDARY_TOL,
};
pub use mdt::{solve_mdt, MdtRequest};
pub use mtt::{
    active_set, clamp_candidates, global_minimum, solve_mtt, solve_mtt_traced,
    solve_residual_system, GlobalMinimum, MttSolution, MttTrace,
};
pub use oracle::{
    check_samples, oracle_admissibility, oracle_mdt, oracle_mtt, AdmissibilityReport, OracleResult,
    Violation, ViolationKind,
};
pub use scaling::{
    from_dimensionless, from_dimensionless_time, to_dimensionless, to_dimensionless_time,
    DimensionlessPeaks, Scale,
};
pub use trajectory::{
    build_profile, pulse_schedule, samples_from_csv, samples_to_csv, PulseSchedule, PulseSegment,
    Sample, Sign, TrajectoryProfile,
};

/// Highest derivative order accepted by the constructors.
pub const MAX_ORDER: usize = 16;
