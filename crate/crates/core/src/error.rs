use thiserror::Error;

/// Errors raised by the planner and its building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("order {0} is outside the supported range 1..={max}", max = crate::MAX_ORDER)]
    UnsupportedOrder(usize),

    #[error("{what}: expected {expected} entries, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{what}[{index}] must be positive and finite, got {value}")]
    NonPositive {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("{what} must be positive and finite, got {value}")]
    InvalidScalar { what: &'static str, value: f64 },

    #[error("peak vector is infeasible at index {index}: T{index} = {lhs} < 2 T{next} = {rhs}", next = index + 1)]
    Infeasible { index: usize, lhs: f64, rhs: f64 },

    #[error("time {t} lies outside the trajectory horizon [0, {horizon}]")]
    OutOfRange { t: f64, horizon: f64 },

    #[error("derivative order {requested} exceeds trajectory order {order}")]
    DerivativeOrder { requested: usize, order: usize },

    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    #[error("singular Jacobian in the residual system")]
    SingularJacobian,

    #[error("active-set repair gave up after {rounds} rounds: {detail}")]
    RepairLimit { rounds: usize, detail: String },

    #[error(
        "requested horizon {requested} s is shorter than the minimum-time horizon {minimum} s"
    )]
    InfeasibleHorizon { requested: f64, minimum: f64 },

    #[error("target order {target} must satisfy 1 <= M < N = {order}")]
    TargetOrder { target: usize, order: usize },

    #[error("oracle found no feasible grid point")]
    OracleEmpty,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidScalar { what, value })
    }
}

pub(crate) fn check_positive_entries(what: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        Some(index) => Err(Error::NonPositive {
            what,
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}
