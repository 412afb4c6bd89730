//! Damped Newton solver, in `ln x`, for boundary equations `T_{n-1} = 2 T_n`.
//!
//! The unknowns are selected entries of a peak vector; all other entries are
//! held fixed. Each boundary equation is written as
//! `x_{n-1} / (x_n T_n) - 1`, which vanishes exactly when
//! `T_{n-1} - 2 T_n = x_{n-1} / x_n - T_n` does.

use log::trace;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kinematics::times_of;

/// Iteration budget of a single solve.
pub const MAX_ITERATIONS: usize = 200;
const MAX_HALVINGS: usize = 40;
const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equation {
    /// `T_{n-1} = 2 T_n`.
    Boundary(usize),
    /// `T_0 = target`.
    Horizon(f64),
}

/// Square system over the entries listed in `free`.
#[derive(Debug, Clone)]
pub struct NewtonSystem {
    values: Vec<f64>,
    free: Vec<usize>,
    equations: Vec<Equation>,
}

impl NewtonSystem {
    /// `values` is the full vector `x_0..x_K`; its free entries are the
    /// starting guess.
    pub fn new(values: Vec<f64>, free: Vec<usize>, equations: Vec<Equation>) -> Result<Self> {
        if free.len() != equations.len() {
            return Err(Error::LengthMismatch {
                what: "equations",
                expected: free.len(),
                got: equations.len(),
            });
        }
        let order = values.len() - 1;
        for &i in &free {
            if i > order {
                return Err(Error::Invalid(format!(
                    "free index {i} beyond order {order}"
                )));
            }
        }
        for e in &equations {
            if let Equation::Boundary(n) = *e {
                if n == 0 || n >= order {
                    return Err(Error::Invalid(format!(
                        "boundary equation {n} outside 1..{order}"
                    )));
                }
            }
        }
        Ok(Self {
            values,
            free,
            equations,
        })
    }

    /// Relative residuals, so every equation converges on its own scale.
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let times = times_of(x);
        self.equations
            .iter()
            .map(|e| match *e {
                Equation::Boundary(n) => x[n - 1] / (x[n] * times[n]) - 1.0,
                Equation::Horizon(target) => times[0] / target - 1.0,
            })
            .collect()
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let m = self.free.len();
        let times = times_of(x);
        DMatrix::from_fn(m, m, |row, col| {
            let i = self.free[col];
            match self.equations[row] {
                Equation::Boundary(n) => {
                    let direct = if i == n - 1 {
                        1.0 / x[n]
                    } else if i == n {
                        -x[n - 1] / (x[n] * x[n])
                    } else {
                        0.0
                    };
                    let ratio = x[n - 1] / x[n];
                    (direct - ratio / times[n] * d_time(x, n, i)) / times[n]
                }
                Equation::Horizon(target) => d_time(x, 0, i) / target,
            }
        })
    }

    /// Runs Newton from the stored guess and returns the full vector.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let mut x = self.values.clone();
        if self.free.is_empty() {
            return Ok(x);
        }
        let mut r = self.residual(&x);
        let mut norm = inf_norm(&r);
        for iteration in 0..MAX_ITERATIONS {
            if norm <= TOLERANCE {
                trace!("newton converged in {iteration} iterations, residual {norm:e}");
                return Ok(x);
            }
            // step in ln x
            let mut jac = self.jacobian(&x);
            for (k, &i) in self.free.iter().enumerate() {
                jac.column_mut(k).scale_mut(x[i]);
            }
            let rhs = DVector::from_iterator(r.len(), r.iter().map(|v| -v));
            let step = jac.lu().solve(&rhs).ok_or(Error::SingularJacobian)?;
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..=MAX_HALVINGS {
                let mut trial = x.clone();
                let mut finite = true;
                for (k, &i) in self.free.iter().enumerate() {
                    trial[i] *= (lambda * step[k]).exp();
                    finite &= trial[i] > 0.0 && trial[i].is_finite();
                }
                if finite {
                    let r_trial = self.residual(&trial);
                    let n_trial = inf_norm(&r_trial);
                    if n_trial < norm {
                        accepted = Some((trial, r_trial, n_trial));
                        break;
                    }
                }
                lambda *= 0.5;
            }
            match accepted {
                Some((trial, r_trial, n_trial)) => {
                    x = trial;
                    r = r_trial;
                    norm = n_trial;
                }
                None if norm <= 1e3 * TOLERANCE => return Ok(x),
                None => {
                    return Err(Error::NonConvergence {
                        iterations: iteration,
                        residual: norm,
                        last_iterate: x,
                    })
                }
            }
        }
        if norm <= TOLERANCE {
            return Ok(x);
        }
        Err(Error::NonConvergence {
            iterations: MAX_ITERATIONS,
            residual: norm,
            last_iterate: x,
        })
    }
}

/// `∂T_k / ∂x_i`.
fn d_time(x: &[f64], k: usize, i: usize) -> f64 {
    let order = x.len() - 1;
    let mut d = 0.0;
    // term x_i / x_{i+1}
    if i >= k && i < order {
        d += 1.0 / x[i + 1];
    }
    // term x_{i-1} / x_i
    if i >= 1 && i > k {
        d -= x[i - 1] / (x[i] * x[i]);
    }
    d
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, r| m.max(r.abs()))
}

/// Solves `T_{n-1} = 2 T_n` for every `n` in `boundary`, with those entries
/// free and all other entries of `values` held fixed.
pub fn solve_boundary_equations(values: &[f64], boundary: &[usize]) -> Result<Vec<f64>> {
    let equations = boundary.iter().map(|&n| Equation::Boundary(n)).collect();
    NewtonSystem::new(values.to_vec(), boundary.to_vec(), equations)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_jacobian_matches_differences() {
        let x = vec![1.0, 0.4, 0.13, 0.05, 0.5, 1.0];
        let system = NewtonSystem::new(
            x.clone(),
            vec![1, 2, 4],
            vec![
                Equation::Boundary(1),
                Equation::Boundary(2),
                Equation::Horizon(9.0),
            ],
        )
        .unwrap();
        let jac = system.jacobian(&x);
        for (col, &i) in [1usize, 2, 4].iter().enumerate() {
            let h = 1e-7 * x[i];
            let mut up = x.clone();
            up[i] += h;
            let mut down = x.clone();
            down[i] -= h;
            let (ru, rd) = (system.residual(&up), system.residual(&down));
            for row in 0..3 {
                let fd = (ru[row] - rd[row]) / (2.0 * h);
                assert!(
                    (fd - jac[(row, col)]).abs() < 1e-5 * fd.abs().max(1.0),
                    "row {row} col {col}: {fd} vs {}",
                    jac[(row, col)]
                );
            }
        }
    }

    #[test]
    fn all_free_gives_global_minimum() {
        let z = solve_boundary_equations(&[1.0, 0.5, 0.5, 1.0], &[1, 2]).unwrap();
        assert!((z[1] - 0.25f64.cbrt()).abs() < 1e-12);
        assert!((z[2] - 0.5f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn worked_example_block() {
        let guess = [1.0, 0.287175, 0.13195, 0.037893, 0.435275, 1.0];
        let mut fixed = guess;
        fixed[3] = 0.03789273;
        let z = solve_boundary_equations(&fixed, &[1, 2, 4]).unwrap();
        let t = times_of(&z);
        for n in [1, 2, 4] {
            assert!((t[n - 1] - 2.0 * t[n]).abs() < 1e-11);
        }
        assert!((z[1] - 0.19998).abs() < 5e-5);
        assert!((z[2] - 0.07999).abs() < 5e-5);
        assert!((z[4] - 0.19466).abs() < 5e-5);
    }

    #[test]
    fn mismatched_system_is_rejected() {
        assert!(NewtonSystem::new(vec![1.0, 1.0, 1.0], vec![1], vec![]).is_err());
        assert!(solve_boundary_equations(&[1.0, 1.0, 1.0], &[2]).is_err());
    }

    #[test]
    fn nothing_free_is_identity() {
        let v = [1.0, 0.3, 1.0];
        assert_eq!(solve_boundary_equations(&v, &[]).unwrap(), v.to_vec());
    }
}
