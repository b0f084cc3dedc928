//! Levenberg-Marquardt minimization of `½‖r(u)‖²`.
//!
//! The damping term is scaled by the running maximum of `diag(JᵀJ)`
//! (Marquardt scaling), which makes the iteration invariant to rescaling of
//! individual parameters. The damping factor follows Nielsen's update rule.
//!
//! Once the damped iteration stops, a few undamped Gauss-Newton steps polish
//! the result. Near the optimum the cost is flat to rounding, so the cost test
//! alone leaves the parameters scattered along weakly determined directions;
//! the Gauss-Newton step is driven by the gradient and keeps contracting.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop when an accepted step lowers the cost by less than this fraction.
    pub cost_tol: f64,
    /// Stop when the step norm falls below this multiple of the parameter norm.
    pub step_tol: f64,
    pub initial_damping: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { max_iter: 500, cost_tol: 1e-10, step_tol: 1e-12, initial_damping: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    CostChange,
    StepSize,
    ZeroResidual,
    MaxIterations,
    /// Residuals could not be evaluated to finite values at the start point.
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmReport {
    pub params: DVector<f64>,
    /// ½‖r‖² at `params`.
    pub cost: f64,
    pub n_iter: usize,
    pub termination: Termination,
    /// Cost after every accepted step, starting with the initial cost.
    pub cost_history: Vec<f64>,
}

impl LmReport {
    pub fn converged(&self) -> bool {
        !matches!(self.termination, Termination::MaxIterations | Termination::NonFinite)
    }
}

/// Minimizes the residual returned by `eval`, which yields `(r, J)` at a
/// parameter vector.
pub fn levenberg_marquardt<F>(start: DVector<f64>, mut eval: F, opts: &LmOptions) -> LmReport
where
    F: FnMut(&DVector<f64>) -> (DVector<f64>, DMatrix<f64>),
{
    let mut params = start;
    let (mut residual, mut jac) = eval(&params);
    let mut cost = 0.5 * residual.norm_squared();
    let mut history = vec![cost];
    if !cost.is_finite() || jac.iter().any(|v| !v.is_finite()) {
        return LmReport { params, cost, n_iter: 0, termination: Termination::NonFinite, cost_history: history };
    }
    if cost == 0.0 {
        return LmReport { params, cost, n_iter: 0, termination: Termination::ZeroResidual, cost_history: history };
    }

    let n = params.len();
    let mut scale = DVector::<f64>::zeros(n);
    let mut damping = opts.initial_damping;
    let mut growth = 2.0;
    let mut termination = Termination::MaxIterations;
    let mut n_iter = 0;

    while n_iter < opts.max_iter {
        n_iter += 1;
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &residual;
        for i in 0..n {
            scale[i] = scale[i].max(jtj[(i, i)]);
        }
        let mut system = jtj.clone();
        for i in 0..n {
            system[(i, i)] += damping * scale[i].max(f64::MIN_POSITIVE);
        }
        let step = match system.cholesky() {
            Some(chol) => -chol.solve(&grad),
            None => {
                damping *= growth;
                growth *= 2.0;
                continue;
            }
        };
        let step_small = step.norm() <= opts.step_tol * (params.norm() + opts.step_tol);
        let candidate = &params + &step;
        let (r_new, j_new) = eval(&candidate);
        let cost_new = 0.5 * r_new.norm_squared();
        let finite = cost_new.is_finite() && j_new.iter().all(|v| v.is_finite());

        if finite && cost_new < cost {
            let damped: f64 = (0..n).map(|i| damping * scale[i] * step[i] * step[i]).sum();
            let predicted = 0.5 * (damped - step.dot(&grad));
            let rho = (cost - cost_new) / predicted;
            let reduction = (cost - cost_new) / cost;
            params = candidate;
            residual = r_new;
            jac = j_new;
            cost = cost_new;
            history.push(cost);
            if cost == 0.0 {
                termination = Termination::ZeroResidual;
                break;
            }
            if reduction < opts.cost_tol {
                termination = Termination::CostChange;
                break;
            }
            if step_small {
                termination = Termination::StepSize;
                break;
            }
            damping *= (1.0f64 / 3.0).max(1.0 - (2.0 * rho - 1.0).powi(3));
            growth = 2.0;
        } else {
            if step_small {
                termination = Termination::StepSize;
                break;
            }
            damping *= growth;
            growth *= 2.0;
        }
    }

    if matches!(termination, Termination::CostChange | Termination::StepSize) {
        polish(&mut params, &mut residual, &mut jac, &mut cost, &mut eval);
    }
    LmReport { params, cost, n_iter, termination, cost_history: history }
}

const POLISH_STEPS: usize = 8;

/// Undamped Gauss-Newton steps, kept while each step is at most half the
/// previous one and the cost does not rise beyond rounding.
fn polish<F>(
    params: &mut DVector<f64>,
    residual: &mut DVector<f64>,
    jac: &mut DMatrix<f64>,
    cost: &mut f64,
    eval: &mut F,
) where
    F: FnMut(&DVector<f64>) -> (DVector<f64>, DMatrix<f64>),
{
    let mut last = f64::INFINITY;
    for _ in 0..POLISH_STEPS {
        let svd = jac.clone().svd(true, true);
        let cutoff = svd.singular_values.max() * f64::EPSILON * jac.nrows().max(jac.ncols()) as f64;
        let Ok(step) = svd.solve(&(-&*residual), cutoff) else { return };
        let norm = step.norm();
        if !(norm <= 0.5 * last) || norm == 0.0 {
            return;
        }
        let candidate = &*params + &step;
        let (r_new, j_new) = eval(&candidate);
        let cost_new = 0.5 * r_new.norm_squared();
        if !cost_new.is_finite() || j_new.iter().any(|v| !v.is_finite()) || cost_new > *cost * (1.0 + 1e-12) {
            return;
        }
        *params = candidate;
        *residual = r_new;
        *jac = j_new;
        *cost = cost_new;
        last = norm;
    }
}
