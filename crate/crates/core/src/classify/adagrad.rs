//! Projected AdaGrad with a self-tuned distance scale.

use serde::{Deserialize, Serialize};

use crate::classify::constraints::ConstraintSet;
use crate::classify::risk::ErmProblem;
use crate::error::{Error, Result};
use crate::numeric::norm2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ErmConfig {
    /// Initial distance scale.
    pub gamma0: f64,
    pub max_iter: usize,
    pub rel_tol: f64,
    /// Added under the square root of the accumulated squared gradients.
    pub epsilon0: f64,
}

impl Default for ErmConfig {
    fn default() -> Self {
        Self {
            gamma0: 0.1,
            max_iter: 1000,
            rel_tol: 1e-5,
            epsilon0: 1e-12,
        }
    }
}

impl ErmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return Err(Error::InvalidArgument("gamma0 must be positive".into()));
        }
        if !(self.rel_tol >= 0.0) || !(self.epsilon0 >= 0.0) {
            return Err(Error::InvalidArgument(
                "rel_tol and epsilon0 must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdagradResult {
    /// Best iterate by empirical risk.
    pub x: Vec<f64>,
    pub risk: f64,
    pub initial_risk: f64,
    pub iterations: usize,
    pub best_iteration: usize,
    /// Final distance scale.
    pub gamma: f64,
}

/// Minimizes the empirical risk over the constraint set starting from the
/// projection of `start`.
///
/// Each step uses `η_t = γ_t / sqrt(ε₀ + Σ_{s≤t} ‖g_s‖²)`. The scale `γ` doubles
/// whenever the iterate has moved farther than `γ` from the starting point.
/// Iteration stops after `max_iter` steps, when the gradient vanishes, or when
/// a step moves less than `rel_tol · max(1, ‖x‖)`.
pub fn free_adagrad(
    problem: &ErmProblem,
    constraints: &ConstraintSet,
    start: &[f64],
    config: &ErmConfig,
) -> Result<AdagradResult> {
    free_adagrad_observed(problem, constraints, start, config, |_, _, _| {})
}

/// [`free_adagrad`] calling `observe(iteration, x, risk)` on every iterate,
/// starting with the projected initial point as iteration 0.
pub fn free_adagrad_observed<F>(
    problem: &ErmProblem,
    constraints: &ConstraintSet,
    start: &[f64],
    config: &ErmConfig,
    mut observe: F,
) -> Result<AdagradResult>
where
    F: FnMut(usize, &[f64], f64),
{
    config.validate()?;
    let layout = problem.layout();
    if start.len() != layout.len {
        return Err(Error::DimensionMismatch {
            expected: layout.len,
            got: start.len(),
        });
    }
    let mut x0 = start.to_vec();
    constraints.project(layout, &mut x0);

    let (initial_risk, mut grad) = problem.risk_and_gradient(&x0);
    observe(0, &x0, initial_risk);
    let mut best_x = x0.clone();
    let mut best_risk = initial_risk;
    let mut best_iteration = 0;
    let mut x = x0.clone();
    let mut gamma = config.gamma0;
    let mut sum_sq = 0.0;
    let mut iterations = 0;

    while iterations < config.max_iter {
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if g2 == 0.0 || !g2.is_finite() {
            break;
        }
        sum_sq += g2;
        let eta = gamma / (config.epsilon0 + sum_sq).sqrt();
        let mut next: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - eta * gi).collect();
        constraints.project(layout, &mut next);
        iterations += 1;

        let moved: Vec<f64> = next.iter().zip(&x0).map(|(a, b)| a - b).collect();
        let distance = norm2(&moved);
        while distance > gamma {
            gamma *= 2.0;
        }
        let step: Vec<f64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
        let step_norm = norm2(&step);
        let scale = norm2(&x).max(1.0);
        x = next;

        let (risk, g) = problem.risk_and_gradient(&x);
        grad = g;
        observe(iterations, &x, risk);
        if risk < best_risk {
            best_risk = risk;
            best_x.clone_from(&x);
            best_iteration = iterations;
        }
        if step_norm <= config.rel_tol * scale {
            break;
        }
    }
    Ok(AdagradResult {
        x: best_x,
        risk: best_risk,
        initial_risk,
        iterations,
        best_iteration,
        gamma,
    })
}
