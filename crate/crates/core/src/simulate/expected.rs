//! Mean event counts `E[N_j(T)]`.
//!
//! With `u(t) = ∫_0^t β e^{-β(t-s)} ν(s) ds` and mean intensity `ν = μ + A u`,
//! the pair `(u, m)` with `m(t) = E[N(t)]` solves the linear system
//! `u' = β(μ + (A - I) u)`, `m' = μ + A u`, `u(0) = m(0) = 0`. It is
//! integrated with classical RK4, doubling the step count until two
//! successive solutions agree.

use crate::error::{Error, Result};
use crate::hawkes::{ExponentialKernel, ModelParams};

const TOLERANCE: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 20;

pub fn expected_counts(
    params: &ModelParams,
    kernel: &ExponentialKernel,
    horizon: f64,
) -> Result<Vec<f64>> {
    params.check_nonnegative()?;
    let radius = params.spectral_radius();
    if radius >= 1.0 {
        return Err(Error::UnstableAdjacency(radius));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if params.adjacency().iter().all(|&a| a == 0.0) {
        return Ok(params.mu().iter().map(|m| m * horizon).collect());
    }

    let mut steps = 64usize;
    let mut previous = integrate(params, kernel.beta(), horizon, steps);
    for _ in 0..MAX_DOUBLINGS {
        steps *= 2;
        let current = integrate(params, kernel.beta(), horizon, steps);
        let converged = current
            .iter()
            .zip(&previous)
            .all(|(c, p)| (c - p).abs() <= TOLERANCE * c.abs().max(1.0));
        previous = current;
        if converged {
            return Ok(previous);
        }
    }
    Ok(previous)
}

fn integrate(params: &ModelParams, beta: f64, horizon: f64, steps: usize) -> Vec<f64> {
    let dim = params.dim();
    let h = horizon / steps as f64;
    let mut state = vec![0.0; 2 * dim];
    let mut k = [
        vec![0.0; 2 * dim],
        vec![0.0; 2 * dim],
        vec![0.0; 2 * dim],
        vec![0.0; 2 * dim],
    ];
    let mut tmp = vec![0.0; 2 * dim];
    for _ in 0..steps {
        derivative(params, beta, &state, &mut k[0]);
        for i in 0..2 * dim {
            tmp[i] = state[i] + 0.5 * h * k[0][i];
        }
        derivative(params, beta, &tmp, &mut k[1]);
        for i in 0..2 * dim {
            tmp[i] = state[i] + 0.5 * h * k[1][i];
        }
        derivative(params, beta, &tmp, &mut k[2]);
        for i in 0..2 * dim {
            tmp[i] = state[i] + h * k[2][i];
        }
        derivative(params, beta, &tmp, &mut k[3]);
        for i in 0..2 * dim {
            state[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
    }
    state.split_off(dim)
}

fn derivative(params: &ModelParams, beta: f64, state: &[f64], out: &mut [f64]) {
    let dim = params.dim();
    let (u, _) = state.split_at(dim);
    for j in 0..dim {
        let nu = params.mu()[j]
            + params
                .a_row(j)
                .iter()
                .zip(u)
                .map(|(a, x)| a * x)
                .sum::<f64>();
        out[j] = beta * (nu - u[j]);
        out[dim + j] = nu;
    }
}
