//! Accelerated proximal gradient for one row of the penalized contrast.

use log::warn;

use super::LassoConfig;
use crate::numeric::{mat_vec, norm2};
use crate::stats::ClassStats;

const POWER_TOL: f64 = 1e-8;
const POWER_MAX_ITER: usize = 1000;
const LIPSCHITZ_SAFETY: f64 = 1.01;
const LIPSCHITZ_FLOOR: f64 = 1e-12;

/// Proximal map of `tau |·|`; the nonnegative variant also projects onto `x >= 0`.
#[inline]
pub fn soft_threshold(x: f64, tau: f64, nonnegative: bool) -> f64 {
    if nonnegative {
        (x - tau).max(0.0)
    } else if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration from the
/// all-ones vector.
pub fn largest_eigenvalue(matrix: &[f64], n: usize) -> f64 {
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        mat_vec(matrix, &v, &mut w);
        let next = crate::numeric::dot(&v, &w);
        let norm = norm2(&w);
        if norm == 0.0 {
            return 0.0;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        let done = (next - lambda).abs() <= POWER_TOL * next.abs();
        lambda = next;
        if done {
            break;
        }
    }
    lambda
}

/// Lipschitz constant of the row-gradient `2(Ḡθ - b̄)`: `1.01 · 2 λ_max(Ḡ)`.
pub fn lipschitz_bound(cs: &ClassStats) -> f64 {
    let width = cs.dim() + 1;
    let l = LIPSCHITZ_SAFETY * 2.0 * largest_eigenvalue(cs.gram_bar(), width);
    if l > LIPSCHITZ_FLOOR {
        l
    } else {
        warn!("zero Gram matrix; using Lipschitz floor {LIPSCHITZ_FLOOR}");
        LIPSCHITZ_FLOOR
    }
}

/// Row `j` of the penalized objective: `θ'Ḡθ - 2b̄_j'θ + κ Σ_{i>=1} |θ_i|`.
pub fn row_objective(cs: &ClassStats, j: usize, kappa: f64, row: &[f64]) -> f64 {
    crate::stats::row_contrast(cs, j, row) + kappa * row[1..].iter().map(|v| v.abs()).sum::<f64>()
}

/// Minimizes [`row_objective`] from zero.
pub fn fista_row(cs: &ClassStats, j: usize, kappa: f64, config: &LassoConfig) -> Vec<f64> {
    let start = vec![0.0; cs.dim() + 1];
    fista_row_from(cs, j, kappa, config, lipschitz_bound(cs), &start).0
}

/// FISTA from `start` with a precomputed Lipschitz constant; returns the last
/// iterate and the number of iterations run. Index 0 (the baseline) is not penalized.
pub fn fista_row_from(
    cs: &ClassStats,
    j: usize,
    kappa: f64,
    config: &LassoConfig,
    lipschitz: f64,
    start: &[f64],
) -> (Vec<f64>, usize) {
    let width = cs.dim() + 1;
    let b = cs.linear_bar_row(j);
    let step = 1.0 / lipschitz;
    let tau = kappa * step;

    let mut prev = start.to_vec();
    let mut x = start.to_vec();
    let mut y = start.to_vec();
    let mut grad = vec![0.0; width];
    let mut t = 1.0f64;
    for iter in 1..=config.max_iter {
        mat_vec(cs.gram_bar(), &y, &mut grad);
        for i in 0..width {
            let g = 2.0 * (grad[i] - b[i]);
            let z = y[i] - step * g;
            x[i] = soft_threshold(z, if i == 0 { 0.0 } else { tau }, config.nonnegative);
        }
        // Gradient-based restart: drop the momentum when the last step went
        // against the proximal-gradient direction.
        let mut against = 0.0;
        for i in 0..width {
            against += (y[i] - x[i]) * (x[i] - prev[i]);
        }
        if against > 0.0 {
            t = 1.0;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        let mut diff = 0.0;
        for i in 0..width {
            let d = x[i] - prev[i];
            diff += d * d;
            y[i] = x[i] + momentum * d;
        }
        let converged = diff.sqrt() <= config.rel_tol * norm2(&prev).max(1.0);
        std::mem::swap(&mut prev, &mut x);
        t = t_next;
        if converged {
            return (prev, iter);
        }
    }
    (prev, config.max_iter)
}
