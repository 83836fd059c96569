//! Penalty grid and extended BIC.

use log::warn;
use statrs::function::factorial::ln_binomial;

use super::LassoConfig;
use crate::hawkes::ModelParams;
use crate::numeric::pairwise_sum;
use crate::stats::{ClassStats, SuffStats};

/// Smallest penalty at which every interaction coefficient is zero, with the
/// baseline profiled out at `A = 0`.
pub fn kappa_max(cs: &ClassStats) -> f64 {
    let dim = cs.dim();
    let width = dim + 1;
    let g = cs.gram_bar();
    let mut best = 0.0f64;
    for j in 0..dim {
        let b = cs.linear_bar_row(j);
        let mu = if g[0] > 0.0 { b[0] / g[0] } else { 0.0 };
        for jp in 1..width {
            best = best.max((2.0 * (g[jp * width] * mu - b[jp])).abs());
        }
    }
    best
}

/// Log-spaced decreasing grid from [`kappa_max`] down `grid_decades` decades.
pub fn kappa_grid(cs: &ClassStats, config: &LassoConfig) -> Vec<f64> {
    if let Some(k) = config.kappa_fixed {
        return vec![k];
    }
    let top = kappa_max(cs);
    if top <= 0.0 {
        warn!("no interaction signal in class statistics; using the single penalty 0");
        return vec![0.0];
    }
    let last = (config.grid_size - 1) as f64;
    (0..config.grid_size)
        .map(|i| top * 10f64.powf(-config.grid_decades * i as f64 / last))
        .collect()
}

/// `-2 L + |S| log n + 2 γ log C(M², |S|)`.
pub fn ebic_value(log_likelihood: f64, n: usize, dim: usize, support_size: usize, gamma: f64) -> f64 {
    let cells = (dim * dim) as u64;
    let mut value = -2.0 * log_likelihood + support_size as f64 * (n as f64).ln();
    if gamma != 0.0 && support_size > 0 {
        value += 2.0 * gamma * ln_binomial(cells, support_size as u64);
    }
    value
}

/// Extended BIC of `theta` over a class's training paths; the likelihood is
/// the sum of per-path log-densities with intensities floored inside the log.
pub fn ebic(theta: &ModelParams, class_paths: &[std::sync::Arc<SuffStats>], gamma: f64) -> f64 {
    let mut logs: Vec<f64> = class_paths.iter().map(|s| s.log_density(theta).value).collect();
    // Sorted so the sum does not depend on the order of the paths.
    logs.sort_by(f64::total_cmp);
    ebic_value(
        pairwise_sum(&logs),
        class_paths.len(),
        theta.dim(),
        theta.support_size(),
        gamma,
    )
}
