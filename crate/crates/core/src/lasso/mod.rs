//! Per-class Lasso support recovery.
//!
//! Each class solves `min_θ R(θ) + κ Σ_{j,j'} |a_{j,j'}|` for the
//! least-squares contrast `R`, row by row with FISTA, over a decreasing
//! grid of penalties (warm-started from the previous solution). The penalty
//! is picked by extended BIC.

mod ebic;
mod fista;

use std::sync::Arc;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ebic::{ebic, ebic_value, kappa_grid, kappa_max};
pub use fista::{fista_row, fista_row_from, largest_eigenvalue, lipschitz_bound, row_objective, soft_threshold};

use crate::error::{Error, Result};
use crate::hawkes::ModelParams;
use crate::stats::{aggregate, ClassStats, SuffStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LassoConfig {
    pub grid_size: usize,
    pub ebic_gamma: f64,
    pub max_iter: usize,
    pub rel_tol: f64,
    pub grid_decades: f64,
    pub nonnegative: bool,
    /// Skips EBIC and uses this single penalty.
    pub kappa_fixed: Option<f64>,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            grid_size: 40,
            ebic_gamma: 1.0,
            max_iter: 200,
            rel_tol: 1e-6,
            grid_decades: 3.0,
            nonnegative: false,
            kappa_fixed: None,
        }
    }
}

impl LassoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 2 {
            return Err(Error::InvalidArgument("grid_size must be >= 2".into()));
        }
        if !(0.0..=1.0).contains(&self.ebic_gamma) {
            return Err(Error::InvalidArgument("ebic_gamma must lie in [0, 1]".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be >= 1".into()));
        }
        if !(self.rel_tol > 0.0) || !(self.grid_decades > 0.0) {
            return Err(Error::InvalidArgument("rel_tol and grid_decades must be positive".into()));
        }
        if let Some(k) = self.kappa_fixed {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::InvalidArgument("fixed penalty must be >= 0".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EbicPoint {
    pub kappa: f64,
    pub ebic: f64,
    pub support_size: usize,
}

/// Lasso result for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFit {
    pub n_k: usize,
    pub theta: ModelParams,
    pub kappa_hat: f64,
    /// Nonzero pattern of the interaction part of `theta`.
    pub support: Vec<(usize, usize)>,
    pub ebic_trace: Vec<EbicPoint>,
    pub iterations_used: usize,
}

impl ClassFit {
    fn empty(dim: usize) -> Self {
        Self {
            n_k: 0,
            theta: ModelParams::zeros(dim),
            kappa_hat: 0.0,
            support: Vec::new(),
            ebic_trace: Vec::new(),
            iterations_used: 0,
        }
    }
}

/// Solves the whole penalty path for one class and keeps the EBIC minimizer
/// (ties go to the larger penalty). A class without paths gets `θ̂ = 0`.
pub fn fit_class(dim: usize, class_paths: &[Arc<SuffStats>], config: &LassoConfig) -> Result<ClassFit> {
    config.validate()?;
    if class_paths.is_empty() {
        return Ok(ClassFit::empty(dim));
    }
    let cs = aggregate(dim, class_paths)?;
    Ok(fit_class_stats(&cs, config))
}

/// [`fit_class`] on precomputed class statistics with at least one path.
pub fn fit_class_stats(cs: &ClassStats, config: &LassoConfig) -> ClassFit {
    let dim = cs.dim();
    if cs.is_empty() {
        return ClassFit::empty(dim);
    }
    let grid = kappa_grid(cs, config);
    let lipschitz = lipschitz_bound(cs);

    // rows[j][g] = solution of row j at grid point g
    let rows: Vec<(Vec<Vec<f64>>, usize)> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut current = vec![0.0; dim + 1];
            let mut iters = 0;
            let mut path = Vec::with_capacity(grid.len());
            for &kappa in &grid {
                let (sol, used) = fista_row_from(cs, j, kappa, config, lipschitz, &current);
                iters += used;
                current.clone_from(&sol);
                path.push(sol);
            }
            (path, iters)
        })
        .collect();
    let iterations_used = rows.iter().map(|(_, it)| it).sum();

    let thetas: Vec<ModelParams> = (0..grid.len())
        .map(|g| {
            let mut theta = ModelParams::zeros(dim);
            for (j, (path, _)) in rows.iter().enumerate() {
                theta.set_theta_row(j, &path[g]);
            }
            theta
        })
        .collect();

    let trace: Vec<EbicPoint> = thetas
        .par_iter()
        .zip(&grid)
        .map(|(theta, &kappa)| EbicPoint {
            kappa,
            ebic: ebic(theta, cs.paths(), config.ebic_gamma),
            support_size: theta.support_size(),
        })
        .collect();

    let mut best = 0;
    for (g, point) in trace.iter().enumerate().skip(1) {
        if point.ebic < trace[best].ebic {
            best = g;
        }
    }
    let theta = thetas[best].clone();
    ClassFit {
        n_k: cs.n(),
        support: theta.support(),
        kappa_hat: grid[best],
        theta,
        ebic_trace: trace,
        iterations_used,
    }
}

/// Lasso fits for classes `1..=num_classes` from per-sample statistics and labels.
pub fn fit_all(
    dim: usize,
    stats: &[Arc<SuffStats>],
    labels: &[usize],
    num_classes: usize,
    config: &LassoConfig,
) -> Result<Vec<ClassFit>> {
    if stats.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: stats.len(),
            got: labels.len(),
        });
    }
    (1..=num_classes)
        .map(|label| {
            let members: Vec<Arc<SuffStats>> = stats
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == label)
                .map(|(s, _)| s.clone())
                .collect();
            if members.is_empty() {
                warn!("class {label} has no training path; its Lasso estimate is zero");
            }
            fit_class(dim, &members, config)
        })
        .collect()
}
