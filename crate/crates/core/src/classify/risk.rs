//! Empirical squared risk of the plug-in score and its gradient over the
//! free coordinates of a [`FreeLayout`].

use std::sync::Arc;

use rayon::prelude::*;

use crate::classify::constraints::{ClassLayout, FreeLayout};
use crate::error::{Error, Result};
use crate::hawkes::{normalized_posterior, ModelParams, LOG_FLOOR};
use crate::numeric::{pairwise_sum, pairwise_sum_vecs};
use crate::stats::SuffStats;

/// Samples per reduction chunk. Partial sums are combined in a fixed order,
/// so results do not depend on the worker count.
const CHUNK: usize = 32;

/// Score vector `f_k = 2 π_k - 1` of a posterior.
pub fn score(posterior: &[f64]) -> Vec<f64> {
    posterior.iter().map(|p| 2.0 * p - 1.0).collect()
}

/// Squared loss `Σ_k (Z_k - f_k)^2` with `Z_k = ±1` coding of `class`.
pub fn l2_loss(posterior: &[f64], class: usize) -> f64 {
    posterior
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let z = if k == class { 1.0 } else { -1.0 };
            let r = z - (2.0 * p - 1.0);
            r * r
        })
        .sum()
}

/// Training data for the refitting objective: per-path statistics, 0-based
/// labels and plug-in class weights.
#[derive(Debug, Clone)]
pub struct ErmProblem {
    stats: Vec<Arc<SuffStats>>,
    classes: Vec<usize>,
    weights: Vec<f64>,
    layout: FreeLayout,
}

impl ErmProblem {
    pub fn new(
        stats: Vec<Arc<SuffStats>>,
        classes: Vec<usize>,
        weights: Vec<f64>,
        layout: FreeLayout,
    ) -> Result<Self> {
        if stats.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if stats.len() != classes.len() {
            return Err(Error::DimensionMismatch {
                expected: stats.len(),
                got: classes.len(),
            });
        }
        if weights.len() != layout.classes.len() {
            return Err(Error::DimensionMismatch {
                expected: layout.classes.len(),
                got: weights.len(),
            });
        }
        if let Some(&k) = classes.iter().find(|&&k| k >= weights.len()) {
            return Err(Error::InvalidArgument(format!(
                "label {} exceeds the number of classes {}",
                k + 1,
                weights.len()
            )));
        }
        if let Some(s) = stats.iter().find(|s| s.dim() != layout.dim) {
            return Err(Error::DimensionMismatch {
                expected: layout.dim,
                got: s.dim(),
            });
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::DegenerateWeights);
        }
        Ok(Self {
            stats,
            classes,
            weights,
            layout,
        })
    }

    pub fn layout(&self) -> &FreeLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    /// Empirical risk at the flat point `x`.
    pub fn risk(&self, x: &[f64]) -> f64 {
        let partial: Vec<f64> = self
            .stats
            .par_chunks(CHUNK)
            .zip(self.classes.par_chunks(CHUNK))
            .map(|(stats, classes)| {
                let mut scores = vec![0.0; self.weights.len()];
                let losses: Vec<f64> = stats
                    .iter()
                    .zip(classes)
                    .map(|(s, &c)| {
                        for (k, class) in self.layout.classes.iter().enumerate() {
                            scores[k] = if self.weights[k] > 0.0 {
                                class_log_density(s, class, x, None)
                            } else {
                                0.0
                            };
                        }
                        l2_loss(&normalized_posterior(&self.weights, &scores), c)
                    })
                    .collect();
                pairwise_sum(&losses)
            })
            .collect();
        pairwise_sum(&partial) / self.stats.len() as f64
    }

    /// Empirical risk and its gradient at `x`.
    ///
    /// Coordinates of classes with zero weight get a zero gradient, as do
    /// intensities at the log floor.
    pub fn risk_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let partial: Vec<(f64, Vec<f64>)> = self
            .stats
            .par_chunks(CHUNK)
            .zip(self.classes.par_chunks(CHUNK))
            .map(|(stats, classes)| self.chunk_gradient(stats, classes, x))
            .collect();
        let n = self.stats.len() as f64;
        let risk = pairwise_sum(&partial.iter().map(|p| p.0).collect::<Vec<_>>()) / n;
        let grads: Vec<Vec<f64>> = partial.into_iter().map(|p| p.1).collect();
        let mut grad = pairwise_sum_vecs(&grads, self.layout.len);
        for g in grad.iter_mut() {
            *g /= n;
        }
        (risk, grad)
    }

    fn chunk_gradient(&self, stats: &[Arc<SuffStats>], classes: &[usize], x: &[f64]) -> (f64, Vec<f64>) {
        let num_classes = self.weights.len();
        let mut grad = vec![0.0; self.layout.len];
        let mut scores = vec![0.0; num_classes];
        let mut local: Vec<Vec<f64>> = self.layout.classes.iter().map(|c| vec![0.0; c.len]).collect();
        let mut losses = Vec::with_capacity(stats.len());
        for (s, &c) in stats.iter().zip(classes) {
            for (k, class) in self.layout.classes.iter().enumerate() {
                if self.weights[k] > 0.0 {
                    local[k].iter_mut().for_each(|v| *v = 0.0);
                    scores[k] = class_log_density(s, class, x, Some(&mut local[k]));
                } else {
                    scores[k] = 0.0;
                }
            }
            let post = normalized_posterior(&self.weights, &scores);
            losses.push(l2_loss(&post, c));
            // dL/dF_k = -4 π_k [r_k - Σ_m π_m r_m], with r_m = Z_m - f_m.
            let resid: Vec<f64> = (0..num_classes)
                .map(|m| (if m == c { 1.0 } else { -1.0 }) - (2.0 * post[m] - 1.0))
                .collect();
            let mean_resid: f64 = post.iter().zip(&resid).map(|(p, r)| p * r).sum();
            for (k, class) in self.layout.classes.iter().enumerate() {
                if post[k] == 0.0 {
                    continue;
                }
                let d = -4.0 * post[k] * (resid[k] - mean_resid);
                for (g, l) in grad[class.offset..class.offset + class.len].iter_mut().zip(&local[k]) {
                    *g += d * l;
                }
            }
        }
        (pairwise_sum(&losses), grad)
    }

    /// Plug-in posterior of every training path at `x`.
    pub fn posteriors(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.stats
            .par_iter()
            .map(|s| {
                let scores: Vec<f64> = self
                    .layout
                    .classes
                    .iter()
                    .enumerate()
                    .map(|(k, class)| {
                        if self.weights[k] > 0.0 {
                            class_log_density(s, class, x, None)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                normalized_posterior(&self.weights, &scores)
            })
            .collect()
    }
}

/// Log-density of one path under the class parameters stored at `class`
/// inside `x`. When `grad` is given, the derivative with respect to the
/// class's free coordinates is accumulated into it (indices relative to
/// `class.offset`).
fn class_log_density(s: &SuffStats, class: &ClassLayout, x: &[f64], mut grad: Option<&mut Vec<f64>>) -> f64 {
    let dim = s.dim();
    let horizon = s.horizon();
    let comp = s.compensator();
    let mut value = 0.0;
    for (j, row) in class.rows.iter().enumerate() {
        let mu = x[class.mu_index(j)];
        let mut compensator = mu * horizon;
        for &(jp, idx) in row {
            compensator += x[idx] * comp[jp];
        }
        value -= compensator;
        if let Some(g) = grad.as_deref_mut() {
            g[j] -= horizon;
            for &(jp, idx) in row {
                g[idx - class.offset] -= comp[jp];
            }
        }
        for ev in s.event_rows(j).chunks_exact(dim + 1) {
            let mut lambda = mu;
            for &(jp, idx) in row {
                lambda += x[idx] * ev[jp + 1];
            }
            if lambda > LOG_FLOOR {
                value += lambda.ln();
                if let Some(g) = grad.as_deref_mut() {
                    let inv = 1.0 / lambda;
                    g[j] += inv;
                    for &(jp, idx) in row {
                        g[idx - class.offset] += ev[jp + 1] * inv;
                    }
                }
            } else {
                value += LOG_FLOOR.ln();
            }
        }
    }
    value
}

/// Empirical squared risk of the plug-in classifier `(weights, params)` on
/// labelled path statistics.
pub fn empirical_l2_risk(
    stats: &[Arc<SuffStats>],
    classes: &[usize],
    weights: &[f64],
    params: &[ModelParams],
) -> Result<f64> {
    let dim = params.first().map(|p| p.dim()).ok_or(Error::EmptyDataset)?;
    let supports: Vec<Vec<(usize, usize)>> = params.iter().map(|p| p.support()).collect();
    let layout = FreeLayout::new(dim, &supports);
    let x = layout.pack(params)?;
    let problem = ErmProblem::new(stats.to_vec(), classes.to_vec(), weights.to_vec(), layout)?;
    Ok(problem.risk(&x))
}
