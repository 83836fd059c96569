//! Sufficient statistics of the least-squares contrast.
//!
//! For the exponential kernel every integral in the contrast has a closed form,
//! so a path reduces to
//!
//! * `G = (1/T) ∫_0^T H(t) H(t)' dt` with `H_0 ≡ 1`, an `(M+1)×(M+1)` Gram matrix,
//! * `event_rows`: `(1, H_1(T_ℓ), ..., H_M(T_ℓ))` at each event of each component,
//! * `b_j = (1/T) Σ_ℓ event_rows_j[ℓ]`,
//! * compensator pieces `Σ_ℓ (1 - e^{-β(T - T_ℓ)})` per source component.
//!
//! `H` is computed by one sweep over the time-ordered events with a decaying
//! accumulator; pair sums for `G` fall out of the same sweep, giving
//! `O(N M)` work per path. Events that share a timestamp do not see each other.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hawkes::{ExponentialKernel, LabeledSample, LogDensity, ModelParams, Path, LOG_FLOOR};
use crate::numeric::{dot, pairwise_sum_vecs};

#[derive(Debug, Clone, PartialEq)]
pub struct SuffStats {
    dim: usize,
    horizon: f64,
    gram: Vec<f64>,
    event_rows: Vec<Vec<f64>>,
    linear: Vec<f64>,
    compensator: Vec<f64>,
}

impl SuffStats {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Row-major `(M+1)×(M+1)` Gram matrix.
    pub fn gram(&self) -> &[f64] {
        &self.gram
    }

    pub fn gram_entry(&self, r: usize, c: usize) -> f64 {
        self.gram[r * (self.dim + 1) + c]
    }

    /// Flattened `n_j×(M+1)` rows for events of `component`.
    pub fn event_rows(&self, component: usize) -> &[f64] {
        &self.event_rows[component]
    }

    pub fn count(&self, component: usize) -> usize {
        self.event_rows[component].len() / (self.dim + 1)
    }

    pub fn total_events(&self) -> usize {
        (0..self.dim).map(|j| self.count(j)).sum()
    }

    /// Row-major `M×(M+1)` matrix `b`.
    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn linear_row(&self, j: usize) -> &[f64] {
        &self.linear[j * (self.dim + 1)..(j + 1) * (self.dim + 1)]
    }

    /// `Σ_{T_ℓ ∈ 𝒯_j} (1 - e^{-β(T - T_ℓ)})` per source `j`.
    pub fn compensator(&self) -> &[f64] {
        &self.compensator
    }

    /// Log-density of the path under `theta`, with intensities floored at
    /// [`LOG_FLOOR`] inside the logarithm.
    pub fn log_density(&self, theta: &ModelParams) -> LogDensity {
        let dim = self.dim;
        let width = dim + 1;
        let mut value = 0.0;
        let mut clamped = false;
        let mut row = vec![0.0; width];
        for j in 0..dim {
            row[0] = theta.mu()[j];
            row[1..].copy_from_slice(theta.a_row(j));
            value -= row[0] * self.horizon + dot(&row[1..], &self.compensator);
            for ev in self.event_rows[j].chunks_exact(width) {
                let lambda = dot(&row, ev);
                if lambda <= LOG_FLOOR {
                    clamped = true;
                    value += LOG_FLOOR.ln();
                } else {
                    value += lambda.ln();
                }
            }
        }
        LogDensity { value, clamped }
    }
}

pub fn compute_suff_stats(path: &Path, kernel: &ExponentialKernel) -> SuffStats {
    let dim = path.dim();
    let width = dim + 1;
    let horizon = path.horizon();
    let beta = kernel.beta();

    // tail[j] = Σ e^{-β(T - s)}, compensator[j] = Σ (1 - e^{-β(T - s)})
    let mut tail = vec![0.0; dim];
    let mut compensator = vec![0.0; dim];
    for j in 0..dim {
        for &s in path.events(j) {
            let x = -beta * (horizon - s);
            tail[j] += x.exp();
            compensator[j] -= x.exp_m1();
        }
    }

    let merged = path.merged();
    let mut event_rows: Vec<Vec<f64>> = (0..dim)
        .map(|j| Vec::with_capacity(path.count(j) * width))
        .collect();
    // later[j][j'] = Σ over pairs (event of j, earlier event of j') of e^{-β Δ}
    let mut later = vec![0.0; dim * dim];
    let mut acc = vec![0.0; dim];
    let mut now = 0.0;
    let mut i = 0;
    while i < merged.len() {
        let t = merged[i].0;
        let factor = kernel.decay(t - now);
        for a in &mut acc {
            *a *= factor;
        }
        now = t;
        let mut end = i;
        while end < merged.len() && merged[end].0 == t {
            end += 1;
        }
        for &(_, j) in &merged[i..end] {
            let rows = &mut event_rows[j];
            rows.push(1.0);
            rows.extend(acc.iter().map(|a| beta * a));
            for (jp, a) in acc.iter().enumerate() {
                later[j * dim + jp] += a;
            }
        }
        for x in i..end {
            for y in i..x {
                later[merged[x].1 * dim + merged[y].1] += 1.0;
            }
        }
        for &(_, j) in &merged[i..end] {
            acc[j] += 1.0;
        }
        i = end;
    }

    let mut gram = vec![0.0; width * width];
    gram[0] = 1.0;
    for j in 0..dim {
        gram[j + 1] = compensator[j] / horizon;
        gram[(j + 1) * width] = compensator[j] / horizon;
    }
    let scale = 0.5 * beta / horizon;
    for j in 0..dim {
        for jp in 0..=j {
            let pairs = if j == jp {
                path.count(j) as f64 + 2.0 * later[j * dim + j]
            } else {
                later[j * dim + jp] + later[jp * dim + j]
            };
            let value = scale * (pairs - tail[j] * tail[jp]);
            gram[(j + 1) * width + jp + 1] = value;
            gram[(jp + 1) * width + j + 1] = value;
        }
    }

    let mut linear = vec![0.0; dim * width];
    for j in 0..dim {
        let out = &mut linear[j * width..(j + 1) * width];
        for ev in event_rows[j].chunks_exact(width) {
            for (o, v) in out.iter_mut().zip(ev) {
                *o += v;
            }
        }
        for o in out.iter_mut() {
            *o /= horizon;
        }
    }

    SuffStats {
        dim,
        horizon,
        gram,
        event_rows,
        linear,
        compensator,
    }
}

/// Statistics of a whole dataset, computed in parallel.
pub fn compute_all(samples: &[LabeledSample], kernel: &ExponentialKernel) -> Vec<Arc<SuffStats>> {
    samples
        .par_iter()
        .map(|s| Arc::new(compute_suff_stats(&s.path, kernel)))
        .collect()
}

/// Averages of per-path statistics over the paths of one class.
#[derive(Debug, Clone)]
pub struct ClassStats {
    dim: usize,
    gram_bar: Vec<f64>,
    linear_bar: Vec<f64>,
    paths: Vec<Arc<SuffStats>>,
}

impl ClassStats {
    /// Class statistics from given moments, with no retained paths.
    ///
    /// Useful for solving the penalized problem on an arbitrary quadratic;
    /// [`ClassStats::n`] is then zero.
    pub fn from_moments(dim: usize, gram_bar: Vec<f64>, linear_bar: Vec<f64>) -> Result<Self> {
        let width = dim + 1;
        if gram_bar.len() != width * width {
            return Err(Error::DimensionMismatch {
                expected: width * width,
                got: gram_bar.len(),
            });
        }
        if linear_bar.len() != dim * width {
            return Err(Error::DimensionMismatch {
                expected: dim * width,
                got: linear_bar.len(),
            });
        }
        Ok(Self {
            dim,
            gram_bar,
            linear_bar,
            paths: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.paths.len()
    }

    /// True when the class had no path; all aggregates are then zero.
    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn gram_bar(&self) -> &[f64] {
        &self.gram_bar
    }

    pub fn linear_bar(&self) -> &[f64] {
        &self.linear_bar
    }

    pub fn linear_bar_row(&self, j: usize) -> &[f64] {
        let w = self.dim + 1;
        &self.linear_bar[j * w..(j + 1) * w]
    }

    pub fn paths(&self) -> &[Arc<SuffStats>] {
        &self.paths
    }
}

/// Class-level means of `G` and `b`.
///
/// Summation runs over a canonical ordering of the inputs with a fixed
/// pairwise tree, so the result is bitwise independent of input order.
pub fn aggregate(dim: usize, stats: &[Arc<SuffStats>]) -> Result<ClassStats> {
    if let Some(bad) = stats.iter().find(|s| s.dim != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.dim,
        });
    }
    let width = dim + 1;
    if stats.is_empty() {
        return Ok(ClassStats {
            dim,
            gram_bar: vec![0.0; width * width],
            linear_bar: vec![0.0; dim * width],
            paths: Vec::new(),
        });
    }
    let mut order: Vec<&Arc<SuffStats>> = stats.iter().collect();
    order.sort_by(|x, y| canonical_cmp(x, y));
    let n = stats.len() as f64;
    let grams: Vec<Vec<f64>> = order.iter().map(|s| s.gram.clone()).collect();
    let linears: Vec<Vec<f64>> = order.iter().map(|s| s.linear.clone()).collect();
    let mut gram_bar = pairwise_sum_vecs(&grams, width * width);
    let mut linear_bar = pairwise_sum_vecs(&linears, dim * width);
    for v in gram_bar.iter_mut().chain(linear_bar.iter_mut()) {
        *v /= n;
    }
    Ok(ClassStats {
        dim,
        gram_bar,
        linear_bar,
        paths: stats.to_vec(),
    })
}

fn canonical_cmp(x: &SuffStats, y: &SuffStats) -> std::cmp::Ordering {
    x.gram
        .iter()
        .chain(&x.linear)
        .zip(y.gram.iter().chain(&y.linear))
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// `Σ_j [θ_j' Ḡ θ_j - 2 b̄_j' θ_j]` with `θ_j = (μ_j, a_{j,·})`.
pub fn contrast(cs: &ClassStats, theta: &ModelParams) -> f64 {
    (0..cs.dim).map(|j| row_contrast(cs, j, &theta.theta_row(j))).sum()
}

/// The row-`j` term of [`contrast`].
pub fn row_contrast(cs: &ClassStats, j: usize, row: &[f64]) -> f64 {
    let width = cs.dim + 1;
    let mut quad = 0.0;
    for r in 0..width {
        quad += row[r] * dot(&cs.gram_bar[r * width..(r + 1) * width], row);
    }
    quad - 2.0 * dot(cs.linear_bar_row(j), row)
}

/// Gradient of [`contrast`]; row `j` is `2(Ḡ θ_j - b̄_j)`, laid out like the parameters.
pub fn contrast_gradient(cs: &ClassStats, theta: &ModelParams) -> ModelParams {
    let dim = cs.dim;
    let width = dim + 1;
    let mut grad = ModelParams::zeros(dim);
    let mut out = vec![0.0; width];
    for j in 0..dim {
        let row = theta.theta_row(j);
        crate::numeric::mat_vec(&cs.gram_bar, &row, &mut out);
        for (o, b) in out.iter_mut().zip(cs.linear_bar_row(j)) {
            *o = 2.0 * (*o - b);
        }
        grad.set_theta_row(j, &out);
    }
    grad
}

/// Class averages `Ḡ`, `b̄` in a JSON-friendly layout.
#[derive(Debug, Clone, Serialize)]
pub struct StatsDump {
    pub class: usize,
    pub n_k: usize,
    pub gram_bar: Vec<Vec<f64>>,
    pub linear_bar: Vec<Vec<f64>>,
}

impl StatsDump {
    pub fn new(label: usize, cs: &ClassStats) -> Self {
        let width = cs.dim + 1;
        Self {
            class: label,
            n_k: cs.n(),
            gram_bar: cs.gram_bar.chunks(width).map(<[f64]>::to_vec).collect(),
            linear_bar: cs.linear_bar.chunks(width).map(<[f64]>::to_vec).collect(),
        }
    }
}
