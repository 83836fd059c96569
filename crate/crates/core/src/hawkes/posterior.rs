//! Conditional class probabilities from class weights and log-densities.

use crate::error::{Error, Result};

/// Class probabilities given a path; entries sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    probs: Vec<f64>,
}

impl Posterior {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn num_classes(&self) -> usize {
        self.probs.len()
    }

    /// 1-based label of the most probable class.
    pub fn argmax_label(&self) -> usize {
        argmax_lowest(&self.probs) + 1
    }
}

/// `π_k ∝ p_k exp(F_k)`, evaluated with a max shift.
///
/// Classes with zero weight get probability exactly zero and never take part
/// in the shift.
pub fn posterior(class_weights: &[f64], log_scores: &[f64]) -> Result<Posterior> {
    if class_weights.len() != log_scores.len() {
        return Err(Error::DimensionMismatch {
            expected: class_weights.len(),
            got: log_scores.len(),
        });
    }
    if class_weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidArgument("class weights must be nonnegative".into()));
    }
    let total: f64 = class_weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateWeights);
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "class weights must sum to 1, got {total}"
        )));
    }
    Ok(Posterior {
        probs: normalized_posterior(class_weights, log_scores),
    })
}

/// Same as [`posterior`] without validation; weights need not be normalized.
pub(crate) fn normalized_posterior(class_weights: &[f64], log_scores: &[f64]) -> Vec<f64> {
    let shift = class_weights
        .iter()
        .zip(log_scores)
        .filter(|(&w, _)| w > 0.0)
        .map(|(&w, &f)| w.ln() + f)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = class_weights
        .iter()
        .zip(log_scores)
        .map(|(&w, &f)| if w > 0.0 { (w.ln() + f - shift).exp() } else { 0.0 })
        .collect();
    let norm: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= norm;
    }
    probs
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
