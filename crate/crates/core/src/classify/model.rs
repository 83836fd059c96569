//! Plug-in classifiers built from class weights and per-class parameters.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::hawkes::{argmax_lowest, posterior, ExponentialKernel, ModelParams, Path, Posterior};
use crate::stats::{compute_suff_stats, SuffStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// True parameters and true class weights.
    Bayes,
    /// Lasso estimates plugged in directly.
    Pi,
    /// True parameters restricted to the estimated supports.
    Oes,
    /// Supports from the Lasso, values refitted by risk minimization.
    Ermlr,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Bayes => "bayes",
            Variant::Pi => "pi",
            Variant::Oes => "oes",
            Variant::Ermlr => "ermlr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub variant: Variant,
    pub beta: f64,
    #[serde(rename = "p_hat")]
    pub class_weights: Vec<f64>,
    pub classes: Vec<ModelParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintSet>,
}

impl ClassifierModel {
    pub fn new(variant: Variant, kernel: &ExponentialKernel, class_weights: Vec<f64>, classes: Vec<ModelParams>) -> Result<Self> {
        let model = Self {
            variant,
            beta: kernel.beta(),
            class_weights,
            classes,
            constraints: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        ExponentialKernel::new(self.beta)?;
        if self.classes.is_empty() {
            return Err(Error::InvalidArgument("a model needs at least one class".into()));
        }
        if self.class_weights.len() != self.classes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.classes.len(),
                got: self.class_weights.len(),
            });
        }
        let dim = self.classes[0].dim();
        if let Some(p) = self.classes.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
        if self.class_weights.iter().any(|w| !(*w >= 0.0)) || self.class_weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::DegenerateWeights);
        }
        let total: f64 = self.class_weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("class weights sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn kernel(&self) -> ExponentialKernel {
        ExponentialKernel::new(self.beta).expect("validated kernel rate")
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn dim(&self) -> usize {
        self.classes[0].dim()
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dim,
            });
        }
        Ok(())
    }

    /// Log-densities under each class; zero-weight classes report 0.
    pub fn log_scores(&self, stats: &SuffStats) -> Vec<f64> {
        self.classes
            .iter()
            .zip(&self.class_weights)
            .map(|(p, &w)| if w > 0.0 { stats.log_density(p).value } else { 0.0 })
            .collect()
    }

    pub fn posterior_stats(&self, stats: &SuffStats) -> Result<Posterior> {
        self.check_dim(stats.dim())?;
        posterior(&self.class_weights, &self.log_scores(stats))
    }

    pub fn posterior(&self, path: &Path) -> Result<Posterior> {
        self.check_dim(path.dim())?;
        self.posterior_stats(&compute_suff_stats(path, &self.kernel()))
    }

    /// Predicted 1-based label; ties go to the lowest label.
    pub fn predict_stats(&self, stats: &SuffStats) -> Result<usize> {
        Ok(argmax_lowest(self.posterior_stats(stats)?.probs()) + 1)
    }

    pub fn predict(&self, path: &Path) -> Result<usize> {
        self.check_dim(path.dim())?;
        self.predict_stats(&compute_suff_stats(path, &self.kernel()))
    }

    pub fn predict_all(&self, stats: &[Arc<SuffStats>]) -> Result<Vec<usize>> {
        stats.par_iter().map(|s| self.predict_stats(s)).collect()
    }

    /// Fraction of misclassified paths; `labels` are 1-based.
    pub fn error_rate(&self, stats: &[Arc<SuffStats>], labels: &[usize]) -> Result<f64> {
        if stats.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if stats.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: stats.len(),
                got: labels.len(),
            });
        }
        let predicted = self.predict_all(stats)?;
        let wrong = predicted.iter().zip(labels).filter(|(p, l)| p != l).count();
        Ok(wrong as f64 / labels.len() as f64)
    }
}

/// Bayes rule under known parameters and weights, returning a 1-based label.
pub fn bayes_classify(
    class_weights: &[f64],
    classes: &[ModelParams],
    kernel: &ExponentialKernel,
    path: &Path,
) -> Result<usize> {
    let model = ClassifierModel::new(Variant::Bayes, kernel, class_weights.to_vec(), classes.to_vec())?;
    model.predict(path)
}
