//! Three-stage training: class frequencies, per-class Lasso supports, and a
//! risk-minimizing refit on those supports.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classify::adagrad::{free_adagrad, AdagradResult, ErmConfig};
use crate::classify::constraints::ConstraintSet;
use crate::classify::model::{ClassifierModel, Variant};
use crate::classify::risk::ErmProblem;
use crate::error::{Error, Result};
use crate::hawkes::{ExponentialKernel, ModelParams};
use crate::lasso::{fit_all, ClassFit, LassoConfig};
use crate::stats::SuffStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Every stage uses the whole training set.
    #[default]
    None,
    /// Frequencies and supports from the first half, refit on the second.
    Half,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub lasso: LassoConfig,
    pub erm: ErmConfig,
    pub split: SplitMode,
    /// Number of classes; inferred as the largest label when absent.
    pub num_classes: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Trained {
    pub ermlr: ClassifierModel,
    pub pi: ClassifierModel,
    pub fits: Vec<ClassFit>,
    pub adagrad: AdagradResult,
    pub lasso_seconds: f64,
    pub erm_seconds: f64,
}

impl Trained {
    pub fn supports(&self) -> Vec<Vec<(usize, usize)>> {
        self.fits.iter().map(|f| f.support.clone()).collect()
    }

    /// True parameters restricted to the estimated supports, with the
    /// estimated class weights.
    pub fn oes(&self, truth: &[ModelParams]) -> Result<ClassifierModel> {
        if truth.len() != self.fits.len() {
            return Err(Error::DimensionMismatch {
                expected: self.fits.len(),
                got: truth.len(),
            });
        }
        let classes = truth
            .iter()
            .zip(&self.fits)
            .map(|(p, f)| p.masked(&f.support))
            .collect();
        ClassifierModel::new(Variant::Oes, &self.pi.kernel(), self.pi.class_weights.clone(), classes)
    }
}

/// Plain class frequencies from 1-based labels.
pub fn class_frequencies(labels: &[usize], num_classes: usize) -> Result<Vec<f64>> {
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut counts = vec![0usize; num_classes];
    for &l in labels {
        if l == 0 || l > num_classes {
            return Err(Error::InvalidArgument(format!(
                "label {l} outside 1..={num_classes}"
            )));
        }
        counts[l - 1] += 1;
    }
    Ok(counts.iter().map(|&c| c as f64 / labels.len() as f64).collect())
}

/// Trains the refitted classifier and the plug-in classifier from path
/// statistics and 1-based labels.
pub fn train_ermlr(
    stats: &[Arc<SuffStats>],
    labels: &[usize],
    kernel: &ExponentialKernel,
    config: &TrainConfig,
) -> Result<Trained> {
    if stats.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if stats.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: stats.len(),
            got: labels.len(),
        });
    }
    config.lasso.validate()?;
    config.erm.validate()?;
    let dim = stats[0].dim();
    let num_classes = match config.num_classes {
        Some(k) => k,
        None => labels.iter().copied().max().unwrap_or(0),
    };
    if num_classes == 0 {
        return Err(Error::InvalidArgument("labels are 1-based".into()));
    }

    let (first, second) = match config.split {
        SplitMode::None => ((stats, labels), (stats, labels)),
        SplitMode::Half => {
            let mid = stats.len() / 2;
            if mid == 0 || mid == stats.len() {
                return Err(Error::InvalidArgument(
                    "a half split needs at least two training paths".into(),
                ));
            }
            (
                (&stats[..mid], &labels[..mid]),
                (&stats[mid..], &labels[mid..]),
            )
        }
    };

    let weights = class_frequencies(first.1, num_classes)?;
    let started = Instant::now();
    let fits = fit_all(dim, first.0, first.1, num_classes, &config.lasso)?;
    let lasso_seconds = started.elapsed().as_secs_f64();

    let lasso_params: Vec<ModelParams> = fits.iter().map(|f| f.theta.clone()).collect();
    let pi = ClassifierModel::new(Variant::Pi, kernel, weights.clone(), lasso_params.clone())?;

    let started = Instant::now();
    let n_refit = second.0.len();
    let supports: Vec<Vec<(usize, usize)>> = fits.iter().map(|f| f.support.clone()).collect();
    let constraints = ConstraintSet::new(n_refit.max(2), dim, supports)?;
    let layout = constraints.layout();
    let start = layout.pack(&lasso_params)?;
    let classes: Vec<usize> = second.1.iter().map(|l| l - 1).collect();
    let problem = ErmProblem::new(second.0.to_vec(), classes, weights.clone(), layout.clone())?;
    let adagrad = free_adagrad(&problem, &constraints, &start, &config.erm)?;
    let erm_seconds = started.elapsed().as_secs_f64();

    let mut ermlr = ClassifierModel::new(Variant::Ermlr, kernel, weights, layout.unpack(&adagrad.x))?;
    ermlr.constraints = Some(constraints);
    Ok(Trained {
        ermlr,
        pi,
        fits,
        adagrad,
        lasso_seconds,
        erm_seconds,
    })
}
