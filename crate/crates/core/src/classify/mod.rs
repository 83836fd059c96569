//! Score-based classifiers and the constrained risk-minimization refit.

mod adagrad;
mod constraints;
mod model;
mod risk;
mod train;

pub use adagrad::{free_adagrad, free_adagrad_observed, AdagradResult, ErmConfig};
pub use constraints::{ClassLayout, ConstraintSet, FreeLayout};
pub use model::{bayes_classify, ClassifierModel, Variant};
pub use risk::{empirical_l2_risk, l2_loss, score, ErmProblem};
pub use train::{class_frequencies, train_ermlr, SplitMode, TrainConfig, Trained};
