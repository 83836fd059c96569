//! The linear multivariate Hawkes model: kernel, parameters, paths, likelihood
//! and the Bayes posterior.

mod kernel;
mod likelihood;
mod params;
mod path;
mod posterior;

pub use kernel::{ExponentialKernel, Kernel};
pub use likelihood::{intensity, kernel_convolution, log_density, LogDensity, LOG_FLOOR};
pub use params::{spectral_radius, ModelParams};
pub use path::{LabeledSample, Path};
pub(crate) use posterior::normalized_posterior;
pub use posterior::{argmax_lowest, posterior, Posterior};
