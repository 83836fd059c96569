//! Classification of multivariate Hawkes process paths by empirical risk
//! minimization over Lasso-selected supports.

pub mod classify;
pub mod error;
pub mod harness;
pub mod hawkes;
pub mod io;
pub mod lasso;
pub mod numeric;
pub mod rng;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
