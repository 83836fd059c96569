//! Excitation kernels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonnegative excitation kernel supported on `[0, ∞)` with unit mass.
///
/// Only [`ExponentialKernel`] is implemented; the sufficient-statistics code
/// relies on its closed-form products.
pub trait Kernel: Send + Sync {
    /// `h(s)`, zero for `s < 0`.
    fn evaluate(&self, s: f64) -> f64;

    /// `∫_0^t h(s) ds`.
    fn integral(&self, t: f64) -> f64;

    /// `∫_{max(u,v)}^{horizon} h(t - u) h(t - v) dt` for two event times `u`, `v`.
    fn product_integral(&self, u: f64, v: f64, horizon: f64) -> f64;
}

/// `h(s) = β exp(-β s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialKernel {
    beta: f64,
}

impl ExponentialKernel {
    pub const DEFAULT_BETA: f64 = 3.0;

    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "kernel decay must be positive and finite, got {beta}"
            )));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Decay factor `exp(-β dt)` applied to a convolution over an interval of length `dt`.
    #[inline]
    pub fn decay(&self, dt: f64) -> f64 {
        (-self.beta * dt).exp()
    }
}

impl Default for ExponentialKernel {
    fn default() -> Self {
        Self {
            beta: Self::DEFAULT_BETA,
        }
    }
}

impl Kernel for ExponentialKernel {
    #[inline]
    fn evaluate(&self, s: f64) -> f64 {
        if s < 0.0 {
            0.0
        } else {
            self.beta * (-self.beta * s).exp()
        }
    }

    #[inline]
    fn integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            -(-self.beta * t).exp_m1()
        }
    }

    fn product_integral(&self, u: f64, v: f64, horizon: f64) -> f64 {
        let late = u.max(v);
        if late >= horizon {
            return 0.0;
        }
        let b = self.beta;
        0.5 * b * (-b * (u - v).abs()).exp() * -(-2.0 * b * (horizon - late)).exp_m1()
    }
}
