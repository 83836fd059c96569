//! Intensity, compensator and log-density of a path under given parameters.

use super::kernel::Kernel;
use super::params::ModelParams;
use super::path::Path;

/// Floor applied to intensities inside a logarithm.
pub const LOG_FLOOR: f64 = 1e-10;

/// `Σ_{T_ℓ < t} h(t - T_ℓ)` over the events of `source`.
///
/// Events exactly at `t` are excluded so the intensity is predictable.
pub fn kernel_convolution<K: Kernel>(path: &Path, kernel: &K, source: usize, t: f64) -> f64 {
    path.events(source)
        .iter()
        .take_while(|&&s| s < t)
        .map(|&s| kernel.evaluate(t - s))
        .sum()
}

/// `λ_j(t) = μ_j + Σ_{j'} a_{j,j'} H_{j'}(t)`.
pub fn intensity<K: Kernel>(
    params: &ModelParams,
    kernel: &K,
    path: &Path,
    target: usize,
    t: f64,
) -> f64 {
    let row = params.a_row(target);
    let excitation: f64 = row
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0.0)
        .map(|(source, &a)| a * kernel_convolution(path, kernel, source, t))
        .sum();
    params.mu()[target] + excitation
}

/// Log-density value together with whether any event intensity hit [`LOG_FLOOR`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDensity {
    pub value: f64,
    pub clamped: bool,
}

/// `-Σ_j ∫_0^T λ_j + Σ_j Σ_{T_ℓ ∈ 𝒯_j} log λ_j(T_ℓ)`.
///
/// The compensator uses the kernel primitive; intensities at events are
/// evaluated directly, so this costs `O(N² M)` and is meant as the reference
/// route. `SuffStats::log_density` is the fast one.
pub fn log_density<K: Kernel>(params: &ModelParams, kernel: &K, path: &Path) -> LogDensity {
    let horizon = path.horizon();
    let dim = params.dim();
    debug_assert_eq!(dim, path.dim());

    let primitive: Vec<f64> = (0..dim)
        .map(|source| {
            path.events(source)
                .iter()
                .map(|&s| kernel.integral(horizon - s))
                .sum()
        })
        .collect();

    let mut value = 0.0;
    let mut clamped = false;
    for j in 0..dim {
        let compensator = params.mu()[j] * horizon
            + params
                .a_row(j)
                .iter()
                .zip(&primitive)
                .map(|(a, p)| a * p)
                .sum::<f64>();
        value -= compensator;
        for &t in path.events(j) {
            let lambda = intensity(params, kernel, path, j, t);
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hawkes::ExponentialKernel;

    fn k3() -> ExponentialKernel {
        ExponentialKernel::new(3.0).unwrap()
    }

    #[test]
    fn convolution_examples() {
        let empty = Path::empty(5.0, 1).unwrap();
        assert_eq!(kernel_convolution(&empty, &k3(), 0, 2.0), 0.0);

        let one = Path::new(5.0, vec![vec![1.0]]).unwrap();
        let v = kernel_convolution(&one, &k3(), 0, 2.0);
        assert!((v - 3.0 * (-3.0f64).exp()).abs() < 1e-15);
        assert!((v - 0.14936).abs() < 1e-5);

        let two = Path::new(5.0, vec![vec![0.5, 1.0]]).unwrap();
        // event at t itself is excluded
        let direct: f64 = [0.5f64, 1.0]
            .iter()
            .filter(|&&s| s < 1.0)
            .map(|&s| 3.0 * (-3.0 * (1.0 - s)).exp())
            .sum();
        let v = kernel_convolution(&two, &k3(), 0, 1.0);
        assert_eq!(v, direct);
        assert!((v - 0.66939).abs() < 1e-5);
    }

    #[test]
    fn intensity_examples() {
        let path = Path::new(5.0, vec![vec![1.0]]).unwrap();
        let zero_a = ModelParams::new(vec![0.4], vec![vec![0.0]]).unwrap();
        for t in [0.0, 1.0, 1.5, 4.0] {
            assert_eq!(intensity(&zero_a, &k3(), &path, 0, t), 0.4);
        }
        let p = ModelParams::new(vec![0.4], vec![vec![0.5]]).unwrap();
        let v = intensity(&p, &k3(), &path, 0, 2.0);
        assert!((v - (0.4 + 0.5 * 3.0 * (-3.0f64).exp())).abs() < 1e-15);
        assert!((v - 0.47468).abs() < 1e-5);
    }

    #[test]
    fn poisson_reduction() {
        let p = ModelParams::new(vec![0.4], vec![vec![0.0]]).unwrap();
        let path = Path::new(5.0, vec![vec![1.0, 3.0]]).unwrap();
        let ld = log_density(&p, &k3(), &path);
        assert!((ld.value - (-2.0 + 2.0 * 0.4f64.ln())).abs() < 1e-12);
        assert!((ld.value + 3.83258).abs() < 1e-5);
        assert!(!ld.clamped);

        let empty = Path::empty(5.0, 2).unwrap();
        let p2 = ModelParams::new(vec![0.4, 0.7], vec![vec![0.3, 0.1], vec![0.0, 0.2]]).unwrap();
        let ld = log_density(&p2, &k3(), &empty);
        assert!((ld.value + 1.1 * 5.0).abs() < 1e-12);
    }

    #[test]
    fn clamps_nonpositive_intensity() {
        let p = ModelParams::new(vec![0.1], vec![vec![-1.0]]).unwrap();
        let path = Path::new(5.0, vec![vec![1.0, 1.01]]).unwrap();
        let ld = log_density(&p, &k3(), &path);
        assert!(ld.clamped);
        assert!(ld.value.is_finite());
    }
}
