//! Baselines and interaction matrix of a linear multivariate Hawkes process.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Baseline vector `mu` and interaction matrix `A` of an `M`-dimensional process.
///
/// Entry `(j, j')` of `A` is the influence of component `j'` on component `j`.
/// The matrix is stored row-major, so row `j` together with `mu[j]` forms the
/// parameter block `(mu_j, a_{j,1}, ..., a_{j,M})` of the least-squares contrast.
///
/// Entries are only required to be finite: estimators work over signed
/// parameters. Use [`ModelParams::check_nonnegative`] where the model semantics
/// matter.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    dim: usize,
    mu: Vec<f64>,
    a: Vec<f64>,
}

impl ModelParams {
    pub fn new(mu: Vec<f64>, adjacency: Vec<Vec<f64>>) -> Result<Self> {
        let dim = mu.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("process dimension must be >= 1".into()));
        }
        if adjacency.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: adjacency.len(),
            });
        }
        let mut a = Vec::with_capacity(dim * dim);
        for row in &adjacency {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            a.extend_from_slice(row);
        }
        Self::from_flat(mu, a)
    }

    /// Builds parameters from a row-major `M×M` buffer.
    pub fn from_flat(mu: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        let dim = mu.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("process dimension must be >= 1".into()));
        }
        if a.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: a.len(),
            });
        }
        if mu.iter().chain(a.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("parameters must be finite".into()));
        }
        Ok(Self { dim, mu, a })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            mu: vec![0.0; dim],
            a: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn mu_mut(&mut self) -> &mut [f64] {
        &mut self.mu
    }

    /// Row-major interaction matrix.
    pub fn adjacency(&self) -> &[f64] {
        &self.a
    }

    pub fn adjacency_mut(&mut self) -> &mut [f64] {
        &mut self.a
    }

    #[inline]
    pub fn a(&self, j: usize, jp: usize) -> f64 {
        self.a[j * self.dim + jp]
    }

    #[inline]
    pub fn set_a(&mut self, j: usize, jp: usize, value: f64) {
        self.a[j * self.dim + jp] = value;
    }

    pub fn a_row(&self, j: usize) -> &[f64] {
        &self.a[j * self.dim..(j + 1) * self.dim]
    }

    pub fn adjacency_rows(&self) -> Vec<Vec<f64>> {
        self.a.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// `(mu_j, a_{j,1}, ..., a_{j,M})`.
    pub fn theta_row(&self, j: usize) -> Vec<f64> {
        let mut row = Vec::with_capacity(self.dim + 1);
        row.push(self.mu[j]);
        row.extend_from_slice(self.a_row(j));
        row
    }

    pub fn set_theta_row(&mut self, j: usize, row: &[f64]) {
        assert_eq!(row.len(), self.dim + 1, "theta row has wrong length");
        self.mu[j] = row[0];
        let dim = self.dim;
        self.a[j * dim..(j + 1) * dim].copy_from_slice(&row[1..]);
    }

    /// Positions `(j, j')` with a nonzero interaction coefficient, in row-major order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.a
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| (i / self.dim, i % self.dim))
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.a.iter().filter(|&&v| v != 0.0).count()
    }

    /// Fraction of zero entries of `A`.
    pub fn sparsity_rate(&self) -> f64 {
        1.0 - self.support_size() as f64 / (self.dim * self.dim) as f64
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest eigenvalue modulus of `A`.
    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.a, self.dim)
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        if self.mu.iter().chain(self.a.iter()).any(|&x| x < 0.0) {
            return Err(Error::InvalidArgument(
                "baselines and interaction weights must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Keeps `A` only on `support`; `mu` is untouched.
    pub fn masked(&self, support: &[(usize, usize)]) -> Self {
        let mut out = Self {
            dim: self.dim,
            mu: self.mu.clone(),
            a: vec![0.0; self.a.len()],
        };
        for &(j, jp) in support {
            out.set_a(j, jp, self.a(j, jp));
        }
        out
    }
}

/// Spectral radius of a row-major square matrix.
pub fn spectral_radius(a: &[f64], dim: usize) -> f64 {
    if a.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let m = DMatrix::from_row_slice(dim, dim, a);
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    #[serde(rename = "M")]
    dim: usize,
    mu: Vec<f64>,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
}

impl Serialize for ModelParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ParamsRepr {
            dim: self.dim,
            mu: self.mu.clone(),
            a: self.adjacency_rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ParamsRepr::deserialize(deserializer)?;
        if repr.mu.len() != repr.dim {
            return Err(serde::de::Error::custom(format!(
                "M = {} but mu has {} entries",
                repr.dim,
                repr.mu.len()
            )));
        }
        ModelParams::new(repr.mu, repr.a).map_err(serde::de::Error::custom)
    }
}
