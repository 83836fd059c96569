//! Feasible set of the refitting step and the flat layout of its free coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hawkes::ModelParams;

/// Bounds on refitted parameters for a training set of size `n`:
/// `μ_j ∈ [1/n, log n]`, `a_{j,j'} ∈ [0, log n]` on the estimated support
/// (zero elsewhere) and `‖A_k‖_F ≤ log n`, per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub n: usize,
    pub dim: usize,
    pub mu_lower: f64,
    pub mu_upper: f64,
    pub a_upper: f64,
    pub frob_radius: f64,
    /// 0-based `(j, j')` pairs per class; serialized 1-based.
    #[serde(with = "one_based")]
    pub supports: Vec<Vec<(usize, usize)>>,
}

impl ConstraintSet {
    pub fn new(n: usize, dim: usize, supports: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(
                "constraint bounds need a training size n >= 2".into(),
            ));
        }
        if let Some(&(j, jp)) = supports.iter().flatten().find(|(j, jp)| *j >= dim || *jp >= dim) {
            return Err(Error::InvalidArgument(format!(
                "support entry ({j}, {jp}) outside a {dim}x{dim} matrix"
            )));
        }
        let log_n = (n as f64).ln();
        Ok(Self {
            n,
            dim,
            mu_lower: 1.0 / n as f64,
            mu_upper: log_n,
            a_upper: log_n,
            frob_radius: log_n,
            supports,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.supports.len()
    }

    pub fn layout(&self) -> FreeLayout {
        FreeLayout::new(self.dim, &self.supports)
    }

    /// Euclidean projection of one class's free coordinates, in place.
    ///
    /// Baselines are clipped to their interval. Interaction entries are
    /// clipped at zero and then radially scaled into the Frobenius ball;
    /// for the nonnegative orthant intersected with a ball this composition
    /// is the exact projection. The per-entry cap is applied last and never
    /// binds while `a_upper >= frob_radius`.
    pub fn project_class(&self, mu: &mut [f64], a: &mut [f64]) {
        for m in mu.iter_mut() {
            *m = m.clamp(self.mu_lower, self.mu_upper);
        }
        for v in a.iter_mut() {
            *v = v.max(0.0);
        }
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > self.frob_radius {
            let scale = self.frob_radius / norm;
            for v in a.iter_mut() {
                *v *= scale;
            }
        }
        for v in a.iter_mut() {
            *v = v.min(self.a_upper);
        }
    }

    /// Projects a flat free-coordinate vector laid out by [`ConstraintSet::layout`].
    pub fn project(&self, layout: &FreeLayout, x: &mut [f64]) {
        for class in &layout.classes {
            let (mu, rest) = x[class.offset..class.offset + class.len].split_at_mut(self.dim);
            self.project_class(mu, rest);
        }
    }

    /// Projects full parameter sets; entries off the supports are set to zero.
    pub fn project_params(&self, params: &[ModelParams]) -> Result<Vec<ModelParams>> {
        let layout = self.layout();
        let mut x = layout.pack(params)?;
        self.project(&layout, &mut x);
        Ok(layout.unpack(&x))
    }

    /// Whether every bound holds to within `tol`.
    pub fn contains(&self, layout: &FreeLayout, x: &[f64], tol: f64) -> bool {
        layout.classes.iter().all(|class| {
            let slice = &x[class.offset..class.offset + class.len];
            let (mu, a) = slice.split_at(self.dim);
            mu.iter()
                .all(|&m| m >= self.mu_lower - tol && m <= self.mu_upper + tol)
                && a.iter().all(|&v| v >= -tol && v <= self.a_upper + tol)
                && a.iter().map(|v| v * v).sum::<f64>().sqrt() <= self.frob_radius + tol
        })
    }
}

mod one_based {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(supports: &[Vec<(usize, usize)>], s: S) -> Result<S::Ok, S::Error> {
        let shifted: Vec<Vec<(usize, usize)>> = supports
            .iter()
            .map(|sup| sup.iter().map(|&(j, jp)| (j + 1, jp + 1)).collect())
            .collect();
        shifted.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<(usize, usize)>>, D::Error> {
        let raw = Vec::<Vec<(usize, usize)>>::deserialize(d)?;
        raw.into_iter()
            .map(|sup| {
                sup.into_iter()
                    .map(|(j, jp)| {
                        if j == 0 || jp == 0 {
                            Err(serde::de::Error::custom("support indices are 1-based"))
                        } else {
                            Ok((j - 1, jp - 1))
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Position of one class's free coordinates inside the flat vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassLayout {
    pub offset: usize,
    pub len: usize,
    /// Per row `j`: `(j', flat index)` of each free interaction coefficient.
    pub rows: Vec<Vec<(usize, usize)>>,
}

impl ClassLayout {
    pub fn mu_index(&self, j: usize) -> usize {
        self.offset + j
    }
}

/// Flat layout of free coordinates: for each class, the `M` baselines
/// followed by its support entries in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeLayout {
    pub dim: usize,
    pub classes: Vec<ClassLayout>,
    pub len: usize,
}

impl FreeLayout {
    pub fn new(dim: usize, supports: &[Vec<(usize, usize)>]) -> Self {
        let mut offset = 0;
        let classes = supports
            .iter()
            .map(|support| {
                let mut sorted = support.clone();
                sorted.sort_unstable();
                sorted.dedup();
                let mut rows = vec![Vec::new(); dim];
                for (i, &(j, jp)) in sorted.iter().enumerate() {
                    rows[j].push((jp, offset + dim + i));
                }
                let class = ClassLayout {
                    offset,
                    len: dim + sorted.len(),
                    rows,
                };
                offset += class.len;
                class
            })
            .collect();
        Self {
            dim,
            classes,
            len: offset,
        }
    }

    pub fn pack(&self, params: &[ModelParams]) -> Result<Vec<f64>> {
        if params.len() != self.classes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.classes.len(),
                got: params.len(),
            });
        }
        let mut x = vec![0.0; self.len];
        for (class, p) in self.classes.iter().zip(params) {
            if p.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: p.dim(),
                });
            }
            x[class.offset..class.offset + self.dim].copy_from_slice(p.mu());
            for (j, row) in class.rows.iter().enumerate() {
                for &(jp, idx) in row {
                    x[idx] = p.a(j, jp);
                }
            }
        }
        Ok(x)
    }

    pub fn unpack(&self, x: &[f64]) -> Vec<ModelParams> {
        self.classes
            .iter()
            .map(|class| {
                let mut p = ModelParams::zeros(self.dim);
                p.mu_mut().copy_from_slice(&x[class.offset..class.offset + self.dim]);
                for (j, row) in class.rows.iter().enumerate() {
                    for &(jp, idx) in row {
                        p.set_a(j, jp, x[idx]);
                    }
                }
                p
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize) -> ConstraintSet {
        ConstraintSet::new(n, 2, vec![vec![(0, 1), (1, 1)], vec![]]).unwrap()
    }

    #[test]
    fn bounds_follow_n() {
        let c = set(100);
        assert_eq!(c.mu_lower, 0.01);
        assert!((c.mu_upper - 100f64.ln()).abs() < 1e-15);
        assert!(ConstraintSet::new(1, 2, vec![]).is_err());
        assert!(ConstraintSet::new(10, 2, vec![vec![(2, 0)]]).is_err());
    }

    #[test]
    fn feasible_point_is_fixed() {
        let c = set(100);
        let layout = c.layout();
        let x = vec![0.5, 0.3, 0.2, 0.1, 1.0, 2.0];
        let mut y = x.clone();
        c.project(&layout, &mut y);
        assert_eq!(x, y);
    }

    #[test]
    fn zero_baseline_is_lifted() {
        let c = set(100);
        let layout = c.layout();
        let mut x = vec![0.0, 0.3, 0.2, 0.1, 0.0, 9.0];
        c.project(&layout, &mut x);
        assert_eq!(x[0], 0.01);
        assert_eq!(x[5], 100f64.ln());
    }

    #[test]
    fn off_support_entries_vanish() {
        let c = set(100);
        let p = ModelParams::new(vec![0.5, 0.5], vec![vec![0.7, 0.2], vec![0.4, -0.3]]).unwrap();
        let out = c.project_params(&[p.clone(), p]).unwrap();
        assert_eq!(out[0].support(), vec![(0, 1)]);
        assert_eq!(out[0].a(1, 1), 0.0);
        assert!(out[1].support().is_empty());
    }
}
