use crate::error::{Error, Result};
use crate::hawkes::ModelParams;

fn check_shape(a: &ModelParams, b: &ModelParams) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// Fraction of adjacency positions whose active/inactive status differs.
pub fn hamming_distance(truth: &ModelParams, estimate: &ModelParams) -> Result<f64> {
    check_shape(truth, estimate)?;
    let mismatches = truth
        .adjacency()
        .iter()
        .zip(estimate.adjacency())
        .filter(|(a, b)| (**a == 0.0) != (**b == 0.0))
        .count();
    let dim = truth.dim() as f64;
    Ok(mismatches as f64 / (dim * dim))
}

/// Entrywise Euclidean distance between adjacency matrices.
pub fn l2_distance(truth: &ModelParams, estimate: &ModelParams) -> Result<f64> {
    check_shape(truth, estimate)?;
    Ok(truth
        .adjacency()
        .iter()
        .zip(estimate.adjacency())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}
