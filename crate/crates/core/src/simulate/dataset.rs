use rand::Rng;
use rayon::prelude::*;

use super::branching::BranchingSampler;
use super::scenario::MixtureSpec;
use crate::error::{Error, Result};
use crate::hawkes::LabeledSample;
use crate::rng::SeedStream;

/// Draws `n` labeled paths; sample `i` uses substream `i` of `stream`, so the
/// result does not depend on the number of worker threads.
pub fn sample_dataset(mix: &MixtureSpec, n: usize, stream: SeedStream) -> Result<Vec<LabeledSample>> {
    if n == 0 {
        return Err(Error::InvalidArgument("dataset size must be >= 1".into()));
    }
    let samplers = mix
        .classes
        .iter()
        .map(|p| BranchingSampler::new(p, &mix.kernel))
        .collect::<Result<Vec<_>>>()?;
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.rng(i);
            let class = draw_class(&mix.class_weights, &mut rng);
            let path = samplers[class].sample(mix.horizon, &mut rng)?;
            LabeledSample::new(path, class + 1)
        })
        .collect()
}

fn draw_class<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random::<f64>() * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        last_positive = k;
        acc += w;
        if u < acc {
            return k;
        }
    }
    last_positive
}
