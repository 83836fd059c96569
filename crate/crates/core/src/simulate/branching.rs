//! Cluster (branching) sampler.
//!
//! Immigrants on component `j` form a homogeneous Poisson process of rate
//! `mu_j`. Every event on `j'` at time `s` independently spawns, for each
//! target `j`, a Poisson(`a_{j,j'}`) number of children at `s + Exp(β)`.
//! Children past the horizon are dropped and recursion stops once no
//! generation has offspring left inside `[0, T]`.

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};

use crate::error::{Error, Result};
use crate::hawkes::{ExponentialKernel, ModelParams, Path};

/// A validated sampler for one parameter set.
#[derive(Debug, Clone)]
pub struct BranchingSampler {
    dim: usize,
    mu: Vec<f64>,
    /// For each source `j'`, the targets `j` with `a_{j,j'} > 0` and their offspring law.
    offspring: Vec<Vec<(usize, Poisson<f64>)>>,
    delay: Exp<f64>,
}

impl BranchingSampler {
    pub fn new(params: &ModelParams, kernel: &ExponentialKernel) -> Result<Self> {
        params.check_nonnegative()?;
        let radius = params.spectral_radius();
        if radius >= 1.0 {
            return Err(Error::UnstableAdjacency(radius));
        }
        let dim = params.dim();
        let offspring = (0..dim)
            .map(|source| {
                (0..dim)
                    .filter_map(|target| {
                        let a = params.a(target, source);
                        (a > 0.0).then(|| (target, Poisson::new(a).expect("positive mean")))
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            dim,
            mu: params.mu().to_vec(),
            offspring,
            delay: Exp::new(kernel.beta()).expect("positive rate"),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, horizon: f64, rng: &mut R) -> Result<Path> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        let mut events: Vec<Vec<f64>> = vec![Vec::new(); self.dim];
        let mut pending: Vec<(f64, usize)> = Vec::new();

        for (j, &rate) in self.mu.iter().enumerate() {
            if rate <= 0.0 {
                continue;
            }
            let count = Poisson::new(rate * horizon)
                .expect("positive mean")
                .sample(rng) as usize;
            for _ in 0..count {
                // (0, T]
                let t = horizon * (1.0 - rng.random::<f64>());
                events[j].push(t);
                pending.push((t, j));
            }
        }

        while let Some((s, source)) = pending.pop() {
            for (target, law) in &self.offspring[source] {
                let children = law.sample(rng) as usize;
                for _ in 0..children {
                    let t = s + self.delay.sample(rng);
                    if t <= horizon {
                        events[*target].push(t);
                        pending.push((t, *target));
                    }
                }
            }
        }

        for times in &mut events {
            times.sort_by(f64::total_cmp);
            strictly_increase(times, horizon);
        }
        Path::new(horizon, events)
    }
}

/// Nudges exact duplicates up by one ulp; anything pushed past the horizon is dropped.
fn strictly_increase(times: &mut Vec<f64>, horizon: f64) {
    for i in 1..times.len() {
        if times[i] <= times[i - 1] {
            times[i] = times[i - 1].next_up();
        }
    }
    while times.last().is_some_and(|&t| t > horizon) {
        times.pop();
    }
}

/// Draws one path. Fails when `A` has a negative entry or spectral radius `>= 1`.
pub fn sample_path<R: Rng + ?Sized>(
    params: &ModelParams,
    kernel: &ExponentialKernel,
    horizon: f64,
    rng: &mut R,
) -> Result<Path> {
    BranchingSampler::new(params, kernel)?.sample(horizon, rng)
}
