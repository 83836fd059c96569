//! Benchmark scenarios and class mixtures.
//!
//! The reference matrices are not public; both scenarios are rebuilt from
//! their published aggregate statistics (sparsity rate, Frobenius norm and
//! spectral radius per class, for `M ∈ {10, 25, 50}`). Other values of `M`
//! use the statistics of the nearest tabulated dimension. The
//! [`StructureReport`] records what was actually generated.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hawkes::{ExponentialKernel, ModelParams};
use crate::rng::SeedStream;

/// Allowed deviation of the generated sparsity rate from its target.
pub const SPARSITY_TOLERANCE: f64 = 0.02;

/// Spectral radius that redrawn or rescaled random matrices are kept below.
const MAX_RADIUS: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioName {
    /// Block-diagonal interactions; block layout and block values permuted per class.
    Scenario1,
    /// One random support shared by all classes; values permuted per class.
    Scenario2,
}

impl ScenarioName {
    pub fn from_index(i: u32) -> Result<Self> {
        match i {
            1 => Ok(Self::Scenario1),
            2 => Ok(Self::Scenario2),
            _ => Err(Error::InvalidArgument(format!("unknown scenario {i}"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Scenario1 => "scenario1",
            Self::Scenario2 => "scenario2",
        }
    }
}

/// Target statistics of a scenario at one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureTargets {
    pub sparsity: f64,
    pub frobenius: f64,
    /// Only enforced for Scenario 1; random supports get whatever radius they have.
    pub spectral_radius: Option<f64>,
}

impl StructureTargets {
    /// Published class-1 statistics at the tabulated dimension closest to `dim`.
    pub fn published(name: ScenarioName, dim: usize) -> Self {
        let row = [10usize, 25, 50]
            .iter()
            .enumerate()
            .min_by_key(|(_, &m)| m.abs_diff(dim))
            .map(|(i, _)| i)
            .unwrap_or(0);
        match name {
            ScenarioName::Scenario1 => {
                let sparsity = [0.86, 0.85, 0.85][row];
                let frobenius = [1.37, 1.63, 1.52][row];
                let radius = [0.76, 0.90, 0.90][row];
                Self {
                    sparsity,
                    frobenius,
                    spectral_radius: Some(radius),
                }
            }
            ScenarioName::Scenario2 => Self {
                sparsity: [0.89, 0.92, 0.94][row],
                frobenius: [1.44, 2.07, 2.55][row],
                spectral_radius: None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    #[serde(rename = "M")]
    pub dim: usize,
    #[serde(default = "default_classes", rename = "K")]
    pub num_classes: usize,
    #[serde(default = "default_baseline")]
    pub baseline: f64,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the published statistics.
    #[serde(default)]
    pub targets: Option<StructureTargets>,
    /// Relative block sizes for Scenario 1, scaled by `M`.
    #[serde(default = "default_block_fractions")]
    pub block_fractions: Vec<f64>,
    /// Range of raw random coefficients for Scenario 2 before Frobenius scaling.
    #[serde(default = "default_coefficient_range")]
    pub coefficient_range: (f64, f64),
}

fn default_classes() -> usize {
    3
}
fn default_baseline() -> f64 {
    0.4
}
fn default_block_fractions() -> Vec<f64> {
    vec![0.2, 0.2, 0.2, 0.1, 0.1]
}
fn default_coefficient_range() -> (f64, f64) {
    (0.2, 1.0)
}

impl ScenarioSpec {
    pub fn new(name: ScenarioName, dim: usize, seed: u64) -> Self {
        Self {
            name,
            dim,
            num_classes: default_classes(),
            baseline: default_baseline(),
            seed,
            targets: None,
            block_fractions: default_block_fractions(),
            coefficient_range: default_coefficient_range(),
        }
    }

    pub fn targets(&self) -> StructureTargets {
        self.targets
            .unwrap_or_else(|| StructureTargets::published(self.name, self.dim))
    }
}

/// Class prior, per-class parameters, kernel and horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub class_weights: Vec<f64>,
    pub classes: Vec<ModelParams>,
    pub kernel: ExponentialKernel,
    #[serde(rename = "T")]
    pub horizon: f64,
}

impl MixtureSpec {
    pub fn new(
        class_weights: Vec<f64>,
        classes: Vec<ModelParams>,
        kernel: ExponentialKernel,
        horizon: f64,
    ) -> Result<Self> {
        if classes.is_empty() || class_weights.len() != classes.len() {
            return Err(Error::DimensionMismatch {
                expected: classes.len(),
                got: class_weights.len(),
            });
        }
        if class_weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidArgument("class weights must be nonnegative".into()));
        }
        let total: f64 = class_weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "class weights must sum to 1, got {total}"
            )));
        }
        let dim = classes[0].dim();
        if let Some(bad) = classes.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        Ok(Self {
            class_weights,
            classes,
            kernel,
            horizon,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn dim(&self) -> usize {
        self.classes[0].dim()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStructure {
    pub frobenius: f64,
    pub spectral_radius: f64,
    pub sparsity: f64,
    pub support_size: usize,
}

impl ClassStructure {
    pub fn of(p: &ModelParams) -> Self {
        Self {
            frobenius: p.frobenius_norm(),
            spectral_radius: p.spectral_radius(),
            sparsity: p.sparsity_rate(),
            support_size: p.support_size(),
        }
    }
}

/// Summary of a generated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub scenario: ScenarioName,
    #[serde(rename = "M")]
    pub dim: usize,
    pub targets: StructureTargets,
    /// Scenario 1 only: block sizes in class-1 diagonal order.
    pub block_sizes: Option<Vec<usize>>,
    pub classes: Vec<ClassStructure>,
}

impl StructureReport {
    pub fn describe(name: ScenarioName, targets: StructureTargets, blocks: Option<Vec<usize>>, classes: &[ModelParams]) -> Self {
        Self {
            scenario: name,
            dim: classes.first().map_or(0, ModelParams::dim),
            targets,
            block_sizes: blocks,
            classes: classes.iter().map(ClassStructure::of).collect(),
        }
    }
}

/// Builds the per-class parameters of a scenario with a uniform class prior,
/// `β = 3` and `T = 5`; adjust the returned mixture for other settings.
pub fn make_scenario(spec: &ScenarioSpec) -> Result<(MixtureSpec, StructureReport)> {
    if spec.dim < 2 {
        return Err(Error::InfeasibleScenario("scenarios need M >= 2".into()));
    }
    if spec.num_classes == 0 {
        return Err(Error::InfeasibleScenario("need at least one class".into()));
    }
    if !(spec.baseline > 0.0 && spec.baseline.is_finite()) {
        return Err(Error::InfeasibleScenario("baseline must be positive".into()));
    }
    let targets = spec.targets();
    if !(0.0..1.0).contains(&targets.sparsity) || !(targets.frobenius > 0.0) {
        return Err(Error::InfeasibleScenario(format!("invalid targets {targets:?}")));
    }
    let stream = SeedStream::new(spec.seed).derive(match spec.name {
        ScenarioName::Scenario1 => 1,
        ScenarioName::Scenario2 => 2,
    });
    let (classes, blocks) = match spec.name {
        ScenarioName::Scenario1 => {
            let (c, b) = block_scenario(spec, &targets, stream)?;
            (c, Some(b))
        }
        ScenarioName::Scenario2 => (random_scenario(spec, &targets, stream)?, None),
    };
    let report = StructureReport::describe(spec.name, targets, blocks, &classes);
    let k = spec.num_classes;
    let mix = MixtureSpec::new(vec![1.0 / k as f64; k], classes, ExponentialKernel::default(), 5.0)?;
    Ok((mix, report))
}

/// Integer block sizes close to `fractions · M` whose squared sum best
/// matches the target number of nonzero entries.
pub fn block_sizes(dim: usize, fractions: &[f64], sparsity: f64) -> Result<Vec<usize>> {
    if fractions.is_empty() || fractions.iter().any(|&f| !(f > 0.0)) {
        return Err(Error::InfeasibleScenario("block fractions must be positive".into()));
    }
    let mut sizes: Vec<usize> = fractions
        .iter()
        .map(|f| ((f * dim as f64).round() as usize).max(1))
        .collect();
    while sizes.iter().sum::<usize>() > dim {
        let smallest = (0..sizes.len()).min_by_key(|&i| (sizes[i], usize::MAX - i)).unwrap();
        sizes.remove(smallest);
    }
    let target = (1.0 - sparsity) * (dim * dim) as f64;
    let gap = |s: &[usize]| (s.iter().map(|b| (b * b) as f64).sum::<f64>() - target).abs();
    loop {
        let current = gap(&sizes);
        let mut best: Option<(f64, Vec<usize>)> = None;
        for i in 0..sizes.len() {
            for up in [true, false] {
                let mut cand = sizes.clone();
                if up {
                    if cand.iter().sum::<usize>() >= dim {
                        continue;
                    }
                    cand[i] += 1;
                } else {
                    cand[i] -= 1;
                }
                cand.retain(|&b| b > 0);
                if cand.is_empty() {
                    continue;
                }
                let g = gap(&cand);
                if g + 1e-12 < current && best.as_ref().is_none_or(|(bg, _)| g < *bg) {
                    best = Some((g, cand));
                }
            }
        }
        match best {
            Some((_, cand)) => sizes = cand,
            None => break,
        }
    }
    let achieved = 1.0 - sizes.iter().map(|b| b * b).sum::<usize>() as f64 / (dim * dim) as f64;
    if (achieved - sparsity).abs() > SPARSITY_TOLERANCE {
        return Err(Error::InfeasibleScenario(format!(
            "block layout cannot reach sparsity {sparsity} at M = {dim} (best {achieved:.4})"
        )));
    }
    Ok(sizes)
}

/// Per-block spectral radii: linearly decreasing from `radius`, with a slope
/// chosen so that the root sum of squares equals `frobenius`.
pub fn block_radii(count: usize, radius: f64, frobenius: f64) -> Vec<f64> {
    if count == 1 {
        return vec![radius];
    }
    let last = (count - 1) as f64;
    let norm = |slope: f64| {
        (0..count)
            .map(|i| (radius * (1.0 - slope * i as f64 / last)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let slope = if frobenius >= norm(0.0) {
        0.0
    } else if frobenius <= norm(1.0) {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if norm(mid) > frobenius {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    (0..count)
        .map(|i| radius * (1.0 - slope * i as f64 / last))
        .collect()
}

fn block_scenario(
    spec: &ScenarioSpec,
    targets: &StructureTargets,
    stream: SeedStream,
) -> Result<(Vec<ModelParams>, Vec<usize>)> {
    let dim = spec.dim;
    let radius = targets.spectral_radius.unwrap_or(0.9);
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InfeasibleScenario(format!("block radius {radius} not in (0, 1)")));
    }
    let sizes = block_sizes(dim, &spec.block_fractions, targets.sparsity)?;
    let radii = block_radii(sizes.len(), radius, targets.frobenius);

    let mut rng = stream.rng(0);
    let mut classes: Vec<ModelParams> = Vec::with_capacity(spec.num_classes);
    let mut class1_order = Vec::new();
    for k in 0..spec.num_classes {
        let mut attempt = 0;
        loop {
            let mut order: Vec<usize> = (0..sizes.len()).collect();
            let mut value_of: Vec<usize> = (0..sizes.len()).collect();
            if k > 0 {
                order.shuffle(&mut rng);
                value_of.shuffle(&mut rng);
            }
            let params = block_matrix(dim, spec.baseline, &sizes, &radii, &order, &value_of)?;
            attempt += 1;
            if attempt > 100 || !classes.contains(&params) {
                if k == 0 {
                    class1_order = order.iter().map(|&b| sizes[b]).collect();
                }
                classes.push(params);
                break;
            }
        }
    }
    Ok((classes, class1_order))
}

fn block_matrix(
    dim: usize,
    baseline: f64,
    sizes: &[usize],
    radii: &[f64],
    order: &[usize],
    value_of: &[usize],
) -> Result<ModelParams> {
    let mut params = ModelParams::from_flat(vec![baseline; dim], vec![0.0; dim * dim])?;
    let mut start = 0;
    for &block in order {
        let size = sizes[block];
        let value = radii[value_of[block]] / size as f64;
        for j in start..start + size {
            for jp in start..start + size {
                params.set_a(j, jp, value);
            }
        }
        start += size;
    }
    Ok(params)
}

fn random_scenario(
    spec: &ScenarioSpec,
    targets: &StructureTargets,
    stream: SeedStream,
) -> Result<Vec<ModelParams>> {
    let dim = spec.dim;
    let cells = dim * dim;
    let nnz = ((1.0 - targets.sparsity) * cells as f64).round() as usize;
    if nnz == 0 {
        return Err(Error::InfeasibleScenario(format!(
            "sparsity {} leaves no active entry at M = {dim}",
            targets.sparsity
        )));
    }
    let achieved = 1.0 - nnz as f64 / cells as f64;
    if (achieved - targets.sparsity).abs() > SPARSITY_TOLERANCE {
        return Err(Error::InfeasibleScenario(format!(
            "sparsity {} not reachable at M = {dim}",
            targets.sparsity
        )));
    }
    let (lo, hi) = spec.coefficient_range;
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InfeasibleScenario("invalid coefficient range".into()));
    }

    let mut fallback = None;
    for attempt in 0..200u64 {
        let mut rng = stream.rng(attempt);
        let mut cells_idx: Vec<usize> = (0..cells).collect();
        cells_idx.shuffle(&mut rng);
        let mut support = cells_idx[..nnz].to_vec();
        support.sort_unstable();
        let raw: Vec<f64> = (0..nnz).map(|_| rng.random_range(lo..=hi)).collect();
        let scale = targets.frobenius / raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        let values: Vec<f64> = raw.iter().map(|v| v * scale).collect();

        let mut classes = Vec::with_capacity(spec.num_classes);
        for k in 0..spec.num_classes {
            let mut permuted = values.clone();
            if k > 0 {
                permuted.shuffle(&mut rng);
            }
            let mut a = vec![0.0; cells];
            for (&cell, &v) in support.iter().zip(&permuted) {
                a[cell] = v;
            }
            classes.push(ModelParams::from_flat(vec![spec.baseline; dim], a)?);
        }
        let worst = classes
            .iter()
            .map(ModelParams::spectral_radius)
            .fold(0.0, f64::max);
        if worst < MAX_RADIUS {
            return Ok(classes);
        }
        if fallback.is_none() {
            fallback = Some((classes, worst));
        }
    }
    // No stable draw: shrink the first one.
    let (mut classes, worst) = fallback.expect("at least one attempt");
    let shrink = MAX_RADIUS / worst;
    for p in &mut classes {
        for v in p.adjacency_mut() {
            *v *= shrink;
        }
    }
    Ok(classes)
}
