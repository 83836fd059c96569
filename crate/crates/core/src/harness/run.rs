use std::sync::Arc;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{train_ermlr, ClassifierModel, ErmConfig, SplitMode, TrainConfig, Variant};
use crate::error::{Error, Result};
use crate::harness::distance::{hamming_distance, l2_distance};
use crate::hawkes::{ExponentialKernel, LabeledSample};
use crate::lasso::LassoConfig;
use crate::rng::SeedStream;
use crate::simulate::{make_scenario, sample_dataset, MixtureSpec, ScenarioName, ScenarioSpec};
use crate::stats::{compute_all, SuffStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkConfig {
    pub scenario: ScenarioName,
    #[serde(rename = "M")]
    pub dims: Vec<usize>,
    pub n_train: Vec<usize>,
    pub n_test: usize,
    pub repetitions: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub beta: f64,
    pub seed: u64,
    #[serde(rename = "K")]
    pub num_classes: usize,
    pub baseline: f64,
    pub lasso: LassoConfig,
    pub erm: ErmConfig,
    pub split: SplitMode,
    pub out_dir: Option<String>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioName::Scenario1,
            dims: vec![10],
            n_train: vec![300, 600, 1500],
            n_test: 3000,
            repetitions: 30,
            horizon: 5.0,
            beta: ExponentialKernel::DEFAULT_BETA,
            seed: 0,
            num_classes: 3,
            baseline: 0.4,
            lasso: LassoConfig::default(),
            erm: ErmConfig::default(),
            split: SplitMode::None,
            out_dir: None,
        }
    }
}

impl BenchmarkConfig {
    /// Training sizes used for the support-recovery table.
    pub fn support_preset(scenario: ScenarioName) -> Self {
        Self {
            scenario,
            dims: vec![10, 25, 50],
            n_train: vec![100, 500, 1000],
            ..Self::default()
        }
    }

    /// Training sizes used for the classification experiments.
    pub fn classification_preset(scenario: ScenarioName) -> Self {
        Self {
            scenario,
            dims: vec![10, 25, 50],
            n_train: vec![300, 600, 1500],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be >= 1".into()));
        }
        if self.n_test == 0 {
            return Err(Error::InvalidArgument("n_test must be >= 1".into()));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidArgument("M values must be >= 1".into()));
        }
        if self.n_train.is_empty() || self.n_train.contains(&0) {
            return Err(Error::InvalidArgument("n_train values must be >= 1".into()));
        }
        if self.num_classes == 0 {
            return Err(Error::InvalidArgument("K must be >= 1".into()));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidArgument("T must be positive".into()));
        }
        ExponentialKernel::new(self.beta)?;
        self.lasso.validate()?;
        self.erm.validate()
    }

    /// Mixture used for every repetition at dimension `dim`.
    pub fn mixture(&self, dim: usize) -> Result<MixtureSpec> {
        let mut spec = ScenarioSpec::new(self.scenario, dim, SeedStream::new(self.seed).derive(0).derive(dim as u64).key());
        spec.num_classes = self.num_classes;
        spec.baseline = self.baseline;
        let (mix, _) = make_scenario(&spec)?;
        MixtureSpec::new(mix.class_weights, mix.classes, ExponentialKernel::new(self.beta)?, self.horizon)
    }
}

/// Measurements of one repetition. Failed repetitions carry the error message
/// and no measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub scenario: ScenarioName,
    #[serde(rename = "M")]
    pub dim: usize,
    pub n: usize,
    pub repetition: usize,
    pub status: String,
    pub d_hamming: Option<f64>,
    pub d_l2: Option<f64>,
    pub err_bayes: Option<f64>,
    pub err_oes: Option<f64>,
    pub err_pi: Option<f64>,
    pub err_ermlr: Option<f64>,
    pub events_total: Option<usize>,
    pub risk_init: Option<f64>,
    pub risk_final: Option<f64>,
    #[serde(skip)]
    pub wall_time_lasso: Option<f64>,
    #[serde(skip)]
    pub wall_time_erm: Option<f64>,
}

impl MetricsRow {
    fn failed(scenario: ScenarioName, dim: usize, n: usize, repetition: usize, err: &Error) -> Self {
        Self {
            scenario,
            dim,
            n,
            repetition,
            status: format!("failed: {err}"),
            d_hamming: None,
            d_l2: None,
            err_bayes: None,
            err_oes: None,
            err_pi: None,
            err_ermlr: None,
            events_total: None,
            risk_init: None,
            risk_final: None,
            wall_time_lasso: None,
            wall_time_erm: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, Copy)]
struct Job {
    dim: usize,
    n: usize,
    repetition: usize,
}

/// Runs every `(M, n, repetition)` cell. Each repetition draws from its own
/// substream, so rows do not depend on scheduling or thread count.
///
/// Repetition `r` of cell `(M, n)` samples its training set from
/// `SeedStream::new(seed).derive(1).derive(M).derive(n).derive(r).derive(0)`
/// and its test set from the same stream with a final `derive(1)`.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<Vec<MetricsRow>> {
    config.validate()?;
    let mixtures = config
        .dims
        .iter()
        .map(|&dim| config.mixture(dim))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for (mi, &dim) in config.dims.iter().enumerate() {
        for &n in &config.n_train {
            for repetition in 0..config.repetitions {
                jobs.push((mi, Job { dim, n, repetition }));
            }
        }
    }
    let rows: Vec<MetricsRow> = jobs
        .par_iter()
        .map(|&(mi, job)| {
            let row = run_repetition(config, &mixtures[mi], job)
                .unwrap_or_else(|e| MetricsRow::failed(config.scenario, job.dim, job.n, job.repetition, &e));
            if row.is_ok() {
                info!("M={} n={} rep={} done", job.dim, job.n, job.repetition);
            } else {
                warn!("M={} n={} rep={} {}", job.dim, job.n, job.repetition, row.status);
            }
            row
        })
        .collect();
    Ok(rows)
}

fn repetition_stream(config: &BenchmarkConfig, job: Job) -> SeedStream {
    SeedStream::new(config.seed)
        .derive(1)
        .derive(job.dim as u64)
        .derive(job.n as u64)
        .derive(job.repetition as u64)
}

fn split(samples: &[LabeledSample], kernel: &ExponentialKernel) -> (Vec<Arc<SuffStats>>, Vec<usize>) {
    (compute_all(samples, kernel), samples.iter().map(|s| s.label).collect())
}

fn run_repetition(config: &BenchmarkConfig, mix: &MixtureSpec, job: Job) -> Result<MetricsRow> {
    let stream = repetition_stream(config, job);
    let train = sample_dataset(mix, job.n, stream.derive(0))?;
    let test = sample_dataset(mix, config.n_test, stream.derive(1))?;
    let events_total = train.iter().map(|s| s.path.total_events()).sum();

    let (train_stats, train_labels) = split(&train, &mix.kernel);
    let (test_stats, test_labels) = split(&test, &mix.kernel);

    let train_config = TrainConfig {
        lasso: config.lasso.clone(),
        erm: config.erm.clone(),
        split: config.split,
        num_classes: Some(mix.num_classes()),
    };
    let trained = train_ermlr(&train_stats, &train_labels, &mix.kernel, &train_config)?;

    let bayes = ClassifierModel::new(Variant::Bayes, &mix.kernel, mix.class_weights.clone(), mix.classes.clone())?;
    let oes = trained.oes(&mix.classes)?;
    let estimate = &trained.fits[0].theta;

    Ok(MetricsRow {
        scenario: config.scenario,
        dim: job.dim,
        n: job.n,
        repetition: job.repetition,
        status: "ok".into(),
        d_hamming: Some(hamming_distance(&mix.classes[0], estimate)?),
        d_l2: Some(l2_distance(&mix.classes[0], estimate)?),
        err_bayes: Some(bayes.error_rate(&test_stats, &test_labels)?),
        err_oes: Some(oes.error_rate(&test_stats, &test_labels)?),
        err_pi: Some(trained.pi.error_rate(&test_stats, &test_labels)?),
        err_ermlr: Some(trained.ermlr.error_rate(&test_stats, &test_labels)?),
        events_total: Some(events_total),
        risk_init: Some(trained.adagrad.initial_risk),
        risk_final: Some(trained.adagrad.risk),
        wall_time_lasso: Some(trained.lasso_seconds),
        wall_time_erm: Some(trained.erm_seconds),
    })
}
