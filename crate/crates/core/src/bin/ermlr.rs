use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ermlr::classify::{train_ermlr, ClassifierModel, SplitMode, TrainConfig};
use ermlr::harness::{emit_report, run_benchmark, BenchmarkConfig};
use ermlr::hawkes::{ExponentialKernel, ModelParams};
use ermlr::io::{read_json, read_jsonl, read_paths, write_json, write_jsonl};
use ermlr::lasso::{fit_all, EbicPoint, LassoConfig};
use ermlr::rng::SeedStream;
use ermlr::simulate::{make_scenario, sample_dataset, ClassStructure, MixtureSpec, ScenarioName, ScenarioSpec};
use ermlr::stats::{aggregate, compute_all, compute_suff_stats, StatsDump, SuffStats};
use ermlr::{Error, Result};

#[derive(Parser)]
#[command(name = "ermlr", version, about = "Classify multivariate Hawkes paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ermlr,
    Pi,
}

#[derive(Clone, Copy, ValueEnum)]
enum Split {
    None,
    Half,
}

#[derive(Subcommand)]
enum Command {
    /// Draw labelled paths from a scenario or a mixture file.
    Simulate {
        #[arg(long, default_value_t = 1)]
        scenario: u32,
        #[arg(long = "M", default_value_t = 10)]
        dim: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "T", default_value_t = 5.0)]
        horizon: f64,
        #[arg(long, default_value_t = ExponentialKernel::DEFAULT_BETA)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "K", default_value_t = 3)]
        num_classes: usize,
        #[arg(long, default_value_t = 0.4)]
        baseline: f64,
        /// Mixture JSON used instead of a scenario.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Writes the mixture that generated the data.
        #[arg(long)]
        save_params: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-class Lasso fits with EBIC calibration.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = ExponentialKernel::DEFAULT_BETA)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        ebic_gamma: f64,
        #[arg(long, default_value_t = 40)]
        grid: usize,
        #[arg(long, default_value_t = 3.0)]
        decades: f64,
        #[arg(long)]
        kappa_fixed: Option<f64>,
        #[arg(long)]
        nonnegative: bool,
        #[arg(long)]
        dump_stats: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a classifier and write it as JSON.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = ExponentialKernel::DEFAULT_BETA)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = Mode::Ermlr)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Split::None)]
        split: Split,
        #[arg(long = "K")]
        num_classes: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict labels for a dataset with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the Monte-Carlo benchmark.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Serialize)]
struct FitEntry {
    label: usize,
    n_k: usize,
    theta: ModelParams,
    kappa_hat: f64,
    /// 1-based `(j, j')` pairs.
    support: Vec<(usize, usize)>,
    ebic_trace: Vec<EbicPoint>,
}

fn labels_and_stats(data: &PathBuf, beta: f64) -> Result<(Vec<Arc<SuffStats>>, Vec<usize>, usize)> {
    let samples = read_jsonl(data)?;
    let kernel = ExponentialKernel::new(beta)?;
    let dim = samples[0].path.dim();
    let labels = samples.iter().map(|s| s.label).collect();
    Ok((compute_all(&samples, &kernel), labels, dim))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate {
            scenario,
            dim,
            n,
            horizon,
            beta,
            seed,
            num_classes,
            baseline,
            params,
            save_params,
            out,
        } => {
            let kernel = ExponentialKernel::new(beta)?;
            let (mix, report) = match params {
                Some(file) => {
                    let given: MixtureSpec = read_json(&file)?;
                    let mix = MixtureSpec::new(given.class_weights, given.classes, kernel, horizon)?;
                    let classes: Vec<ClassStructure> = mix.classes.iter().map(ClassStructure::of).collect();
                    let report = serde_json::to_value(classes)?;
                    (mix, report)
                }
                None => {
                    let mut spec = ScenarioSpec::new(ScenarioName::from_index(scenario)?, dim, seed);
                    spec.num_classes = num_classes;
                    spec.baseline = baseline;
                    let (mix, report) = make_scenario(&spec)?;
                    let mix = MixtureSpec::new(mix.class_weights, mix.classes, kernel, horizon)?;
                    (mix, serde_json::to_value(report)?)
                }
            };
            let samples = sample_dataset(&mix, n, SeedStream::new(seed).derive(1))?;
            write_jsonl(&out, &samples)?;
            if let Some(file) = save_params {
                write_json(&file, &mix)?;
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Fit {
            data,
            beta,
            ebic_gamma,
            grid,
            decades,
            kappa_fixed,
            nonnegative,
            dump_stats,
            out,
        } => {
            let (stats, labels, dim) = labels_and_stats(&data, beta)?;
            let num_classes = labels.iter().copied().max().unwrap_or(1);
            let config = LassoConfig {
                grid_size: grid,
                ebic_gamma,
                grid_decades: decades,
                nonnegative,
                kappa_fixed,
                ..LassoConfig::default()
            };
            config.validate()?;
            if let Some(file) = dump_stats {
                let dumps = (1..=num_classes)
                    .map(|label| {
                        let members: Vec<_> = stats
                            .iter()
                            .zip(&labels)
                            .filter(|(_, &l)| l == label)
                            .map(|(s, _)| s.clone())
                            .collect();
                        aggregate(dim, &members).map(|cs| StatsDump::new(label, &cs))
                    })
                    .collect::<Result<Vec<_>>>()?;
                write_json(&file, &dumps)?;
            }
            let fits = fit_all(dim, &stats, &labels, num_classes, &config)?;
            let entries: Vec<FitEntry> = fits
                .into_iter()
                .enumerate()
                .map(|(k, f)| FitEntry {
                    label: k + 1,
                    n_k: f.n_k,
                    theta: f.theta,
                    kappa_hat: f.kappa_hat,
                    support: f.support.iter().map(|&(j, jp)| (j + 1, jp + 1)).collect(),
                    ebic_trace: f.ebic_trace,
                })
                .collect();
            write_json(&out, &entries)?;
        }
        Command::Train {
            data,
            beta,
            mode,
            split,
            num_classes,
            out,
        } => {
            let (stats, labels, _) = labels_and_stats(&data, beta)?;
            let config = TrainConfig {
                split: match split {
                    Split::None => SplitMode::None,
                    Split::Half => SplitMode::Half,
                },
                num_classes,
                ..TrainConfig::default()
            };
            let trained = train_ermlr(&stats, &labels, &ExponentialKernel::new(beta)?, &config)?;
            let model = match mode {
                Mode::Ermlr => trained.ermlr,
                Mode::Pi => trained.pi,
            };
            write_json(&out, &model)?;
        }
        Command::Predict { model, data, out } => {
            let model: ClassifierModel = read_json(&model)?;
            model.validate()?;
            let kernel = model.kernel();
            let stats: Vec<Arc<SuffStats>> = read_paths(&data)?
                .iter()
                .map(|p| {
                    if p.dim() != model.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: model.dim(),
                            got: p.dim(),
                        });
                    }
                    Ok(Arc::new(compute_suff_stats(p, &kernel)))
                })
                .collect::<Result<_>>()?;
            let predicted = model.predict_all(&stats)?;
            let mut w = csv::Writer::from_path(&out)?;
            w.write_record(["index", "label"])?;
            for (i, label) in predicted.iter().enumerate() {
                w.write_record([i.to_string(), label.to_string()])?;
            }
            w.flush()?;
        }
        Command::Benchmark {
            config,
            out_dir,
            threads,
            seed,
        } => {
            let mut bench: BenchmarkConfig = read_json(&config)?;
            if let Some(seed) = seed {
                bench.seed = seed;
            }
            let dir = out_dir
                .or_else(|| bench.out_dir.clone().map(PathBuf::from))
                .ok_or_else(|| Error::InvalidArgument("no output directory given".into()))?;
            let rows = match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?
                    .install(|| run_benchmark(&bench))?,
                None => run_benchmark(&bench)?,
            };
            emit_report(&rows, &dir)?;
            if rows.iter().any(|r| !r.is_ok()) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
