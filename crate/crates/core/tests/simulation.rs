mod common;

use common::{expected_counts_volterra, random_stable_params};
use ermlr::hawkes::{ExponentialKernel, ModelParams};
use ermlr::rng::SeedStream;
use ermlr::simulate::{expected_counts, make_scenario, sample_dataset, sample_path, BranchingSampler, MixtureSpec, ScenarioName, ScenarioSpec};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

/// Pearson statistic of `counts` against Poisson(`mean`), with the upper
/// tail merged until every expected bin count is at least 5.
fn chi_square_vs_poisson(counts: &[usize], mean: f64) -> (f64, usize) {
    let n = counts.len() as f64;
    let law = Poisson::new(mean).unwrap();
    let mut edges = Vec::new();
    let mut covered = 0.0;
    let mut k = 0u64;
    loop {
        let p = law.pmf(k);
        let rest = 1.0 - covered - p;
        if n * p < 5.0 || n * rest < 5.0 {
            break;
        }
        edges.push((k, p));
        covered += p;
        k += 1;
    }
    let tail_start = k;
    let tail_p = 1.0 - covered;
    let mut observed = vec![0usize; edges.len() + 1];
    for &c in counts {
        let c = c as u64;
        if c >= tail_start {
            observed[edges.len()] += 1;
        } else {
            observed[c as usize] += 1;
        }
    }
    let mut stat = 0.0;
    for (i, &(_, p)) in edges.iter().enumerate() {
        stat += (observed[i] as f64 - n * p).powi(2) / (n * p);
    }
    stat += (observed[edges.len()] as f64 - n * tail_p).powi(2) / (n * tail_p);
    (stat, edges.len())
}

#[test]
fn poisson_counts_pass_chi_square() {
    let mu = [0.4, 1.3];
    let p = ModelParams::new(mu.to_vec(), vec![vec![0.0; 2]; 2]).unwrap();
    let sampler = BranchingSampler::new(&p, &ExponentialKernel::default()).unwrap();
    let stream = SeedStream::new(404);
    let paths: Vec<_> = (0..10_000).map(|i| sampler.sample(5.0, &mut stream.rng(i)).unwrap()).collect();
    for (j, &m) in mu.iter().enumerate() {
        let counts: Vec<usize> = paths.iter().map(|path| path.count(j)).collect();
        let (stat, dof) = chi_square_vs_poisson(&counts, m * 5.0);
        let critical = ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.999);
        assert!(stat < critical, "component {j}: chi2 {stat} with {dof} dof exceeds {critical}");

        let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
        let se = (m * 5.0 / counts.len() as f64).sqrt();
        assert!((mean - m * 5.0).abs() < 3.0 * se, "component {j}: mean {mean}");
    }
}

#[test]
fn monte_carlo_means_match_expected_counts() {
    let kernel = ExponentialKernel::default();
    let mut rng = common::rng(77);
    for model in 0..10u64 {
        let dim = 1 + (model as usize % 5);
        let p = random_stable_params(&mut rng, dim, 0.5, 0.8);
        let expected = expected_counts(&p, &kernel, 5.0).unwrap();
        let sampler = BranchingSampler::new(&p, &kernel).unwrap();
        let stream = SeedStream::new(1000 + model);
        let reps = 20_000;
        let mut sum = vec![0.0; dim];
        let mut sq = vec![0.0; dim];
        for i in 0..reps {
            let path = sampler.sample(5.0, &mut stream.rng(i)).unwrap();
            for j in 0..dim {
                let c = path.count(j) as f64;
                sum[j] += c;
                sq[j] += c * c;
            }
        }
        let n = reps as f64;
        for j in 0..dim {
            let mean = sum[j] / n;
            let var = (sq[j] - n * mean * mean) / (n - 1.0);
            let se = (var / n).sqrt();
            assert!(
                (mean - expected[j]).abs() < 3.0 * se,
                "model {model}, component {j}: MC {mean} vs {} (se {se})",
                expected[j]
            );
        }
    }
}

#[test]
fn expected_counts_match_volterra_oracle() {
    let kernel = ExponentialKernel::default();
    let p = ModelParams::new(vec![0.4], vec![vec![0.5]]).unwrap();
    let fast = expected_counts(&p, &kernel, 5.0).unwrap();
    let oracle = expected_counts_volterra(&p, 3.0, 5.0, 2000);
    assert!((fast[0] - oracle[0]).abs() < 1e-6, "{fast:?} vs {oracle:?}");

    let p = ModelParams::new(vec![0.4, 0.7], vec![vec![0.3, 0.2], vec![0.0, 0.45]]).unwrap();
    let fast = expected_counts(&p, &kernel, 5.0).unwrap();
    let oracle = expected_counts_volterra(&p, 3.0, 5.0, 2000);
    for (f, o) in fast.iter().zip(&oracle) {
        assert!((f - o).abs() < 1e-6, "{fast:?} vs {oracle:?}");
    }
}

#[test]
fn poisson_expected_counts_are_exact() {
    let p = ModelParams::new(vec![0.4, 0.25, 1.0], vec![vec![0.0; 3]; 3]).unwrap();
    assert_eq!(expected_counts(&p, &ExponentialKernel::default(), 5.0).unwrap(), vec![2.0, 1.25, 5.0]);
}

#[test]
fn sampled_paths_are_valid_and_reproducible() {
    let kernel = ExponentialKernel::default();
    let mut rng = common::rng(5);
    let p = random_stable_params(&mut rng, 4, 0.6, 0.9);
    let stream = SeedStream::new(12);
    for i in 0..200 {
        let path = sample_path(&p, &kernel, 5.0, &mut stream.rng(i)).unwrap();
        for j in 0..4 {
            let ev = path.events(j);
            assert!(ev.windows(2).all(|w| w[0] < w[1]));
            assert!(ev.iter().all(|&t| t > 0.0 && t <= 5.0));
        }
        let again = sample_path(&p, &kernel, 5.0, &mut stream.rng(i)).unwrap();
        assert_eq!(path, again);
    }
}

fn dataset_under(threads: usize, mix: &MixtureSpec) -> Vec<ermlr::hawkes::LabeledSample> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| sample_dataset(mix, 300, SeedStream::new(8)).unwrap())
}

#[test]
fn dataset_does_not_depend_on_thread_count() {
    let (mix, _) = make_scenario(&ScenarioSpec::new(ScenarioName::Scenario1, 10, 3)).unwrap();
    let one = dataset_under(1, &mix);
    // Sample i depends only on substream i, so a shorter draw is a prefix.
    let prefix = sample_dataset(&mix, 40, SeedStream::new(8)).unwrap();
    assert_eq!(prefix[..], one[..40]);
    assert_eq!(one, dataset_under(3, &mix));
    assert_eq!(one, dataset_under(8, &mix));
}

#[test]
fn class_frequencies_follow_weights() {
    let (mut mix, _) = make_scenario(&ScenarioSpec::new(ScenarioName::Scenario2, 10, 1)).unwrap();
    let data = sample_dataset(&mix, 3000, SeedStream::new(2)).unwrap();
    for k in 1..=3 {
        let f = data.iter().filter(|s| s.label == k).count() as f64 / 3000.0;
        let se = (1.0 / 3.0 * 2.0 / 3.0 / 3000.0f64).sqrt();
        assert!((f - 1.0 / 3.0).abs() < 3.0 * se, "class {k}: {f}");
    }
    mix.class_weights = vec![1.0, 0.0, 0.0];
    let data = sample_dataset(&mix, 200, SeedStream::new(2)).unwrap();
    assert!(data.iter().all(|s| s.label == 1));
}

#[test]
fn scenarios_are_deterministic_and_stable() {
    for name in [ScenarioName::Scenario1, ScenarioName::Scenario2] {
        for dim in [10, 25, 50] {
            let spec = ScenarioSpec::new(name, dim, 21);
            let (a, ra) = make_scenario(&spec).unwrap();
            let (b, rb) = make_scenario(&spec).unwrap();
            assert_eq!(a, b);
            assert_eq!(ra, rb);
            for (p, s) in a.classes.iter().zip(&ra.classes) {
                assert!(p.spectral_radius() < 1.0);
                assert!((s.sparsity - ra.targets.sparsity).abs() <= 0.02, "{name:?} M={dim}: {}", s.sparsity);
            }
        }
    }
}

#[test]
fn scenario_one_matches_published_structure_at_m25() {
    let (_, report) = make_scenario(&ScenarioSpec::new(ScenarioName::Scenario1, 25, 4)).unwrap();
    for c in &report.classes {
        assert!((c.sparsity - 0.85).abs() <= 0.02, "{}", c.sparsity);
        assert!((c.spectral_radius - 0.90).abs() <= 0.15 * 0.90, "{}", c.spectral_radius);
    }
}
