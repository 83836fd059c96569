use std::fs;

use ermlr::harness::{emit_report, hamming_distance, l2_distance, run_benchmark, summarize, BenchmarkConfig, MetricsRow};
use ermlr::classify::ErmConfig;
use ermlr::hawkes::ModelParams;
use ermlr::rng::SeedStream;
use ermlr::simulate::{sample_dataset, ScenarioName};
use proptest::prelude::*;

fn adjacency(dim: usize, a: Vec<f64>) -> ModelParams {
    ModelParams::from_flat(vec![0.4; dim], a).unwrap()
}

fn pattern(dim: usize) -> impl Strategy<Value = ModelParams> {
    proptest::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], dim * dim).prop_map(move |a| adjacency(dim, a))
}

proptest! {
    #[test]
    fn hamming_is_a_metric((x, y, z) in (1usize..6).prop_flat_map(|d| (pattern(d), pattern(d), pattern(d)))) {
        let dxy = hamming_distance(&x, &y).unwrap();
        prop_assert_eq!(dxy, hamming_distance(&y, &x).unwrap());
        prop_assert_eq!(hamming_distance(&x, &x).unwrap(), 0.0);
        prop_assert!((0.0..=1.0).contains(&dxy));
        let via = hamming_distance(&x, &z).unwrap() + hamming_distance(&z, &y).unwrap();
        prop_assert!(dxy <= via + 1e-15);
    }

    #[test]
    fn l2_matches_definition((x, y) in (1usize..6).prop_flat_map(|d| (pattern(d), pattern(d)))) {
        let d = x.dim();
        let mut sum = 0.0;
        for j in 0..d {
            for jp in 0..d {
                sum += (x.a(j, jp) - y.a(j, jp)).powi(2);
            }
        }
        prop_assert!((l2_distance(&x, &y).unwrap() - sum.sqrt()).abs() <= 1e-12);
    }
}

#[test]
fn distance_examples() {
    let mut truth = vec![0.0; 100];
    for i in 0..14 {
        truth[i * 7] = 0.3;
    }
    let truth = adjacency(10, truth);
    assert_eq!(hamming_distance(&truth, &truth).unwrap(), 0.0);
    assert!((hamming_distance(&truth, &ModelParams::zeros(10)).unwrap() - 0.14).abs() < 1e-15);
    let mut extra = truth.clone();
    extra.set_a(0, 1, 0.05);
    assert!((hamming_distance(&truth, &extra).unwrap() - 0.01).abs() < 1e-15);

    let mut single = ModelParams::zeros(3);
    single.set_a(1, 2, 0.3);
    assert!((l2_distance(&ModelParams::zeros(3), &single).unwrap() - 0.3).abs() < 1e-15);
    assert!(hamming_distance(&ModelParams::zeros(3), &ModelParams::zeros(4)).is_err());
}

fn small_config(seed: u64) -> BenchmarkConfig {
    BenchmarkConfig {
        scenario: ScenarioName::Scenario2,
        dims: vec![3],
        n_train: vec![30, 60],
        n_test: 100,
        repetitions: 2,
        seed,
        erm: ErmConfig { max_iter: 30, ..ErmConfig::default() },
        ..BenchmarkConfig::default()
    }
}

fn run_with_threads(config: &BenchmarkConfig, threads: usize) -> Vec<MetricsRow> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| run_benchmark(config).unwrap())
}

#[test]
fn smoke_run_populates_every_field() {
    let config = BenchmarkConfig { n_train: vec![40], repetitions: 1, ..small_config(1) };
    let rows = run_benchmark(&config).unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert!(r.is_ok(), "{}", r.status);
    for v in [r.d_hamming, r.d_l2, r.err_bayes, r.err_oes, r.err_pi, r.err_ermlr, r.risk_init, r.risk_final] {
        assert!(v.is_some_and(f64::is_finite));
    }
    assert!(r.wall_time_lasso.is_some() && r.wall_time_erm.is_some());
    for e in [r.err_bayes, r.err_oes, r.err_pi, r.err_ermlr] {
        assert!((0.0..=1.0).contains(&e.unwrap()));
    }
    assert!(r.d_hamming.unwrap() >= 0.0 && r.d_l2.unwrap() >= 0.0);
    assert!(r.risk_final.unwrap() <= r.risk_init.unwrap());
}

#[test]
fn events_total_counts_training_events() {
    let config = small_config(2);
    let rows = run_benchmark(&config).unwrap();
    let mix = config.mixture(3).unwrap();
    for r in &rows {
        let stream = SeedStream::new(config.seed)
            .derive(1)
            .derive(r.dim as u64)
            .derive(r.n as u64)
            .derive(r.repetition as u64)
            .derive(0);
        let train = sample_dataset(&mix, r.n, stream).unwrap();
        let total: usize = train.iter().map(|s| s.path.total_events()).sum();
        assert_eq!(r.events_total, Some(total));
    }
}

#[test]
fn metrics_csv_is_identical_across_runs_and_thread_counts() {
    let config = small_config(3);
    let mut outputs = Vec::new();
    for threads in [1, 1, 4] {
        let dir = tempfile::tempdir().unwrap();
        emit_report(&run_with_threads(&config, threads), dir.path()).unwrap();
        outputs.push(fs::read(dir.path().join("metrics.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn report_shapes() {
    let config = BenchmarkConfig { n_train: vec![40], repetitions: 1, ..small_config(4) };
    let rows = run_benchmark(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_report(&rows, dir.path()).unwrap();
    let metrics = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 2);
    assert!(!metrics.lines().next().unwrap().contains("wall_time"));
    let timings = fs::read_to_string(dir.path().join("timings.csv")).unwrap();
    assert_eq!(timings.lines().count(), 2);

    let rows = run_benchmark(&small_config(4)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_report(&rows, dir.path()).unwrap();
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    let plot: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("plotdata.json")).unwrap()).unwrap();
    assert_eq!(plot["n"], serde_json::json!([30, 60]));
    assert_eq!(plot["std_divisor"], "n-1");
    for s in plot["series"].as_array().unwrap() {
        assert_eq!(s["mean"].as_array().unwrap().len(), 2);
        assert_eq!(s["std"].as_array().unwrap().len(), 2);
    }
    assert!(fs::read_to_string(dir.path().join("tables.md")).unwrap().contains("| scenario2 | 3 | 60 | 2 | 0 |"));
}

#[test]
fn summary_uses_sample_std() {
    let config = BenchmarkConfig { repetitions: 3, n_train: vec![30], ..small_config(5) };
    let mut rows = run_benchmark(&config).unwrap();
    for (r, v) in rows.iter_mut().zip([0.1, 0.2, 0.3]) {
        r.err_ermlr = Some(v);
    }
    let cells = summarize(&rows);
    assert_eq!(cells.len(), 1);
    let (mean, std) = cells[0].get("err_ermlr").unwrap();
    assert!((mean - 0.2).abs() < 1e-15);
    assert!((std - 0.1).abs() < 1e-15);
}

#[test]
fn failed_repetitions_are_recorded() {
    let rows = run_benchmark(&small_config(6)).unwrap();
    let mut broken = rows[0].clone();
    broken.status = "failed: numerical error".into();
    broken.err_ermlr = None;
    let mut all = rows.clone();
    all.push(broken);
    let cells = summarize(&all);
    assert_eq!(cells.iter().map(|c| c.failed).sum::<usize>(), 1);

    let dir = tempfile::tempdir().unwrap();
    emit_report(&all, dir.path()).unwrap();
    let metrics = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert!(metrics.lines().last().unwrap().contains("failed: numerical error"));
}

#[test]
fn report_errors() {
    assert!(emit_report(&[], std::path::Path::new("/tmp")).is_err());
    let rows = run_benchmark(&BenchmarkConfig { n_train: vec![30], repetitions: 1, ..small_config(7) }).unwrap();
    let file = tempfile::NamedTempFile::new().unwrap();
    assert!(emit_report(&rows, &file.path().join("sub")).is_err());
    assert!(run_benchmark(&BenchmarkConfig { repetitions: 0, ..small_config(7) }).is_err());
}

#[test]
fn config_json_uses_short_names() {
    let text = r#"{"scenario":"scenario1","M":[10],"n_train":[100],"repetitions":2,"seed":9}"#;
    let c: BenchmarkConfig = serde_json::from_str(text).unwrap();
    assert_eq!(c.dims, vec![10]);
    assert_eq!(c.n_test, 3000);
    assert_eq!(c.horizon, 5.0);
    assert_eq!(c.num_classes, 3);
    assert_eq!(c.repetitions, 2);
}
