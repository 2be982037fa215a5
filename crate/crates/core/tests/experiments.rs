use qnmc::classifier::ClassifierSpec;
use qnmc::dataset::synthetic::{GaussianConfig, GeneratorSpec, MoonConfig};
use qnmc::dataset::split_indices;
use qnmc::encoding::EncoderKind;
use qnmc::evaluation::{
    derive_run_seed, run_experiment, run_predictions, ClassifierEntry, DatasetSource, ExperimentConfig, RescaleSetting,
};

fn moon_config(runs: usize, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        DatasetSource::generator(GeneratorSpec::Moon(MoonConfig::default())),
        vec![
            ClassifierEntry::new(ClassifierSpec::nmc()),
            ClassifierEntry::new(ClassifierSpec::qnmc(EncoderKind::Stereographic)),
            ClassifierEntry::new(ClassifierSpec::qnmc(EncoderKind::Informative)),
            ClassifierEntry::new(ClassifierSpec::lda(1e-6)),
            ClassifierEntry::new(ClassifierSpec::qda(1e-6)),
        ],
    );
    cfg.runs = runs;
    cfg.seed = seed;
    cfg
}

#[test]
fn report_does_not_depend_on_thread_count() {
    let cfg = moon_config(24, 5);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = single.install(|| run_experiment(&cfg).unwrap().to_json().unwrap());
    let parallel = run_experiment(&cfg).unwrap().to_json().unwrap();
    assert_eq!(serial, parallel);
    assert_eq!(parallel, run_experiment(&cfg).unwrap().to_json().unwrap());
}

#[test]
fn master_seed_changes_the_report() {
    let a = run_experiment(&moon_config(5, 1)).unwrap();
    let b = run_experiment(&moon_config(5, 2)).unwrap();
    assert_ne!(a.run_seeds, b.run_seeds);
    assert_ne!(a.classifiers[0].accuracies, b.classifiers[0].accuracies);
}

#[test]
fn run_splits_differ() {
    let cfg = moon_config(100, 9);
    let data = cfg.dataset.load(cfg.seed).unwrap();
    let splits: Vec<Vec<usize>> = (0..100)
        .map(|r| split_indices(&data, &cfg.split.with_seed(derive_run_seed(cfg.seed, r))).unwrap().1)
        .collect();
    for i in 0..splits.len() {
        for j in 0..i {
            assert_ne!(splits[i], splits[j], "runs {i} and {j} share a split");
        }
    }
}

#[test]
fn nmc_run_predictions_are_flat_in_t() {
    let mut cfg = ExperimentConfig::new(
        DatasetSource::generator(GeneratorSpec::Gaussian(GaussianConfig::default())),
        vec![ClassifierEntry::new(ClassifierSpec::nmc())],
    );
    cfg.runs = 10;
    let data = cfg.dataset.load(0).unwrap();
    let base = run_predictions(&cfg, &data).unwrap();
    for t in [0.01, 0.5, 2.0, 100.0] {
        cfg.rescale = Some(RescaleSetting::Uniform(t));
        assert_eq!(run_predictions(&cfg, &data).unwrap(), base, "t = {t}");
    }
}
